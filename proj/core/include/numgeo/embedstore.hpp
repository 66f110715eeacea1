#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "numgeo/stimuli.hpp"

namespace numgeo {

/// One activation vector for one stimulus at one layer. Stored as 32-bit
/// floats; every analysis promotes to double.
struct EmbeddingRecord {
  std::string stimulus_id;
  std::uint16_t layer = 0;
  std::vector<float> vector;

  friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

enum class EmbeddingFileFormat { Binary, JsonLines };

// Binary layout, little-endian:
//   "NGE1" | u16 version=1 | u32 dim | u32 count
//   count x ( u16 id_len | id bytes | u16 layer | dim x f32 )
inline constexpr std::string_view kEmbeddingMagic = "NGE1";
inline constexpr std::uint16_t kEmbeddingVersion = 1;

/// Serializes records; throws Error(dimension_mismatch) on ragged input and
/// Error(non_finite_value) on NaN/Inf components.
std::string encode_embeddings(std::span<const EmbeddingRecord> records,
                              EmbeddingFileFormat format = EmbeddingFileFormat::Binary);

/// Parses either layout, sniffing the magic. Error kinds: corrupt_header,
/// dimension_mismatch, non_finite_value, truncated_file.
std::vector<EmbeddingRecord> decode_embeddings(std::string_view bytes);

void write_embeddings(std::span<const EmbeddingRecord> records, const std::filesystem::path& path,
                      EmbeddingFileFormat format = EmbeddingFileFormat::Binary);
std::vector<EmbeddingRecord> read_embeddings(const std::filesystem::path& path);

/// Divides every row by its Euclidean norm. Throws Error(zero_row) naming the row.
Eigen::MatrixXd l2_normalize(const Eigen::MatrixXd& matrix);

/// Embeddings of one (task, format) cell. Rows are grouped by value in
/// ascending order, ties broken by stimulus id, and have unit norm.
struct TaskMatrix {
  TaskId task = TaskId::Quantity;
  NumberFormat format = NumberFormat::Digit;
  std::vector<int> values;
  std::vector<std::string> ids;
  Eigen::MatrixXd data;

  Eigen::Index rows() const noexcept { return data.rows(); }
  Eigen::Index dim() const noexcept { return data.cols(); }
};

/// Throws Error(missing_record) listing stimulus ids that have no record at
/// `layer`, Error(duplicate_id) when one has several.
TaskMatrix build_task_matrix(std::span<const EmbeddingRecord> records, std::span<const Stimulus> stimuli, TaskId task,
                             NumberFormat format, int layer);

/// Row v-1 holds the mean embedding of number v.
struct MeanMatrix {
  TaskId task = TaskId::Quantity;
  NumberFormat format = NumberFormat::Digit;
  Eigen::MatrixXd data;
};

/// Per-value arithmetic means before renormalization (9 x d).
Eigen::MatrixXd group_means(const TaskMatrix& tm);

/// group_means followed by l2_normalize. Throws Error(missing_value) if some
/// value in 1..9 has no rows.
MeanMatrix mean_by_number(const TaskMatrix& tm);

/// Hidden-state layer at the given depth: round(fraction * num_layers)
/// clamped to [1, num_layers]. Layer 0 (input embeddings) is never chosen.
int select_layer_fraction(int num_layers, double fraction);

}  // namespace numgeo
