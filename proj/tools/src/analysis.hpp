#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "numgeo/embedstore.hpp"
#include "numgeo/stimuli.hpp"
#include "report.hpp"

namespace numgeo::cli {

inline constexpr std::array<std::string_view, 7> kAnalysisKinds = {
    "effects", "procrustes", "overlap", "svcca", "axes", "density", "sparseness"};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitAnalysis = 4;

class Failure : public std::runtime_error {
 public:
  Failure(int exit_code, const std::string& message) : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

struct AnalysisConfig {
  std::filesystem::path embeddings;
  std::filesystem::path stimuli;
  std::optional<int> layer;
  double depth_fraction = 0.75;
  std::vector<TaskId> tasks;  // empty: every template task present in the stimuli
  std::vector<NumberFormat> formats{kAllFormats.begin(), kAllFormats.end()};
  std::uint64_t seed = 42;
  std::size_t permutations = 10000;
  std::optional<int> n_comp;
  bool include_properties = false;
  int density_grid = 40;
  unsigned threads = 1;
};

struct Cell {
  TaskMatrix matrix;
  TaskId task() const { return matrix.task; }
  NumberFormat format() const { return matrix.format; }
  std::string label() const;
};

struct Dataset {
  int layer = 0;
  std::vector<TaskId> tasks;
  std::vector<NumberFormat> formats;
  std::vector<Cell> cells;  // format-major, tasks in canonical order
  int n_comp = 0;           // override or rounded mean 95%-variance count
};

/// Throws Failure with exit code 2 (unreadable or invalid input) or 3
/// (stimulus and embedding ids disagree).
Dataset load_dataset(const AnalysisConfig& config);

/// Throws Failure(4) naming the analysis and the cell or pair on numerical errors.
Report run_analysis(std::string_view kind, const Dataset& data, const AnalysisConfig& config);

Json config_echo(const Dataset& data, const AnalysisConfig& config);

}  // namespace numgeo::cli
