#include "numgeo/embedstore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "numgeo/error.hpp"

namespace numgeo {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 2 + 4 + 4;
// Diagnosing a malformed file re-parses it under alternative dimensions;
// beyond these sizes we report the plain failure instead.
constexpr std::size_t kDiagnoseMaxBytes = std::size_t{64} << 20;
constexpr std::size_t kDiagnoseMaxRecords = 200000;

template <class T>
void put_le(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(u & 0xFF));
    u = static_cast<U>(u >> 8);
  }
}

template <class T>
T get_le(const char* p) {
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) {
    u = static_cast<std::make_unsigned_t<T>>((u << 8) | static_cast<unsigned char>(p[i]));
  }
  return static_cast<T>(u);
}

void put_f32(std::string& out, float f) { put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f)); }
float get_f32(const char* p) { return std::bit_cast<float>(get_le<std::uint32_t>(p)); }

bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  std::size_t i = 0;
  while (i < id.size()) {
    const auto c = static_cast<unsigned char>(id[i]);
    std::size_t extra = 0;
    if (c < 0x20 || c == 0x7F) return false;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= id.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(id[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

struct Layout {
  std::uint32_t dim = 0;
  std::uint32_t count = 0;
};

enum class ParseFailure { none, out_of_bytes, bad_id, trailing_bytes };

struct BodyParse {
  ParseFailure failure = ParseFailure::none;
  std::size_t record = 0;  // index of the failing record
};

/// Walks the record structure without materializing it. Record `odd_index`
/// (if any) is read with `odd_dim` floats, every other record with `dim`.
BodyParse walk_body(std::string_view bytes, const Layout& layout, std::optional<std::size_t> odd_index,
                    std::uint32_t odd_dim) {
  std::size_t pos = kHeaderBytes;
  for (std::size_t r = 0; r < layout.count; ++r) {
    if (bytes.size() - pos < 2) return {ParseFailure::out_of_bytes, r};
    const auto id_len = get_le<std::uint16_t>(bytes.data() + pos);
    pos += 2;
    if (bytes.size() - pos < id_len) return {ParseFailure::out_of_bytes, r};
    if (!valid_id(bytes.substr(pos, id_len))) return {ParseFailure::bad_id, r};
    pos += id_len;
    const std::size_t dim = (odd_index && *odd_index == r) ? odd_dim : layout.dim;
    const std::size_t need = 2 + 4 * dim;
    if (bytes.size() - pos < need) return {ParseFailure::out_of_bytes, r};
    pos += need;
  }
  if (pos != bytes.size()) return {ParseFailure::trailing_bytes, layout.count};
  return {};
}

[[noreturn]] void report_binary_failure(std::string_view bytes, const Layout& layout, const BodyParse& strict) {
  if (bytes.size() <= kDiagnoseMaxBytes && layout.count <= kDiagnoseMaxRecords) {
    const std::uint32_t max_dim = std::max<std::uint32_t>(2 * layout.dim, 16);
    // Every record carries a different dimension than the header declares.
    for (std::uint32_t d = 1; d <= max_dim; ++d) {
      if (d == layout.dim) continue;
      Layout alt = layout;
      alt.dim = d;
      if (walk_body(bytes, alt, std::nullopt, 0).failure == ParseFailure::none) {
        throw Error(Errc::dimension_mismatch, "header declares dim " + std::to_string(layout.dim) +
                                                  " but records carry " + std::to_string(d) + " values");
      }
    }
    // A single record deviates. It must sit at or before the strict failure.
    const std::size_t last = std::min<std::size_t>(strict.record, layout.count - 1);
    for (std::size_t r = 0; r <= last && layout.count > 0; ++r) {
      for (std::uint32_t d = 1; d <= max_dim; ++d) {
        if (d == layout.dim) continue;
        if (walk_body(bytes, layout, r, d).failure == ParseFailure::none) {
          throw Error(Errc::dimension_mismatch, "record " + std::to_string(r) + " carries " + std::to_string(d) +
                                                    " values, header declares dim " + std::to_string(layout.dim));
        }
      }
    }
  }
  switch (strict.failure) {
    case ParseFailure::out_of_bytes:
      throw Error(Errc::truncated_file, "file ends inside record " + std::to_string(strict.record) + " of " +
                                            std::to_string(layout.count));
    case ParseFailure::bad_id:
      throw Error(Errc::corrupt_record, "record " + std::to_string(strict.record) + " has an invalid id");
    case ParseFailure::trailing_bytes:
      throw Error(Errc::corrupt_record, "unexpected bytes after the last declared record");
    case ParseFailure::none: break;
  }
  throw Error(Errc::corrupt_record, "malformed embedding file");
}

std::vector<EmbeddingRecord> decode_binary(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes) throw Error(Errc::truncated_file, "file shorter than the embedding header");
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kEmbeddingVersion) {
    throw Error(Errc::corrupt_header, "unsupported version " + std::to_string(version));
  }
  Layout layout;
  layout.dim = get_le<std::uint32_t>(bytes.data() + 6);
  layout.count = get_le<std::uint32_t>(bytes.data() + 10);
  if (layout.dim == 0) throw Error(Errc::corrupt_header, "dimension is zero");

  const auto strict = walk_body(bytes, layout, std::nullopt, 0);
  if (strict.failure != ParseFailure::none) report_binary_failure(bytes, layout, strict);

  std::vector<EmbeddingRecord> records;
  records.reserve(layout.count);
  std::size_t pos = kHeaderBytes;
  for (std::size_t r = 0; r < layout.count; ++r) {
    EmbeddingRecord rec;
    const auto id_len = get_le<std::uint16_t>(bytes.data() + pos);
    pos += 2;
    rec.stimulus_id.assign(bytes.substr(pos, id_len));
    pos += id_len;
    rec.layer = get_le<std::uint16_t>(bytes.data() + pos);
    pos += 2;
    rec.vector.resize(layout.dim);
    for (auto& v : rec.vector) {
      v = get_f32(bytes.data() + pos);
      pos += 4;
      if (!std::isfinite(v)) {
        throw Error(Errc::non_finite_value, "record " + std::to_string(r) + " (" + rec.stimulus_id +
                                                ") contains a non-finite value");
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<EmbeddingRecord> decode_json_lines(std::string_view bytes) {
  std::vector<EmbeddingRecord> records;
  std::optional<std::size_t> dim;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    auto eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) eol = bytes.size();
    const auto line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::corrupt_record, where + ": " + e.what());
    }
    EmbeddingRecord rec;
    try {
      rec.stimulus_id = j.at("id").get<std::string>();
      const auto layer = j.at("layer").get<long long>();
      if (layer < 0 || layer > 0xFFFF) throw Error(Errc::corrupt_record, where + ": layer out of range");
      rec.layer = static_cast<std::uint16_t>(layer);
      const auto& vec = j.at("vector");
      if (!vec.is_array()) throw Error(Errc::corrupt_record, where + ": vector must be an array");
      rec.vector.reserve(vec.size());
      for (const auto& x : vec) {
        if (!x.is_number()) throw Error(Errc::non_finite_value, where + ": non-numeric vector component");
        const auto f = static_cast<float>(x.get<double>());
        if (!std::isfinite(f)) throw Error(Errc::non_finite_value, where + ": non-finite vector component");
        rec.vector.push_back(f);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::corrupt_record, where + ": " + e.what());
    }
    if (!valid_id(rec.stimulus_id)) throw Error(Errc::corrupt_record, where + ": invalid id");
    if (!dim) dim = rec.vector.size();
    if (rec.vector.size() != *dim || *dim == 0) {
      throw Error(Errc::dimension_mismatch, where + ": vector has " + std::to_string(rec.vector.size()) +
                                                " values, expected " + std::to_string(*dim));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::string encode_embeddings(std::span<const EmbeddingRecord> records, EmbeddingFileFormat format) {
  const std::size_t dim = records.empty() ? 0 : records.front().vector.size();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.vector.size() != dim) {
      throw Error(Errc::dimension_mismatch, "record " + rec.stimulus_id + " has " + std::to_string(rec.vector.size()) +
                                                " values, expected " + std::to_string(dim));
    }
    if (!std::all_of(rec.vector.begin(), rec.vector.end(), [](float v) { return std::isfinite(v); })) {
      throw Error(Errc::non_finite_value, "record " + rec.stimulus_id + " contains a non-finite value");
    }
    if (!valid_id(rec.stimulus_id) || rec.stimulus_id.size() > 0xFFFF) {
      throw Error(Errc::invalid_argument, "record " + std::to_string(r) + " has an unusable id");
    }
  }

  std::string out;
  if (format == EmbeddingFileFormat::JsonLines) {
    for (const auto& rec : records) {
      nlohmann::ordered_json j;
      j["id"] = rec.stimulus_id;
      j["layer"] = rec.layer;
      auto& vec = j["vector"] = nlohmann::ordered_json::array();
      for (float v : rec.vector) vec.push_back(static_cast<double>(v));
      out += j.dump();
      out += '\n';
    }
    return out;
  }

  if (dim == 0 && !records.empty()) throw Error(Errc::dimension_mismatch, "records have zero dimension");
  out.reserve(kHeaderBytes + records.size() * (4 + 32 + 4 * dim));
  out.append(kEmbeddingMagic);
  put_le<std::uint16_t>(out, kEmbeddingVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(std::max<std::size_t>(dim, 1)));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(records.size()));
  for (const auto& rec : records) {
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(rec.stimulus_id.size()));
    out.append(rec.stimulus_id);
    put_le<std::uint16_t>(out, rec.layer);
    for (float v : rec.vector) put_f32(out, v);
  }
  return out;
}

std::vector<EmbeddingRecord> decode_embeddings(std::string_view bytes) {
  if (bytes.substr(0, kEmbeddingMagic.size()) == kEmbeddingMagic) return decode_binary(bytes);
  if (bytes.size() < kEmbeddingMagic.size() && !bytes.empty() && kEmbeddingMagic.substr(0, bytes.size()) == bytes) {
    throw Error(Errc::truncated_file, "file ends inside the magic number");
  }
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && bytes[first] == '{') return decode_json_lines(bytes);
  throw Error(Errc::corrupt_header, "neither the NGE1 magic nor a JSON-lines record");
}

void write_embeddings(std::span<const EmbeddingRecord> records, const std::filesystem::path& path,
                      EmbeddingFileFormat format) {
  const auto bytes = encode_embeddings(records, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

std::vector<EmbeddingRecord> read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open embeddings file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return decode_embeddings(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Eigen::MatrixXd l2_normalize(const Eigen::MatrixXd& matrix) {
  Eigen::MatrixXd out = matrix;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(Errc::zero_row, "row " + std::to_string(r) + " has zero (or non-finite) norm");
    }
    out.row(r) /= norm;
  }
  return out;
}

TaskMatrix build_task_matrix(std::span<const EmbeddingRecord> records, std::span<const Stimulus> stimuli, TaskId task,
                             NumberFormat format, int layer) {
  std::vector<const Stimulus*> cell;
  for (const auto& s : stimuli) {
    if (s.task == task && s.format == format) cell.push_back(&s);
  }
  if (cell.empty()) {
    throw Error(Errc::invalid_argument, "no stimuli for " + std::string(to_string(task)) + "/" +
                                            std::string(to_string(format)));
  }
  std::sort(cell.begin(), cell.end(), [](const Stimulus* a, const Stimulus* b) {
    return a->value != b->value ? a->value < b->value : a->id < b->id;
  });

  std::unordered_map<std::string_view, const Stimulus*> wanted;
  for (const auto* s : cell) wanted.emplace(s->id, s);
  std::unordered_map<std::string_view, const EmbeddingRecord*> found;
  for (const auto& rec : records) {
    if (rec.layer != layer || !wanted.contains(rec.stimulus_id)) continue;
    if (!found.emplace(rec.stimulus_id, &rec).second) {
      throw Error(Errc::duplicate_id, "stimulus " + rec.stimulus_id + " has several records at layer " +
                                          std::to_string(layer));
    }
  }

  std::vector<std::string_view> missing;
  for (const auto* s : cell) {
    if (!found.contains(s->id)) missing.push_back(s->id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      if (i) list += ", ";
      list += missing[i];
    }
    if (missing.size() > 10) list += ", ...";
    throw Error(Errc::missing_record, std::to_string(missing.size()) + " stimuli lack a record at layer " +
                                          std::to_string(layer) + ": " + list);
  }

  const auto dim = static_cast<Eigen::Index>(found.at(cell.front()->id)->vector.size());
  TaskMatrix tm;
  tm.task = task;
  tm.format = format;
  tm.data.resize(static_cast<Eigen::Index>(cell.size()), dim);
  for (std::size_t r = 0; r < cell.size(); ++r) {
    const auto& vec = found.at(cell[r]->id)->vector;
    if (static_cast<Eigen::Index>(vec.size()) != dim) {
      throw Error(Errc::dimension_mismatch, "record " + cell[r]->id + " differs in dimension");
    }
    for (Eigen::Index c = 0; c < dim; ++c) tm.data(static_cast<Eigen::Index>(r), c) = vec[static_cast<std::size_t>(c)];
    tm.values.push_back(cell[r]->value);
    tm.ids.push_back(cell[r]->id);
  }
  tm.data = l2_normalize(tm.data);
  return tm;
}

Eigen::MatrixXd group_means(const TaskMatrix& tm) {
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(9, tm.dim());
  std::array<int, 9> counts{};
  for (Eigen::Index r = 0; r < tm.rows(); ++r) {
    const int v = tm.values[static_cast<std::size_t>(r)];
    if (v < 1 || v > 9) throw Error(Errc::invalid_argument, "row value outside 1..9");
    sums.row(v - 1) += tm.data.row(r);
    ++counts[static_cast<std::size_t>(v - 1)];
  }
  for (int v = 1; v <= 9; ++v) {
    if (counts[static_cast<std::size_t>(v - 1)] == 0) {
      throw Error(Errc::missing_value, std::string(to_string(tm.task)) + "/" + std::string(to_string(tm.format)) +
                                           " has no rows for value " + std::to_string(v));
    }
    sums.row(v - 1) /= counts[static_cast<std::size_t>(v - 1)];
  }
  return sums;
}

MeanMatrix mean_by_number(const TaskMatrix& tm) {
  return MeanMatrix{tm.task, tm.format, l2_normalize(group_means(tm))};
}

int select_layer_fraction(int num_layers, double fraction) {
  if (num_layers < 1) throw Error(Errc::invalid_argument, "num_layers must be >= 1");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(Errc::invalid_argument, "fraction must lie in (0, 1]");
  const auto layer = static_cast<int>(std::lround(fraction * num_layers));
  return std::clamp(layer, 1, num_layers);
}

}  // namespace numgeo
