#include "report.hpp"

#include <cmath>
#include <fstream>

#include "numgeo/error.hpp"
#include "numgeo/numgeo.hpp"

namespace numgeo::cli {

void Table::add(std::vector<Json> row) {
  if (row.size() != columns.size()) {
    throw Error(Errc::invalid_argument, "table " + name + ": row has " + std::to_string(row.size()) +
                                            " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

Table& Report::table(std::string name, std::vector<std::string> columns) {
  tables.push_back({std::move(name), std::move(columns), {}});
  return tables.back();
}

Json to_json(const Report& report) {
  Json out;
  out["kind"] = report.kind;
  out["config"] = report.config;
  Json tables = Json::array();
  for (const auto& t : report.tables) {
    Json rows = Json::array();
    for (const auto& r : t.rows) rows.push_back(Json(r));
    tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  out["tables"] = std::move(tables);
  out["version"] = kVersion;
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_cell(const Json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) return csv_field(cell.get<std::string>());
  return cell.dump();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += csv_field(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> non_finite_cells(const Report& report) {
  std::vector<std::string> bad;
  for (const auto& t : report.tables) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
        const auto& cell = t.rows[r][c];
        if (cell.is_number_float() && !std::isfinite(cell.get<double>())) {
          bad.push_back(t.name + ":" + std::to_string(r) + ":" + t.columns[c]);
        }
      }
    }
  }
  return bad;
}

std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const auto json_path = dir / (report.kind + ".json");
  write_file(json_path, to_json(report).dump(2) + "\n");
  written.push_back(json_path);
  for (const auto& t : report.tables) {
    const auto csv_path = dir / (report.kind + "_" + t.name + ".csv");
    write_file(csv_path, to_csv(t));
    written.push_back(csv_path);
  }
  return written;
}

}  // namespace numgeo::cli
