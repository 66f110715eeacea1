#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace numgeo::cli {

using Json = nlohmann::ordered_json;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  void add(std::vector<Json> row);
};

struct Report {
  std::string kind;
  Json config;
  std::deque<Table> tables;  // stable references while tables are added

  Table& table(std::string name, std::vector<std::string> columns);
};

Json to_json(const Report& report);

/// RFC 4180 CSV. Numbers use the same text as the JSON payload.
std::string to_csv(const Table& table);

/// Names of non-finite numeric cells as "table:row:column", empty when clean.
std::vector<std::string> non_finite_cells(const Report& report);

/// Writes <dir>/<kind>.json and <dir>/<kind>_<table>.csv; returns the paths.
std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir);

}  // namespace numgeo::cli
