#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace tweezer::cli {

/// A numeric CSV file. Matrices have no column names; tables name every column.
///
///   # N=<n> units=<units>
///   col_a,col_b        (tables only)
///   1.5,2
struct Table {
  int n = 0;
  std::string units;
  std::vector<std::string> columns;
  Eigen::MatrixXd data;

  bool is_matrix() const { return columns.empty(); }
};

Table matrix_table(const Eigen::MatrixXd& m, std::string units);
Table column_table(std::vector<std::string> columns, const Eigen::MatrixXd& data, int n, std::string units);

/// Shortest-exact text form ("%.17g"); non-finite values as inf, -inf, nan.
std::string format_number(double v);
double parse_number(const std::string& text);

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Bitwise-equal values, with NaN equal to NaN.
bool same_values(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
bool same_table(const Table& a, const Table& b);

/// JSON number, or a string for non-finite values.
nlohmann::json json_number(double v);
double number_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// Files of one run, keyed by file name.
struct Artifacts {
  std::map<std::string, Table> tables;
  nlohmann::json summary = nlohmann::json::object();
  std::string config_text;

  /// Writes every table, summary.json and config.cfg (when set) into `dir`.
  void write(const std::filesystem::path& dir) const;
};

}  // namespace tweezer::cli
