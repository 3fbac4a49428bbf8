#include "artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <tweezer/error.hpp>

namespace tweezer::cli {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
  return out;
}

}  // namespace

Table matrix_table(const Eigen::MatrixXd& m, std::string units) {
  return Table{int(m.rows()), std::move(units), {}, m};
}

Table column_table(std::vector<std::string> columns, const Eigen::MatrixXd& data, int n, std::string units) {
  require(data.cols() == Eigen::Index(columns.size()), "table: column count mismatch");
  return Table{n, std::move(units), std::move(columns), data};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) fail(ErrorCode::InvalidArgument, "not a number: '" + text + "'");
  return v;
}

void write_table(const std::filesystem::path& path, const Table& t) {
  auto out = open_out(path);
  out << "# N=" << t.n << " units=" << t.units << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  if (!t.columns.empty()) out << '\n';
  for (Eigen::Index r = 0; r < t.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.data.cols(); ++c) out << (c ? "," : "") << format_number(t.data(r, c));
    out << '\n';
  }
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# N=", 0) != 0)
    fail(ErrorCode::InvalidArgument, path.string() + ": missing '# N=' header");
  const auto space = line.find(" units=");
  if (space == std::string::npos) fail(ErrorCode::InvalidArgument, path.string() + ": missing units in header");
  t.n = std::stoi(line.substr(4, space - 4));
  t.units = line.substr(space + 7);

  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    if (first && !cells.empty() && !cells.front().empty() &&
        (std::isalpha(static_cast<unsigned char>(cells.front()[0])) || cells.front()[0] == '_') &&
        cells.front() != "nan" && cells.front() != "inf") {
      t.columns = cells;
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c));
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::InvalidArgument, path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  const Eigen::Index cols = rows.empty() ? Eigen::Index(t.columns.size()) : Eigen::Index(rows.front().size());
  t.data.resize(Eigen::Index(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index c = 0; c < cols; ++c) t.data(Eigen::Index(r), c) = rows[r][std::size_t(c)];
  return t;
}

bool same_values(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
  }
  return true;
}

bool same_table(const Table& a, const Table& b) {
  return a.n == b.n && a.units == b.units && a.columns == b.columns && same_values(a.data, b.data);
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_number(j.get<std::string>());
  return j.get<double>();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

void Artifacts::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, table] : tables) write_table(dir / name, table);
  write_json(dir / "summary.json", summary);
  if (!config_text.empty()) {
    auto out = open_out(dir / "config.cfg");
    out << config_text;
  }
}

}  // namespace tweezer::cli
