#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "posyid/errors.hpp"
#include "posyid/pipeline.hpp"

namespace posyid {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ", line " << line << ": " << what;
  throw DataError(msg.str());
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  // Header
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) fail(source_name, line_no, "missing header");
  const auto header = split(line);
  if (header.size() < 2) fail(source_name, line_no, "header needs w_1,...,w_nw,y");
  const std::size_t n_w = header.size() - 1;
  for (std::size_t j = 0; j < n_w; ++j) {
    const std::string expected = "w_" + std::to_string(j + 1);
    if (header[j] != expected) {
      fail(source_name, line_no,
           "expected column '" + expected + "', found '" + std::string(header[j]) + "'");
    }
  }
  if (header.back() != "y") {
    fail(source_name, line_no, "last column must be 'y', found '" + std::string(header.back()) + "'");
  }

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != n_w + 1) {
      fail(source_name, line_no,
           "expected " + std::to_string(n_w + 1) + " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      const auto cell = cells[j];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        fail(source_name, line_no,
             "cell " + std::to_string(j + 1) + " ('" + std::string(cell) + "') is not a number");
      }
      if (j < n_w && !(v > 0.0)) {
        fail(source_name, line_no,
             "w_" + std::to_string(j + 1) + " = " + std::string(cell) + " is not strictly positive");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) fail(source_name, line_no, "no data rows");

  RowMatrix samples(static_cast<Index>(rows), static_cast<Index>(n_w));
  Eigen::VectorXd y(static_cast<Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n_w; ++j) {
      samples(static_cast<Index>(r), static_cast<Index>(j)) = values[r * (n_w + 1) + j];
    }
    y[static_cast<Index>(r)] = values[r * (n_w + 1) + n_w];
  }
  return Dataset(std::move(samples), std::move(y));
}

Dataset ingest(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open data file " + csv_path.string());
  return parse_dataset_csv(in, csv_path.string());
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw DataError("cannot write data file " + csv_path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index j = 0; j < data.num_variables(); ++j) out << "w_" << j + 1 << ',';
  out << "y\n";
  for (Index k = 0; k < data.size(); ++k) {
    for (Index j = 0; j < data.num_variables(); ++j) out << data.samples()(k, j) << ',';
    out << data.responses()[k] << '\n';
  }
}

}  // namespace posyid
