#include "manpg/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "manpg/errors.hpp"
#include "manpg/spca.hpp"

namespace manpg {

namespace {

bool parse_cell(const std::string& cell, double& out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

DenseMatrix load_csv(const std::string& path, bool center) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_csv: cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::size_t ncols = 0;
  std::string line;
  std::size_t lineno = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_cells(line);
    std::vector<double> values(cells.size());
    bool all_numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_cell(cells[j], values[j])) {
        all_numeric = false;
        bad_col = j + 1;
        break;
      }
    }
    if (first_content_line) {
      first_content_line = false;
      if (!all_numeric) continue;  // header row
      ncols = cells.size();
      rows.push_back(std::move(values));
      continue;
    }
    if (!all_numeric)
      throw std::invalid_argument("load_csv: non-numeric cell at line " +
                                  std::to_string(lineno) + ", column " +
                                  std::to_string(bad_col));
    if (ncols == 0) ncols = cells.size();
    if (cells.size() != ncols)
      throw std::invalid_argument("load_csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(ncols));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::invalid_argument("load_csv: no data rows in '" + path + "'");

  DenseMatrix m(rows.size(), ncols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < ncols; ++j) m(i, j) = rows[i][j];
  return normalize_columns(m, center);
}

void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_matrix_csv: cannot open '" + path + "'");
  char buf[40];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf;
      out << (j + 1 == m.cols() ? '\n' : ',');
    }
  }
}

}  // namespace manpg
