#include "mdmt/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

#include "mdmt/errors.hpp"

namespace mdmt {

namespace {

void check_square(const Mat& matrix) {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols())
    throw ShapeError("accuracy matrix must be square and non-empty");
}

}  // namespace

double average_accuracy(const Mat& matrix, int t) {
  check_square(matrix);
  if (t < 1 || t > matrix.rows())
    throw ConfigError("average_accuracy: t out of range");
  return matrix.row(t - 1).head(t).sum() / t;
}

double forgetting(const Mat& matrix, int t) {
  check_square(matrix);
  if (t < 2 || t > matrix.rows())
    throw ConfigError("forgetting: t must be in [2, T]");
  double total = 0.0;
  for (int j = 0; j < t - 1; ++j) {
    double best = matrix(j, j);
    for (int l = j; l < t - 1; ++l) best = std::max(best, matrix(l, j));
    total += best - matrix(t - 1, j);
  }
  return total / (t - 1);
}

double ltr(const Mat& matrix) {
  check_square(matrix);
  const int T = static_cast<int>(matrix.rows());
  if (T < 2) throw ConfigError("ltr: need at least two tasks");
  double total = 0.0;
  for (int j = 0; j < T - 1; ++j) {
    double drop = std::min(0.0, matrix(T - 1, j) - matrix(j, j));
    total += (T - 1 - j) * drop;
  }
  return 0.0 - total / (T - 1);
}

double lca(const Mat& bshot) {
  if (bshot.rows() == 0 || bshot.cols() == 0)
    throw ShapeError("lca: empty curve");
  return bshot.colwise().mean().mean();
}

Mat parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream tokens(line);
    std::vector<double> row;
    std::string tok;
    while (tokens >> tok) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": non-numeric token '" + tok + "'");
      }
      if (used != tok.size())
        throw ParseError("line " + std::to_string(line_no) +
                         ": non-numeric token '" + tok + "'");
      if (v < 0.0 || v > 1.0)
        throw ParseError("line " + std::to_string(line_no) +
                         ": entry outside [0, 1]");
      row.push_back(v);
    }
    if (!row.empty()) {
      rows.push_back(std::move(row));
      row_lines.push_back(line_no);
    }
  }
  if (rows.empty()) throw ParseError("line 1: empty matrix");
  const int T = static_cast<int>(rows.size());
  Mat matrix = Mat::Zero(T, T);
  for (int i = 0; i < T; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    const int n = static_cast<int>(row.size());
    if (n != T && n != i + 1)
      throw ParseError("line " + std::to_string(row_lines[static_cast<std::size_t>(i)]) +
                       ": expected " + std::to_string(T) + " or " +
                       std::to_string(i + 1) + " entries, got " +
                       std::to_string(n));
    for (int j = 0; j < n; ++j)
      matrix(i, j) = row[static_cast<std::size_t>(j)];
  }
  return matrix;
}

std::string emit_matrix(const Mat& matrix) {
  check_square(matrix);
  std::string out;
  char buf[16];
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.4f", matrix(i, j));
      if (j > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace mdmt
