#pragma once

#include <string>

#include "mdmt/types.hpp"

namespace mdmt {

// The accuracy matrix is T x T with a(i, j) = accuracy of task j measured
// after training task i (0-based rows/columns); the upper triangle is zero.
// Metric arguments t count trained tasks and are 1-based, matching the usual
// formula subscripts.

// A_t: mean accuracy over the first t tasks after training task t.
double average_accuracy(const Mat& matrix, int t);

// F_t: mean over tasks j < t of the drop from the best accuracy task j ever
// had while rows j..t-1 were recorded to its accuracy after task t. Rows
// before task j was first trained never enter the max. Requires t >= 2.
double forgetting(const Mat& matrix, int t);

// Long-term retention: weighted sum of final-row drops below each task's
// just-trained accuracy, earlier tasks weighted more. Non-negative; requires
// T >= 2.
double ltr(const Mat& matrix);

// LCA over a T x (beta+1) curve of b-shot accuracies a_{t,b,t}: the mean of
// the column means Z_b.
double lca(const Mat& bshot);

// Parses rows of whitespace- or comma-separated decimals in [0, 1]. Rows may
// either all carry T entries (zero-padded upper triangle) or row i may carry
// exactly i entries (bare lower triangle). Errors name the offending line.
Mat parse_matrix(const std::string& text);

// Emits the full square with 4-decimal entries, comma-separated, zero-padded
// upper triangle; parse(emit(m)) == m at that precision.
std::string emit_matrix(const Mat& matrix);

}  // namespace mdmt
