#pragma once

#include <functional>

#include "mdmt/rng.hpp"

namespace mdmt {

struct GradCheckReport {
  double max_rel_err = 0.0;
  int coords_checked = 0;
};

// |a - b| / max(1, |a|, |b|).
double relative_error(double a, double b);

// Central-difference check of an analytic gradient. `value` recomputes the
// scalar loss from the current contents of `params`; each coordinate is
// perturbed by +-h and restored. All `count` coordinates are checked unless
// max_coords > 0, in which case a random subset of max_coords coordinates is
// drawn from `rng`.
GradCheckReport grad_check(const std::function<double()>& value,
                           double* params, const double* analytic, int count,
                           double h, int max_coords = 0, Rng* rng = nullptr);

}  // namespace mdmt
