#include "mdmt/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mdmt/errors.hpp"

namespace mdmt {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

GradCheckReport grad_check(const std::function<double()>& value,
                           double* params, const double* analytic, int count,
                           double h, int max_coords, Rng* rng) {
  if (h <= 0.0) throw ConfigError("grad_check: step must be positive");
  std::vector<int> coords;
  if (max_coords > 0 && count > max_coords && rng != nullptr) {
    coords = rng->sample_without_replacement(count, max_coords);
  } else {
    coords.resize(static_cast<std::size_t>(count));
    std::iota(coords.begin(), coords.end(), 0);
  }
  GradCheckReport report;
  for (int i : coords) {
    double saved = params[i];
    params[i] = saved + h;
    double plus = value();
    params[i] = saved - h;
    double minus = value();
    params[i] = saved;
    double numeric = (plus - minus) / (2.0 * h);
    report.max_rel_err =
        std::max(report.max_rel_err, relative_error(analytic[i], numeric));
    ++report.coords_checked;
  }
  return report;
}

}  // namespace mdmt
