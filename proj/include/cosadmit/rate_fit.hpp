#pragma once

#include <utility>
#include <vector>

namespace cosadmit {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (ln L, ln B)
};

/// Least-squares line through (ln L, ln B). Needs >= 3 points with L strictly
/// increasing and every B > 0, otherwise ValidationError.
RateFit fit_rate(const std::vector<std::pair<double, double>>& samples);

}  // namespace cosadmit
