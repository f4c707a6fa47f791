#include "cosadmit/rate_fit.hpp"

#include <algorithm>
#include <cmath>

#include "cosadmit/errors.hpp"

namespace cosadmit {

RateFit fit_rate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw ValidationError("a rate fit needs at least 3 points");
  RateFit r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [L, B] = samples[i];
    if (!std::isfinite(L) || !(L > 0.0)) throw ValidationError("rate fit: L must be finite and > 0");
    if (i > 0 && !(L > samples[i - 1].first)) throw ValidationError("rate fit: L must be strictly increasing");
    if (!std::isfinite(B) || !(B > 0.0)) {
      throw ValidationError("rate fit: degenerate data, B must be > 0 to take logs");
    }
    r.points.emplace_back(std::log(L), std::log(B));
  }
  const double n = static_cast<double>(r.points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : r.points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : r.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (syy == 0.0) {
    r.r_squared = 1.0;
  } else {
    double sse = 0.0;
    for (const auto& [x, y] : r.points) {
      const double e = y - (r.intercept + r.slope * x);
      sse += e * e;
    }
    r.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  }
  return r;
}

}  // namespace cosadmit
