#include "cosadmit/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cosadmit/errors.hpp"
#include "cosadmit/summation.hpp"

namespace cosadmit::numerics {
namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

// log cosh(y) for y >= 0 without overflow.
double log_cosh(double y) {
  return y + std::log1p(std::exp(-2.0 * y)) - std::numbers::ln2;
}

// Log of the scaled integrand exp(-x (cosh u - 1)) cosh(alpha u).
double log_integrand(double alpha, double x, double u) {
  const double s = std::sinh(0.5 * u);
  return -2.0 * x * s * s + log_cosh(alpha * u);
}

// log of e^x K_alpha(x) by the trapezoidal rule on [0, inf). The integrand is
// even in u and decays double-exponentially, so the rule converges
// geometrically as the step is halved.
double log_scaled_k(double alpha, double x) {
  const double h0 = std::min(0.5, 0.5 / std::sqrt(std::max(x, 1.0)));

  // Level 0: march outward until the integrand is negligible past its peak.
  std::vector<double> level0;
  double ref = log_integrand(alpha, x, 0.0);
  level0.push_back(ref);
  constexpr double kCut = 50.0;
  constexpr int kMaxPoints = 200000;
  for (int j = 1; j < kMaxPoints; ++j) {
    const double v = log_integrand(alpha, x, j * h0);
    level0.push_back(v);
    const bool past_peak = v < level0[level0.size() - 2];
    if (v > ref) ref = v;
    if (past_peak && v < ref - kCut) break;
  }
  const double u_max = h0 * static_cast<double>(level0.size() - 1);

  CompensatedSum base;
  base.add(0.5 * std::exp(level0[0] - ref));
  for (std::size_t j = 1; j < level0.size(); ++j) base.add(std::exp(level0[j] - ref));
  double sum = base.value();  // sum of f/h at the current step, scaled by e^-ref
  double h = h0;
  double estimate = h * sum;

  for (int level = 1; level <= 24; ++level) {
    const double hn = 0.5 * h;
    CompensatedSum mids;
    for (long i = 0;; ++i) {
      const double u = hn + static_cast<double>(i) * h;
      if (u >= u_max) break;
      mids.add(std::exp(log_integrand(alpha, x, u) - ref));
    }
    sum += mids.value();
    h = hn;
    const double next = h * sum;
    const double change = std::abs(next - estimate);
    estimate = next;
    if (level >= 2 && change <= 1e-15 * estimate) break;
  }
  return ref + std::log(estimate);
}

void check_bessel_args(double alpha, double x) {
  require_finite(alpha, "alpha");
  require_finite(x, "x");
  if (!(x > 0.0)) throw DomainError("bessel_k requires x > 0");
  if (alpha < 0.0) throw DomainError("bessel_k requires alpha >= 0");
}

}  // namespace

double zeta(double p) {
  require_finite(p, "p");
  if (p <= 1.0) throw DomainError("zeta diverges for p <= 1");
  constexpr int kTerms = 100000;
  // Small terms first.
  CompensatedSum s;
  for (int j = kTerms - 1; j >= 1; --j) s.add(std::pow(static_cast<double>(j), -p));
  const double n = kTerms;
  const double np = std::pow(n, -p);
  // Euler-Maclaurin for sum_{j >= n} j^-p.
  s.add(n * np / (p - 1.0));
  s.add(0.5 * np);
  s.add(p * np / n / 12.0);
  s.add(-p * (p + 1.0) * (p + 2.0) * np / (n * n * n) / 720.0);
  return s.value();
}

double log_bessel_k(double alpha, double x) {
  check_bessel_args(alpha, x);
  return log_scaled_k(alpha, x) - x;
}

double bessel_k_scaled(double alpha, double x) {
  check_bessel_args(alpha, x);
  const double lk = log_scaled_k(alpha, x);
  if (lk > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("scaled bessel_k overflows", lk);
  }
  return std::exp(lk);
}

double bessel_k(double alpha, double x) {
  const double lk = log_bessel_k(alpha, x);
  if (lk > std::log(std::numeric_limits<double>::max())) {
    std::ostringstream os;
    os << "bessel_k(" << alpha << ", " << x << ") overflows (log magnitude " << lk << ")";
    throw OverflowError(os.str(), lk);
  }
  if (lk < std::log(std::numeric_limits<double>::min())) {
    std::ostringstream os;
    os << "bessel_k(" << alpha << ", " << x << ") underflows (log magnitude " << lk << ")";
    throw OverflowError(os.str(), lk);
  }
  return std::exp(lk);
}

}  // namespace cosadmit::numerics
