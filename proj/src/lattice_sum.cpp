#include "cosadmit/lattice_sum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cosadmit/errors.hpp"
#include "cosadmit/quadrature.hpp"
#include "cosadmit/summation.hpp"

namespace cosadmit::numerics {
namespace {

void check_args(int d, double p) {
  if (d < 1) throw DomainError("lattice dimension must be >= 1");
  if (!std::isfinite(p)) throw DomainError("p must be finite");
  if (p <= d) throw DomainError("lattice sum diverges for p <= d");
}

constexpr double kThetaRelCut = 1e-20;

// theta(t) - 1 = 2 sum_{n>=1} exp(-pi n^2 t), for t >= 1.
double theta_minus_one(double t, int* terms_used = nullptr) {
  double s = 0.0;
  const double first = std::exp(-std::numbers::pi * t);
  if (first == 0.0) {
    if (terms_used != nullptr) *terms_used = 0;
    return 0.0;
  }
  int n = 1;
  for (;; ++n) {
    const double term = std::exp(-std::numbers::pi * n * n * t);
    s += term;
    if (term <= kThetaRelCut * first) break;
  }
  if (terms_used != nullptr) *terms_used = n;
  return 2.0 * s;
}

}  // namespace

LatticeSumResult lattice_sum(int d, double p, double target_rel_err) {
  check_args(d, p);
  if (!(target_rel_err > 0.0)) throw DomainError("target_rel_err must be > 0");
  const double s = 0.5 * p;
  const double half_d = 0.5 * d;

  // pi^-s Gamma(s) S(s) = int_1^inf (t^{s-1} + t^{d/2-s-1}) (theta^d - 1) dt
  //                       + 1/(s - d/2) - 1/s
  auto moment = [&](double a) {
    Integrand g = [=](double t) {
      const double th = theta_minus_one(t);
      const double thd = std::expm1(d * std::log1p(th));
      return std::pow(t, a - 1.0) * thd;
    };
    return integrate(g, 1.0, INFINITY, QuadTolerance{1e-300, 1e-13, 2000});
  };
  const QuadResult upper = moment(s);
  const QuadResult lower = moment(half_d - s);
  CompensatedSum lambda;
  lambda.add(upper.value);
  lambda.add(lower.value);
  lambda.add(1.0 / (s - half_d));
  lambda.add(-1.0 / s);
  const double scale = std::exp(s * std::log(std::numbers::pi) - std::lgamma(s));
  const double value = scale * lambda.value();

  int terms = 0;
  theta_minus_one(1.0, &terms);
  const double bound =
      scale * (upper.abs_error_estimate + lower.abs_error_estimate) + 8e-16 * std::abs(value);
  if (!(value > 0.0) || bound > target_rel_err * value) {
    std::ostringstream os;
    os << "lattice_sum(" << d << ", " << p << ") error bound " << bound
       << " exceeds the relative target " << target_rel_err;
    throw AccuracyError(os.str(), value, bound);
  }
  return {value, terms, bound};
}

LatticeSumResult lattice_partial_sum(int d, double p, int radius) {
  check_args(d, p);
  if (radius < 1) throw DomainError("radius must be >= 1");
  // Odometer over [-radius, radius]^d.
  std::vector<int> m(static_cast<std::size_t>(d), -radius);
  CompensatedSum sum;
  for (;;) {
    long long norm2 = 0;
    for (int c : m) norm2 += static_cast<long long>(c) * c;
    if (norm2 != 0) sum.add(std::pow(static_cast<double>(norm2), -0.5 * p));
    std::size_t i = 0;
    while (i < m.size() && m[i] == radius) {
      m[i] = -radius;
      ++i;
    }
    if (i == m.size()) break;
    ++m[i];
  }
  // Each omitted m has |m| >= R + 1; for x in its unit cell |x| <= |m| + sqrt(d)/2,
  // so |m|^-p <= (1 + sqrt(d) / (2(R+1)))^p * int_cell |x|^-p. All omitted cells
  // lie outside the ball of radius R + 1/2.
  const double r = radius;
  const double inflate = std::pow(1.0 + std::sqrt(static_cast<double>(d)) / (2.0 * (r + 1.0)), p);
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  const double tail = sphere * std::pow(r + 0.5, d - p) / (p - d);
  return {sum.value(), radius, inflate * tail};
}

}  // namespace cosadmit::numerics
