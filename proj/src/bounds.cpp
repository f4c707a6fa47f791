#include "cosadmit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cosadmit/errors.hpp"
#include "cosadmit/lattice_sum.hpp"
#include "cosadmit/quadrature.hpp"
#include "cosadmit/special_functions.hpp"

namespace cosadmit {

namespace {

numerics::QuadTolerance full_tol(double quad_tol) { return {quad_tol, 0.0, 4000}; }
numerics::QuadTolerance tail_tol(double quad_tol) { return {0.0, quad_tol, 4000}; }

void check_quad_tol(double quad_tol) {
  if (!std::isfinite(quad_tol) || !(quad_tol > 0.0)) throw DomainError("quadrature target must be finite and > 0");
}

}  // namespace

BoundReport bound_report(const DensitySpec& f, double L, double p, double quad_tol) {
  check_quad_tol(quad_tol);
  if (!std::isfinite(p) || !(p > 1.0)) throw DomainError("the moment-based bound requires p > 1");
  if (!std::isfinite(L) || !(L > 0.0)) throw DomainError("half-width L must be finite and > 0");
  BoundReport r;
  r.L = L;
  r.p = p;
  r.zeta_p = numerics::zeta(p);
  r.moments.full = weighted_moment(f, p, full_tol(quad_tol));  // throws DivergenceError past p_max
  r.moments.tail = tail_weighted_moment(f, p, L, tail_tol(quad_tol));
  r.moments.tail_plain = tail_weighted_moment(f, 0.0, L, tail_tol(quad_tol));
  const double lp = std::pow(L, -p);
  r.main_bound = 2.0 * r.zeta_p * (lp * r.moments.tail + r.moments.tail_plain);
  r.tail_rate_bound = 4.0 * r.zeta_p * lp * r.moments.tail;
  r.uniform_bound = 4.0 * r.zeta_p * lp * r.moments.full;
  r.sup_bound = f.sup_bound();
  try {
    r.abs_moment = first_abs_moment(f, p, full_tol(quad_tol));
  } catch (const DivergenceError&) {
    r.abs_moment.reset();
  }
  if (r.sup_bound && r.abs_moment) {
    r.corollary_bound = 4.0 * r.zeta_p * *r.sup_bound * *r.abs_moment * lp;
  }
  return r;
}

double cos_bound_constant(int d, double p) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  const double s = numerics::lattice_sum(d, p).value;
  return std::ldexp(1.0, d - 1) * (1.0 + std::pow(d, 0.5 * p)) * s;
}

DimBoundReport bound_report_d(const ProductDensitySpec& f, double L, double p, double quad_tol) {
  check_quad_tol(quad_tol);
  const int d = f.dimension();
  if (d > 3) throw UnsupportedError("d-dimensional bounds support dimensions 1 to 3");
  if (!std::isfinite(p) || !(p > d)) {
    throw DomainError("the d-dimensional bound requires p > d (d = " + std::to_string(d) + ")");
  }
  if (!std::isfinite(L) || !(L > 0.0)) throw DomainError("half-width L must be finite and > 0");

  // Per-axis pieces: W = int |x|^p f^2, Q = int f^2, with tails beyond L.
  const auto n = static_cast<std::size_t>(d);
  std::vector<double> w(n), w_tail(n), q(n), q_tail(n);
  for (std::size_t i = 0; i < n; ++i) {
    const DensitySpec& fi = f.factors()[i];
    w[i] = weighted_moment(fi, p, full_tol(quad_tol));
    w_tail[i] = tail_weighted_moment(fi, p, L, tail_tol(quad_tol));
    q[i] = weighted_moment(fi, 0.0, full_tol(quad_tol));
    q_tail[i] = tail_weighted_moment(fi, 0.0, L, tail_tol(quad_tol));
  }

  DimBoundReport r;
  r.dimension = d;
  r.L = L;
  r.p = p;
  r.lattice_sum = numerics::lattice_sum(d, p).value;
  r.constant = std::ldexp(1.0, d - 1) * (1.0 + std::pow(d, 0.5 * p)) * r.lattice_sum;
  r.norm_factor = std::max(1.0, std::pow(d, 0.5 * p - 1.0));
  r.moment_is_upper_estimate = d > 1;

  double tail_sum = 0.0;
  double full_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // int over the cube complement of |x_i|^p prod f_j^2
    //   = W_i prod Q_j - W_i^in prod Q_j^in
    //   = W_i^tail prod Q_j + W_i^in (prod Q_j - prod Q_j^in),
    // with the last difference expanded one axis at a time so it stays positive.
    double others_full = 1.0;
    double others_diff = 0.0;
    double others_in = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q_in = q[j] - q_tail[j];
      others_diff = others_diff * q[j] + others_in * q_tail[j];
      others_in *= q_in;
      others_full *= q[j];
    }
    tail_sum += w_tail[i] * others_full + (w[i] - w_tail[i]) * others_diff;
    full_sum += w[i] * others_full;
  }
  r.tail_moment_upper = r.norm_factor * tail_sum;
  r.full_moment_upper = r.norm_factor * full_sum;
  const double lp = std::pow(L, -p);
  r.bound = r.constant * lp * r.tail_moment_upper;
  r.uniform_bound = r.constant * lp * r.full_moment_upper;
  return r;
}

}  // namespace cosadmit
