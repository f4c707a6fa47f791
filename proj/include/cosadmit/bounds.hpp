#pragma once

#include <optional>

#include "cosadmit/density.hpp"

namespace cosadmit {

struct BoundMoments {
  double full = 0.0;        // int |x|^p f^2
  double tail = 0.0;        // int_{|x|>L} |x|^p f^2
  double tail_plain = 0.0;  // int_{|x|>L} f^2
};

/// Moment-based upper bounds on B(L) for one density.
///   main      = 2 zeta(p) (L^-p tail + tail_plain)
///   tail_rate = 4 zeta(p) L^-p tail
///   uniform   = 4 zeta(p) L^-p full
///   corollary = 4 zeta(p) M m L^-p with m = int |x|^p f, when M and m exist.
struct BoundReport {
  double L = 0.0;
  double p = 0.0;
  double zeta_p = 0.0;
  double main_bound = 0.0;
  double tail_rate_bound = 0.0;
  double uniform_bound = 0.0;
  std::optional<double> corollary_bound;
  BoundMoments moments;
  std::optional<double> sup_bound;      // M
  std::optional<double> abs_moment;     // m
};

/// `quad_tol` is the absolute target for full moments and the relative target
/// for tail moments. Throws DomainError for p <= 1 or L <= 0, DivergenceError
/// for p >= p_max.
BoundReport bound_report(const DensitySpec& f, double L, double p, double quad_tol = 1e-11);

/// C_{d,p} = 2^{d-1} (1 + d^{p/2}) S_{d,p}.
double cos_bound_constant(int d, double p);

/// Bound on B_d(L) over the complement of the cube [-L, L]^d.
///
/// The weighted moment over the cube complement is replaced by the upper
/// estimate c sum_i int_{complement} |x_i|^p f^2 with c = max(1, d^{p/2-1}),
/// which factorises over axes.
struct DimBoundReport {
  int dimension = 1;
  double L = 0.0;
  double p = 0.0;
  double lattice_sum = 0.0;      // S_{d,p}
  double constant = 0.0;         // C_{d,p}
  double norm_factor = 1.0;      // c
  double tail_moment_upper = 0.0;
  double full_moment_upper = 0.0;
  bool moment_is_upper_estimate = true;
  double bound = 0.0;            // C L^-p tail_moment_upper
  double uniform_bound = 0.0;    // C L^-p full_moment_upper
};

/// Throws DomainError for p <= d, DivergenceError when a factor's weighted
/// moment diverges, UnsupportedError for d > 3.
DimBoundReport bound_report_d(const ProductDensitySpec& f, double L, double p, double quad_tol = 1e-11);

}  // namespace cosadmit
