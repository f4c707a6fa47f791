#pragma once

namespace cosadmit::numerics {

struct LatticeSumResult {
  double value = 0.0;
  int truncation_radius = 0;
  double remainder_bound = 0.0;
};

/// S_{d,p} = sum over nonzero m in Z^d of |m|^-p (Euclidean norm), p > d.
///
/// Evaluated through the Mellin transform of the d-th power of the Jacobi
/// theta function, split at t = 1 and folded with the theta inversion
/// formula, which leaves two exponentially convergent integrals. Here
/// `truncation_radius` is the number of theta-series terms kept and
/// `remainder_bound` bounds the quadrature and series truncation error.
/// Throws DomainError for p <= d and AccuracyError if the bound exceeds
/// target_rel_err * value.
LatticeSumResult lattice_sum(int d, double p, double target_rel_err = 1e-12);

/// Direct partial sum over the lattice points with sup-norm at most `radius`,
/// enumerated shell by shell. `remainder_bound` is a rigorous upper bound on
/// the omitted terms, obtained by comparing each omitted |m|^-p with the
/// integral of |x|^-p over the unit cell around m.
LatticeSumResult lattice_partial_sum(int d, double p, int radius);

}  // namespace cosadmit::numerics
