#pragma once

#include <vector>

#include "cosadmit/density.hpp"

namespace cosadmit {

/// Tail cosine integrals T_k = int_{|x|>L} f(x) cos(k pi (x + L) / (2L)) dx.
///
/// The tail is cut into blocks I_j = [(2j-1)L, (2j+1)L], j != 0. On block j
/// the kernel equals (-1)^{kj} cos(k pi (t + L) / (2L)) with t = x - 2jL, so
/// all blocks fold onto [-L, L]: even k see G_even(t) = sum_j f(t + 2jL) and
/// odd k see G_odd(t) = sum_j (-1)^j f(t + 2jL). Blocks are summed explicitly
/// until the remaining L2 mass is negligible or a block cap is reached; the
/// rest of the block series is added with an Euler-Maclaurin (even) or
/// Euler-Boole (alternating) remainder built from the distribution function.
struct TailCosineIntegrals {
  double half_width = 0.0;
  std::vector<double> values;     // T_0 .. T_{k_max}
  double coeff_error = 0.0;       // bound on |error| of every T_k
  /// sum over all k >= 0 of T_k^2 / L, from Parseval on the folded functions.
  double parseval_total = 0.0;
  /// sum over all k of A_k^2 L, i.e. the same for f restricted to [-L, L].
  double inner_parseval = 0.0;
  /// sum over all k of A_k T_k, the cross term between inner and tail parts.
  double cross_parseval = 0.0;
  int blocks_used = 0;
  double tail_mass = 0.0;         // P(|X| > L) from the distribution function
};

TailCosineIntegrals tail_cosine_integrals(const DensitySpec& f, double L, int k_max,
                                          unsigned workers = 1);

struct TailEnergyResult {
  double value = 0.0;           // sum_{k <= k_max} T_k^2 / L
  int k_max = 0;
  double k_tail_estimate = 0.0; // omitted k > k_max contribution
  double quad_error = 0.0;      // accumulated numerical error bound on value
  int blocks_used = 0;
  double parseval_total = 0.0;  // all-mode total the partial sum converges to
  bool stagnated = false;       // last 10% of modes added < 1e-6 of the sum
};

/// Brute-force tail cosine energy B(L) truncated at k_max (>= 16).
TailEnergyResult brute_force_B(const DensitySpec& f, double L, int k_max, unsigned workers = 1);

/// B_d over the complement of the box prod [-L_i, L_i] for a product density,
/// d <= 3, normalised by 1 / prod L_i. The complement integral of each mode is
/// prod(inner_i + tail_i) - prod(inner_i), expanded over non-empty subsets of
/// axes so no cancellation occurs.
TailEnergyResult brute_force_Bd(const ProductDensitySpec& f, const std::vector<double>& L,
                                int k_max_per_axis, unsigned workers = 1);

/// Mode energy of a single block I_j, used to check blockwise Parseval.
struct BlockEnergy {
  double mode_energy = 0.0;  // sum_{k <= k_max} (1/L) |int_{I_j} f cos|^2
  double l2_mass = 0.0;      // int_{I_j} f^2
  double mass = 0.0;         // int_{I_j} f
};

BlockEnergy block_energy(const DensitySpec& f, double L, int j, int k_max);

}  // namespace cosadmit
