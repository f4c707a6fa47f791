#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cosadmit::numerics {

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int subdivisions = 1;
};

/// Convergence is declared once the summed error estimate is at most
/// max(abs, rel * |value|). Setting abs = 0 makes the target purely relative,
/// which is what tail integrals of light-tailed densities need.
struct QuadTolerance {
  double abs = 1e-11;
  double rel = 0.0;
  int max_subdivisions = 4000;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod integration of f over [a, b].
/// Either end may be infinite; infinite ends are mapped to a finite interval
/// by x = c +/- (1 - t) / t. Throws AccuracyError when the subdivision budget
/// is exhausted and DomainError when f returns a non-finite value.
QuadResult integrate(const Integrand& f, double a, double b, QuadTolerance tol = {});

/// As above, with the domain pre-split at `breakpoints` (points outside
/// (a, b) are ignored). Breakpoints let callers align panels with kinks,
/// discontinuities or oscillation periods.
QuadResult integrate(const Integrand& f, double a, double b,
                     std::span<const double> breakpoints, QuadTolerance tol = {});

/// Nodes and weights of a fixed composite rule.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureGrid gauss_legendre(int n);

/// Composite Gauss-Legendre rule with `order` points on every panel
/// [edges[i], edges[i+1]]. `edges` must be sorted ascending.
QuadratureGrid composite_gauss_legendre(std::span<const double> edges, int order);

/// Uniform panel edges on [a, b] with width at most `max_width`, merged with
/// any `extra` points strictly inside (a, b).
std::vector<double> panel_edges(double a, double b, double max_width,
                                std::span<const double> extra = {});

}  // namespace cosadmit::numerics
