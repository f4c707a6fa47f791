#pragma once

namespace cosadmit::numerics {

/// Riemann zeta for real p > 1: direct summation of the first 10^5 terms plus
/// an Euler-Maclaurin tail through the B4 term. Relative error <= 1e-12 for
/// p >= 1.1. Throws DomainError for p <= 1 or non-finite p.
double zeta(double p);

/// Modified Bessel function of the second kind K_alpha(x), alpha >= 0, x > 0,
/// from K_alpha(x) = int_0^inf exp(-x cosh t) cosh(alpha t) dt.
/// Throws OverflowError when the result is not representable as a double.
double bessel_k(double alpha, double x);

/// Natural log of K_alpha(x); finite wherever the integral representation is.
double log_bessel_k(double alpha, double x);

/// Exponentially scaled e^x K_alpha(x).
double bessel_k_scaled(double alpha, double x);

}  // namespace cosadmit::numerics
