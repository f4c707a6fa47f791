#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cosadmit/density.hpp"

namespace cosadmit {

/// Truncated Fourier-cosine series on the symmetric interval [-L, L]:
///
///   f_N(x) = sum'_{k<N} F_k cos(k pi (x + L) / (2L)),
///
/// where the primed sum gives the k = 0 term weight 1/2. Coefficients are
/// stored as computed (F_0 unhalved); the half weight is applied when the
/// series is evaluated or integrated.
class CosExpansion {
 public:
  CosExpansion(double half_width, std::vector<double> coeffs, std::string source);

  double half_width() const noexcept { return half_width_; }
  int mode_count() const noexcept { return static_cast<int>(coeffs_.size()); }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  const std::string& source() const noexcept { return source_; }

  /// Value at x in [-L, L]. Throws DomainError outside the interval.
  double evaluate(double x) const;

  /// Values at many points, all inside [-L, L]. Uses an angle-addition
  /// recurrence per point instead of one cosine call per mode.
  std::vector<double> evaluate_many(std::span<const double> xs) const;

  /// Integral of the series over [-L, L], which is L * F_0.
  double mass() const noexcept;

  /// The first n modes of this expansion.
  CosExpansion truncated(int n) const;

 private:
  double half_width_;
  std::vector<double> coeffs_;
  std::string source_;
};

struct ErrorReport {
  double l2_error = 0.0;
  double sup_error = 0.0;
  int grid_points = 0;
};

/// A_k = (1/L) int_{-L}^{L} f(x) cos(k pi (x + L) / (2L)) dx by adaptive quadrature.
double exact_coeff_A(const DensitySpec& f, double L, int k);

/// A_0..A_{count-1} by one composite Gauss-Legendre pass whose panels resolve
/// a quarter period of the highest mode.
std::vector<double> exact_coeffs_A(const DensitySpec& f, double L, int count);

/// F_k = (1/L) Re[phi(k pi / (2L)) exp(i k pi / 2)], the characteristic-function
/// approximation of A_k.
double cf_coeff_F(const DensitySpec& f, double L, int k);

CosExpansion build_expansion(const DensitySpec& f, double L, int N);

/// phi_1(omega) = int_{-L}^{L} exp(i omega x) f(x) dx.
std::complex<double> truncated_cf(const DensitySpec& f, double L, double omega);

/// L2 error on [-L, L] by a composite rule with at least four panels per
/// half period of the highest mode, and the sup error on a uniform grid of
/// `grid_points` points including both ends.
ErrorReport measure_error(const DensitySpec& f, const CosExpansion& e, int grid_points,
                          unsigned workers = 1);

/// CSV with header "k,F_k" and one row per coefficient (17 significant digits).
void write_coefficients_csv(std::ostream& os, const CosExpansion& e);

}  // namespace cosadmit
