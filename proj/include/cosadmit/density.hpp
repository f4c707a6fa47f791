#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cosadmit/quadrature.hpp"

namespace cosadmit {

enum class DensityFamily { normal, laplace, uniform, cauchy, student_t };

struct Interval {
  double lo;
  double hi;
};

/// A symmetric probability density with closed-form pdf, characteristic
/// function and distribution function, plus the tail metadata that decides
/// which weighted moments exist. Immutable after construction.
class DensitySpec {
 public:
  static DensitySpec normal(double sigma = 1.0);
  static DensitySpec laplace(double scale = 1.0);
  /// Uniform on [-half_width, half_width].
  static DensitySpec uniform(double half_width = 1.0);
  static DensitySpec cauchy(double scale = 1.0);
  /// Standard Student-t with nu degrees of freedom.
  static DensitySpec student_t(double nu);

  DensityFamily family() const noexcept { return family_; }
  /// Canonical identifier, parseable by parse_density (e.g. "student_t(nu=0.4)").
  const std::string& name() const noexcept { return name_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }

  double pdf(double x) const;
  double pdf_derivative(double x) const;
  /// phi(t) = E[exp(i t X)].
  std::complex<double> cf(double t) const;
  double cdf(double x) const;
  /// Survival function P(X > x).
  double sf(double x) const;
  /// P(|X| > L).
  double tail_mass(double L) const;

  Interval support() const noexcept { return support_; }
  bool is_even() const noexcept { return true; }
  /// M with 0 <= pdf <= M.
  std::optional<double> sup_bound() const noexcept { return sup_bound_; }
  /// beta with pdf(x) ~ C |x|^-beta; empty for light tails.
  std::optional<double> tail_exponent() const noexcept { return tail_exponent_; }
  /// Supremum of p with int |x|^p pdf^2 < inf; empty when every p works.
  std::optional<double> p_max() const noexcept { return p_max_; }
  /// Human-readable origin of p_max, e.g. "2*nu+1 for student_t(nu=0.4)".
  std::string p_max_reason() const;
  /// Characteristic width of the density, used to size quadrature panels.
  double length_scale() const noexcept { return length_scale_; }
  /// Points where the pdf or its derivative jumps.
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

 private:
  DensitySpec() = default;
  void finish();

  DensityFamily family_ = DensityFamily::normal;
  std::string name_;
  std::map<std::string, double> params_;
  Interval support_{-INFINITY, INFINITY};
  std::optional<double> sup_bound_;
  std::optional<double> tail_exponent_;
  std::optional<double> p_max_;
  double length_scale_ = 1.0;
  std::vector<double> breakpoints_;
  double param_ = 1.0;  // primary parameter: sigma, scale, a or nu
  double norm_ = 1.0;   // pdf normalising constant (Student-t)
};

/// Densities shipped with the library: normal, laplace, uniform, cauchy and
/// Student-t with nu in {0.4, 0.5, 1, 3}.
std::vector<DensitySpec> catalog();

/// Parses "name" or "name(key=value,...)"; a single bare value binds to the
/// family's primary parameter, so "student_t(0.4)" also works.
/// Throws ValidationError on unknown names, keys or malformed values.
DensitySpec parse_density(std::string_view text);

/// Student-t characteristic function
///   K_{nu/2}(sqrt(nu)|t|) (sqrt(nu)|t|)^{nu/2} / (Gamma(nu/2) 2^{nu/2-1}).
double student_t_cf(double nu, double t);

inline constexpr numerics::QuadTolerance kMomentTolerance{1e-11, 0.0, 4000};
inline constexpr numerics::QuadTolerance kTailMomentTolerance{0.0, 1e-11, 4000};

/// int_R |x|^p pdf(x)^2 dx. Throws DivergenceError when p >= p_max.
double weighted_moment(const DensitySpec& f, double p, numerics::QuadTolerance tol = kMomentTolerance);

/// int_{|x|>L} |x|^p pdf(x)^2 dx; L = 0 gives the full moment.
double tail_weighted_moment(const DensitySpec& f, double p, double L,
                            numerics::QuadTolerance tol = kTailMomentTolerance);

/// int_R |x|^q pdf(x) dx. Throws DivergenceError unless q < tail_exponent - 1.
double first_abs_moment(const DensitySpec& f, double q, numerics::QuadTolerance tol = kMomentTolerance);

/// Independent product of one-dimensional densities.
class ProductDensitySpec {
 public:
  explicit ProductDensitySpec(std::vector<DensitySpec> factors);

  int dimension() const noexcept { return static_cast<int>(factors_.size()); }
  const std::vector<DensitySpec>& factors() const noexcept { return factors_; }
  std::string name() const;

  double pdf(std::span<const double> x) const;
  std::complex<double> cf(std::span<const double> omega) const;

  /// Exact supremum of p with int_{R^d} |x|^p f^2 < inf: the smallest
  /// per-factor p_max. Along a coordinate axis the integrand behaves like the
  /// one-dimensional |x_i|^p f_i^2, and away from the axes the decay is faster.
  std::optional<double> p_max() const;

 private:
  std::vector<DensitySpec> factors_;
};

}  // namespace cosadmit
