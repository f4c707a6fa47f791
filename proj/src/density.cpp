#include "cosadmit/density.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "cosadmit/errors.hpp"
#include "cosadmit/special_functions.hpp"

namespace cosadmit {
namespace {

using numerics::integrate;
using numerics::Integrand;
using numerics::QuadTolerance;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw DomainError(std::string(what) + " must be finite and > 0, got " + format_number(v));
  }
}

double student_t_log_norm(double nu) {
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
}

// P(T > x) for x >= 0.
double student_t_upper(double nu, double x) {
  const double z = nu / (nu + x * x);
  return 0.5 * boost::math::ibeta(0.5 * nu, 0.5, z);
}

// |x|^p v^2 evaluated in log space so neither factor overflows on its own.
double weighted_square(double x, double p, double v) {
  if (v == 0.0) return 0.0;
  const double ax = std::abs(x);
  if (ax == 0.0) return p == 0.0 ? v * v : 0.0;
  return std::exp(p * std::log(ax) + 2.0 * std::log(v));
}

double weighted_first(double x, double q, double v) {
  if (v == 0.0) return 0.0;
  const double ax = std::abs(x);
  if (ax == 0.0) return q == 0.0 ? v : 0.0;
  return std::exp(q * std::log(ax) + std::log(v));
}

// Integral of g over [lo, hi] clipped to the support, split at the density's
// breakpoints and at zero.
double integrate_on_support(const DensitySpec& f, const Integrand& g, double lo, double hi,
                            QuadTolerance tol) {
  lo = std::max(lo, f.support().lo);
  hi = std::min(hi, f.support().hi);
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts = f.breakpoints();
  cuts.push_back(0.0);
  return integrate(g, lo, hi, cuts, tol).value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

DensitySpec DensitySpec::normal(double sigma) {
  require_positive(sigma, "normal sigma");
  DensitySpec d;
  d.family_ = DensityFamily::normal;
  d.params_ = {{"sigma", sigma}};
  d.param_ = sigma;
  d.sup_bound_ = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  d.length_scale_ = sigma;
  d.finish();
  return d;
}

DensitySpec DensitySpec::laplace(double scale) {
  require_positive(scale, "laplace scale");
  DensitySpec d;
  d.family_ = DensityFamily::laplace;
  d.params_ = {{"scale", scale}};
  d.param_ = scale;
  d.sup_bound_ = 0.5 / scale;
  d.length_scale_ = scale;
  d.breakpoints_ = {0.0};
  d.finish();
  return d;
}

DensitySpec DensitySpec::uniform(double half_width) {
  require_positive(half_width, "uniform half width");
  DensitySpec d;
  d.family_ = DensityFamily::uniform;
  d.params_ = {{"a", half_width}};
  d.param_ = half_width;
  d.support_ = {-half_width, half_width};
  d.sup_bound_ = 0.5 / half_width;
  d.length_scale_ = half_width;
  d.breakpoints_ = {-half_width, half_width};
  d.finish();
  return d;
}

DensitySpec DensitySpec::cauchy(double scale) {
  require_positive(scale, "cauchy scale");
  DensitySpec d;
  d.family_ = DensityFamily::cauchy;
  d.params_ = {{"scale", scale}};
  d.param_ = scale;
  d.sup_bound_ = 1.0 / (std::numbers::pi * scale);
  d.tail_exponent_ = 2.0;
  d.p_max_ = 3.0;
  d.length_scale_ = scale;
  d.finish();
  return d;
}

DensitySpec DensitySpec::student_t(double nu) {
  require_positive(nu, "student_t nu");
  DensitySpec d;
  d.family_ = DensityFamily::student_t;
  d.params_ = {{"nu", nu}};
  d.param_ = nu;
  d.norm_ = std::exp(student_t_log_norm(nu));
  d.sup_bound_ = d.norm_;
  d.tail_exponent_ = nu + 1.0;
  d.p_max_ = 2.0 * nu + 1.0;
  d.length_scale_ = std::min(1.0, std::sqrt(nu));
  d.finish();
  return d;
}

void DensitySpec::finish() {
  static constexpr std::pair<DensityFamily, const char*> kNames[] = {
      {DensityFamily::normal, "normal"},   {DensityFamily::laplace, "laplace"},
      {DensityFamily::uniform, "uniform"}, {DensityFamily::cauchy, "cauchy"},
      {DensityFamily::student_t, "student_t"}};
  for (const auto& [fam, n] : kNames) {
    if (fam == family_) name_ = n;
  }
  // Default parameters are left out of the canonical name.
  std::string args;
  for (const auto& [key, value] : params_) {
    if (family_ != DensityFamily::student_t && value == 1.0) continue;
    char probe[32];
    std::snprintf(probe, sizeof probe, "%.17g", value);
    // Prefer the shortest round-trip form.
    for (int prec = 1; prec <= 17; ++prec) {
      char shorter[32];
      std::snprintf(shorter, sizeof shorter, "%.*g", prec, value);
      if (std::strtod(shorter, nullptr) == value) {
        std::snprintf(probe, sizeof probe, "%s", shorter);
        break;
      }
    }
    args += (args.empty() ? "" : ",") + key + "=" + probe;
  }
  if (!args.empty()) name_ += "(" + args + ")";
}

std::string DensitySpec::p_max_reason() const {
  switch (family_) {
    case DensityFamily::student_t:
      return "2*nu+1 threshold for " + name_;
    case DensityFamily::cauchy:
      return "2*nu+1 threshold with nu=1 for " + name_;
    default:
      return "no threshold for " + name_;
  }
}

// ---------------------------------------------------------------------------
// Evaluation

double DensitySpec::pdf(double x) const {
  switch (family_) {
    case DensityFamily::normal: {
      const double s = param_;
      const double z = x / s;
      return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    case DensityFamily::laplace: {
      const double b = param_;
      return 0.5 / b * std::exp(-std::abs(x) / b);
    }
    case DensityFamily::uniform: {
      const double a = param_;
      return std::abs(x) <= a ? 0.5 / a : 0.0;
    }
    case DensityFamily::cauchy: {
      const double g = param_;
      const double z = x / g;
      return 1.0 / (std::numbers::pi * g * (1.0 + z * z));
    }
    case DensityFamily::student_t: {
      const double nu = param_;
      return norm_ * std::exp(-0.5 * (nu + 1.0) * std::log1p(x * x / nu));
    }
  }
  return 0.0;
}

double DensitySpec::pdf_derivative(double x) const {
  switch (family_) {
    case DensityFamily::normal: {
      const double s = param_;
      return -x / (s * s) * pdf(x);
    }
    case DensityFamily::laplace: {
      const double b = param_;
      if (x == 0.0) return 0.0;
      return (x > 0.0 ? -1.0 : 1.0) / b * pdf(x);
    }
    case DensityFamily::uniform:
      return 0.0;
    case DensityFamily::cauchy: {
      const double g = param_;
      return -2.0 * x / (g * g + x * x) * pdf(x);
    }
    case DensityFamily::student_t: {
      const double nu = param_;
      return -(nu + 1.0) * x / (nu + x * x) * pdf(x);
    }
  }
  return 0.0;
}

std::complex<double> DensitySpec::cf(double t) const {
  switch (family_) {
    case DensityFamily::normal: {
      const double s = param_;
      return std::exp(-0.5 * s * s * t * t);
    }
    case DensityFamily::laplace: {
      const double b = param_;
      return 1.0 / (1.0 + b * b * t * t);
    }
    case DensityFamily::uniform: {
      const double z = param_ * t;
      if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0 * (1.0 - z * z / 20.0);
      return std::sin(z) / z;
    }
    case DensityFamily::cauchy:
      return std::exp(-param_ * std::abs(t));
    case DensityFamily::student_t:
      return student_t_cf(param_, t);
  }
  return 0.0;
}

double DensitySpec::sf(double x) const {
  switch (family_) {
    case DensityFamily::normal:
      return 0.5 * std::erfc(x / (param_ * std::numbers::sqrt2));
    case DensityFamily::laplace: {
      const double b = param_;
      return x >= 0.0 ? 0.5 * std::exp(-x / b) : 1.0 - 0.5 * std::exp(x / b);
    }
    case DensityFamily::uniform: {
      const double a = param_;
      return std::clamp(0.5 * (a - x) / a, 0.0, 1.0);
    }
    case DensityFamily::cauchy: {
      const double g = param_;
      const double upper = std::atan2(g, std::abs(x)) / std::numbers::pi;
      return x >= 0.0 ? upper : 1.0 - upper;
    }
    case DensityFamily::student_t: {
      const double upper = student_t_upper(param_, std::abs(x));
      return x >= 0.0 ? upper : 1.0 - upper;
    }
  }
  return 0.0;
}

double DensitySpec::cdf(double x) const { return sf(-x); }

double DensitySpec::tail_mass(double L) const {
  if (L <= 0.0) return 1.0;
  return sf(L) + cdf(-L);
}

double student_t_cf(double nu, double t) {
  if (!std::isfinite(nu) || !(nu > 0.0)) throw DomainError("student_t_cf requires nu > 0");
  if (!std::isfinite(t)) throw DomainError("student_t_cf requires finite t");
  if (t == 0.0) return 1.0;
  const double z = std::sqrt(nu) * std::abs(t);
  const double a = 0.5 * nu;
  const double log_phi = numerics::log_bessel_k(a, z) + a * std::log(z) - std::lgamma(a) -
                         (a - 1.0) * std::numbers::ln2;
  return std::exp(log_phi);
}

// ---------------------------------------------------------------------------
// Catalog and parsing

std::vector<DensitySpec> catalog() {
  return {DensitySpec::normal(),         DensitySpec::laplace(),         DensitySpec::uniform(),
          DensitySpec::cauchy(),         DensitySpec::student_t(0.4),    DensitySpec::student_t(0.5),
          DensitySpec::student_t(1.0),   DensitySpec::student_t(3.0)};
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_real(const std::string& text, std::string_view context) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ValidationError("invalid number '" + text + "' in density '" + std::string(context) + "'");
  }
  return v;
}

}  // namespace

DensitySpec parse_density(std::string_view text) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  const std::string family = trim(s.substr(0, open));
  std::map<std::string, double> kv;
  std::optional<double> positional;
  if (open != std::string::npos) {
    if (s.back() != ')') throw ValidationError("missing ')' in density '" + s + "'");
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        if (positional || !kv.empty()) {
          throw ValidationError("only one positional parameter is allowed in '" + s + "'");
        }
        positional = parse_real(item, s);
      } else {
        const std::string key = trim(item.substr(0, eq));
        if (kv.count(key) != 0) throw ValidationError("duplicate parameter '" + key + "' in '" + s + "'");
        kv[key] = parse_real(trim(item.substr(eq + 1)), s);
      }
    }
  }

  auto take = [&](const std::string& primary, double fallback) {
    double v = fallback;
    if (positional) v = *positional;
    if (auto it = kv.find(primary); it != kv.end()) {
      v = it->second;
      kv.erase(it);
    }
    if (!kv.empty()) {
      throw ValidationError("unknown parameter '" + kv.begin()->first + "' for density '" + family +
                            "' (expected '" + primary + "')");
    }
    return v;
  };

  try {
    if (family == "normal" || family == "gaussian") return DensitySpec::normal(take("sigma", 1.0));
    if (family == "laplace") return DensitySpec::laplace(take("scale", 1.0));
    if (family == "uniform") return DensitySpec::uniform(take("a", 1.0));
    if (family == "cauchy") return DensitySpec::cauchy(take("scale", 1.0));
    if (family == "student_t" || family == "t") {
      if (!positional && kv.count("nu") == 0) {
        throw ValidationError("student_t requires a degrees-of-freedom parameter, e.g. student_t(nu=0.4)");
      }
      return DensitySpec::student_t(take("nu", 0.0));
    }
  } catch (const DomainError& e) {
    throw ValidationError(std::string("invalid density '") + s + "': " + e.what());
  }
  throw ValidationError("unknown density '" + family +
                        "' (known: normal, laplace, uniform, cauchy, student_t)");
}

// ---------------------------------------------------------------------------
// Moments

namespace {

void check_p(const DensitySpec& f, double p) {
  if (!std::isfinite(p) || p < 0.0) throw DomainError("moment order p must be finite and >= 0");
  if (f.p_max() && p >= *f.p_max()) {
    throw DivergenceError("p must be < " + format_number(*f.p_max()) + " (" + f.p_max_reason() +
                          "): the weighted moment int |x|^p f(x)^2 dx diverges for p = " +
                          format_number(p));
  }
}

}  // namespace

double weighted_moment(const DensitySpec& f, double p, QuadTolerance tol) {
  return tail_weighted_moment(f, p, 0.0, tol);
}

double tail_weighted_moment(const DensitySpec& f, double p, double L, QuadTolerance tol) {
  check_p(f, p);
  if (!std::isfinite(L) || L < 0.0) throw DomainError("tail cut-off L must be finite and >= 0");
  Integrand g = [&f, p](double x) { return weighted_square(x, p, f.pdf(x)); };
  const double right = integrate_on_support(f, g, L, INFINITY, tol);
  if (f.is_even()) return 2.0 * right;
  return right + integrate_on_support(f, g, -INFINITY, -L, tol);
}

double first_abs_moment(const DensitySpec& f, double q, QuadTolerance tol) {
  if (!std::isfinite(q) || q < 0.0) throw DomainError("moment order q must be finite and >= 0");
  if (f.tail_exponent() && q >= *f.tail_exponent() - 1.0) {
    throw DivergenceError("q must be < " + format_number(*f.tail_exponent() - 1.0) +
                          ": int |x|^q f(x) dx diverges for " + f.name());
  }
  Integrand g = [&f, q](double x) { return weighted_first(x, q, f.pdf(x)); };
  const double right = integrate_on_support(f, g, 0.0, INFINITY, tol);
  if (f.is_even()) return 2.0 * right;
  return right + integrate_on_support(f, g, -INFINITY, 0.0, tol);
}

// ---------------------------------------------------------------------------
// Products

ProductDensitySpec::ProductDensitySpec(std::vector<DensitySpec> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError("a product density needs at least one factor");
}

std::string ProductDensitySpec::name() const {
  std::string n;
  for (const auto& f : factors_) {
    if (!n.empty()) n += " x ";
    n += f.name();
  }
  return n;
}

double ProductDensitySpec::pdf(std::span<const double> x) const {
  if (x.size() != factors_.size()) throw DomainError("point dimension does not match the density");
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) v *= factors_[i].pdf(x[i]);
  return v;
}

std::complex<double> ProductDensitySpec::cf(std::span<const double> omega) const {
  if (omega.size() != factors_.size()) throw DomainError("frequency dimension does not match the density");
  std::complex<double> v = 1.0;
  for (std::size_t i = 0; i < omega.size(); ++i) v *= factors_[i].cf(omega[i]);
  return v;
}

std::optional<double> ProductDensitySpec::p_max() const {
  std::optional<double> m;
  for (const auto& f : factors_) {
    if (f.p_max()) m = m ? std::min(*m, *f.p_max()) : *f.p_max();
  }
  return m;
}

}  // namespace cosadmit
