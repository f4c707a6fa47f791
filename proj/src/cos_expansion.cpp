#include "cosadmit/cos_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "cosadmit/errors.hpp"
#include "cosadmit/parallel.hpp"
#include "cosadmit/quadrature.hpp"
#include "cosadmit/summation.hpp"

namespace cosadmit {
namespace {

using numerics::QuadTolerance;

constexpr int kPanelOrder = 10;
// Resynchronise the angle-addition recurrence with direct cos/sin calls this
// often so rounding growth stays bounded.
constexpr int kResync = 64;

void check_half_width(double L) {
  if (!std::isfinite(L) || !(L > 0.0)) throw DomainError("half-width L must be finite and > 0");
}

// Points inside (-L, L) where the density is not smooth.
std::vector<double> inner_breaks(const DensitySpec& f, double L) {
  std::vector<double> out;
  for (double b : f.breakpoints()) {
    if (b > -L && b < L) out.push_back(b);
  }
  return out;
}

// Accumulates sum_k c_k cos(k theta) for k < n with the k = 0 term halved.
double cosine_sum(std::span<const double> c, double theta) {
  CompensatedSum s;
  s.add(0.5 * c[0]);
  double ck = 1.0;
  double sk = 0.0;
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (k % kResync == 0) {
      ck = std::cos(static_cast<double>(k) * theta);
      sk = std::sin(static_cast<double>(k) * theta);
    } else {
      const double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
    }
    s.add(c[k] * ck);
  }
  return s.value();
}

}  // namespace

CosExpansion::CosExpansion(double half_width, std::vector<double> coeffs, std::string source)
    : half_width_(half_width), coeffs_(std::move(coeffs)), source_(std::move(source)) {
  check_half_width(half_width_);
  if (coeffs_.empty()) throw DomainError("an expansion needs at least one coefficient");
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw DomainError("expansion coefficients must be finite");
  }
}

double CosExpansion::evaluate(double x) const {
  const double L = half_width_;
  if (!(x >= -L && x <= L)) {
    throw DomainError("the cosine expansion is only defined on [-L, L]");
  }
  const double theta = std::numbers::pi * (x + L) / (2.0 * L);
  CompensatedSum s;
  s.add(0.5 * coeffs_[0]);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    s.add(coeffs_[k] * std::cos(static_cast<double>(k) * theta));
  }
  return s.value();
}

std::vector<double> CosExpansion::evaluate_many(std::span<const double> xs) const {
  const double L = half_width_;
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (!(x >= -L && x <= L)) throw DomainError("the cosine expansion is only defined on [-L, L]");
    out[i] = cosine_sum(coeffs_, std::numbers::pi * (x + L) / (2.0 * L));
  }
  return out;
}

double CosExpansion::mass() const noexcept { return half_width_ * coeffs_[0]; }

CosExpansion CosExpansion::truncated(int n) const {
  if (n < 1 || n > mode_count()) throw DomainError("truncation must keep between 1 and N modes");
  return CosExpansion(half_width_, std::vector<double>(coeffs_.begin(), coeffs_.begin() + n), source_);
}

double exact_coeff_A(const DensitySpec& f, double L, int k) {
  check_half_width(L);
  if (k < 0) throw DomainError("mode index k must be >= 0");
  const double lo = std::max(-L, f.support().lo);
  const double hi = std::min(L, f.support().hi);
  if (!(hi > lo)) return 0.0;
  const double omega = k * std::numbers::pi / (2.0 * L);
  const double width = std::min(k > 0 ? L / k : 2.0 * L, f.length_scale());
  const std::vector<double> edges = numerics::panel_edges(lo, hi, width, inner_breaks(f, L));
  numerics::Integrand g = [&](double x) { return f.pdf(x) * std::cos(omega * (x + L)); };
  const QuadTolerance tol{1e-11 * L, 0.0, static_cast<int>(edges.size()) + 4000};
  return numerics::integrate(g, lo, hi, edges, tol).value / L;
}

std::vector<double> exact_coeffs_A(const DensitySpec& f, double L, int count) {
  check_half_width(L);
  if (count < 1) throw DomainError("coefficient count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  const double lo = std::max(-L, f.support().lo);
  const double hi = std::min(L, f.support().hi);
  if (!(hi > lo)) return out;
  const double width = std::min({L / std::max(count - 1, 1), 0.5 * f.length_scale(), 0.25 * L});
  const std::vector<double> edges = numerics::panel_edges(lo, hi, width, inner_breaks(f, L));
  const auto grid = numerics::composite_gauss_legendre(edges, kPanelOrder);
  const std::size_t n = grid.nodes.size();
  std::vector<double> weighted(n);
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    weighted[i] = grid.weights[i] * f.pdf(grid.nodes[i]);
    theta[i] = std::numbers::pi * (grid.nodes[i] + L) / (2.0 * L);
  }
  std::vector<double> c1(n);
  std::vector<double> s1(n);
  for (std::size_t i = 0; i < n; ++i) {
    c1[i] = std::cos(theta[i]);
    s1[i] = std::sin(theta[i]);
  }
  std::vector<double> ck(n, 1.0);
  std::vector<double> sk(n, 0.0);
  std::vector<double> terms(n);
  for (int k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (k % kResync == 0) {
        ck[i] = std::cos(k * theta[i]);
        sk[i] = std::sin(k * theta[i]);
      } else {
        const double cn = ck[i] * c1[i] - sk[i] * s1[i];
        sk[i] = sk[i] * c1[i] + ck[i] * s1[i];
        ck[i] = cn;
      }
      terms[i] = weighted[i] * ck[i];
    }
    out[static_cast<std::size_t>(k)] = pairwise_sum(terms) / L;
  }
  return out;
}

double cf_coeff_F(const DensitySpec& f, double L, int k) {
  check_half_width(L);
  if (k < 0) throw DomainError("mode index k must be >= 0");
  const std::complex<double> phi = f.cf(k * std::numbers::pi / (2.0 * L));
  // Re[phi * i^k]; exact zeros for odd k when phi is real.
  double re = 0.0;
  switch (k % 4) {
    case 0: re = phi.real(); break;
    case 1: re = -phi.imag(); break;
    case 2: re = -phi.real(); break;
    default: re = phi.imag(); break;
  }
  return re / L + 0.0;  // no negative zeros
}

CosExpansion build_expansion(const DensitySpec& f, double L, int N) {
  check_half_width(L);
  if (N < 1) throw DomainError("mode count N must be >= 1");
  std::vector<double> c(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) c[static_cast<std::size_t>(k)] = cf_coeff_F(f, L, k);
  return CosExpansion(L, std::move(c), f.name());
}

std::complex<double> truncated_cf(const DensitySpec& f, double L, double omega) {
  check_half_width(L);
  if (!std::isfinite(omega)) throw DomainError("omega must be finite");
  const double lo = std::max(-L, f.support().lo);
  const double hi = std::min(L, f.support().hi);
  if (!(hi > lo)) return 0.0;
  const double quarter = omega != 0.0 ? 0.5 * std::numbers::pi / std::abs(omega) : 2.0 * L;
  const double width = std::min(quarter, f.length_scale());
  const std::vector<double> edges = numerics::panel_edges(lo, hi, width, inner_breaks(f, L));
  const QuadTolerance tol{1e-13, 0.0, static_cast<int>(edges.size()) + 4000};
  numerics::Integrand re = [&](double x) { return f.pdf(x) * std::cos(omega * x); };
  numerics::Integrand im = [&](double x) { return f.pdf(x) * std::sin(omega * x); };
  return {numerics::integrate(re, lo, hi, edges, tol).value,
          numerics::integrate(im, lo, hi, edges, tol).value};
}

ErrorReport measure_error(const DensitySpec& f, const CosExpansion& e, int grid_points,
                          unsigned workers) {
  if (grid_points < 2) throw DomainError("grid_points must be >= 2");
  const double L = e.half_width();
  const int top = std::max(e.mode_count() - 1, 1);
  // Four panels per half period 2L/top of the highest mode.
  const double width = std::min(L / (2.0 * top), 0.5 * f.length_scale());
  const std::vector<double> edges = numerics::panel_edges(-L, L, width, inner_breaks(f, L));
  const auto grid = numerics::composite_gauss_legendre(edges, 8);

  const std::size_t n = grid.nodes.size();
  std::vector<double> sq(n);
  constexpr std::size_t kChunk = 512;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t b = c * kChunk;
    const std::size_t end = std::min(n, b + kChunk);
    const auto vals = e.evaluate_many(std::span<const double>(grid.nodes).subspan(b, end - b));
    for (std::size_t i = b; i < end; ++i) {
      const double d = f.pdf(grid.nodes[i]) - vals[i - b];
      sq[i] = grid.weights[i] * d * d;
    }
  });

  std::vector<double> xs(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    xs[static_cast<std::size_t>(i)] =
        i == grid_points - 1 ? L : -L + 2.0 * L * i / (grid_points - 1);
  }
  const auto approx = e.evaluate_many(xs);
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sup = std::max(sup, std::abs(f.pdf(xs[i]) - approx[i]));

  ErrorReport r;
  r.l2_error = std::sqrt(std::max(0.0, pairwise_sum(sq)));
  r.sup_error = sup;
  r.grid_points = grid_points;
  return r;
}

void write_coefficients_csv(std::ostream& os, const CosExpansion& e) {
  os << "k,F_k\n";
  char buf[64];
  for (int k = 0; k < e.mode_count(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", k, e.coeffs()[static_cast<std::size_t>(k)]);
    os << buf;
  }
}

}  // namespace cosadmit
