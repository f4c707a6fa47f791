#include "cosadmit/tail_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cosadmit/cos_expansion.hpp"
#include "cosadmit/errors.hpp"
#include "cosadmit/parallel.hpp"
#include "cosadmit/quadrature.hpp"
#include "cosadmit/summation.hpp"

namespace cosadmit {
namespace {

constexpr int kOrder = 10;
constexpr int kMaxBlocks = 256;
constexpr double kBlockL2Cut = 1e-14;
constexpr double kBlockMassCut = 1e-16;
constexpr int kResync = 64;
constexpr std::size_t kChunk = 1024;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_half_width(double L) {
  if (!std::isfinite(L) || !(L > 0.0)) throw DomainError("half-width L must be finite and > 0");
}

bool support_inside(const DensitySpec& f, double L) {
  return f.support().lo >= -L && f.support().hi <= L;
}

// Panel width on the folded interval: a quarter period of the highest mode,
// and fine enough to resolve the density near the cut for light tails.
double fold_panel_width(const DensitySpec& f, double L, int k_max) {
  const double s = f.length_scale();
  double w = std::min({L / std::max(k_max, 1), 0.25 * s, 0.25 * L});
  if (!f.tail_exponent()) w = std::min(w, 0.25 * s * s / L);
  return w;
}

// Breakpoints of x -> f(x) mapped into t = x - 2jL for |j| <= blocks.
std::vector<double> folded_breaks(const DensitySpec& f, double L, int blocks) {
  std::vector<double> out;
  for (double b : f.breakpoints()) {
    for (int j = -blocks; j <= blocks; ++j) {
      const double t = b - 2.0 * j * L;
      if (t > -L && t < L) out.push_back(t);
    }
  }
  return out;
}

// Smallest J such that the L2 mass of f beyond (2J+1)L is below the cut
// relative to the whole tail, and so is the plain mass. The second condition
// keeps the closed-form block remainder out of play for light tails, where
// f is not smooth on the 2L block scale. For densities decreasing in |x|,
// int_{|x|>X} f^2 <= f(X) P(|X| > X).
int choose_blocks(const DensitySpec& f, double L) {
  const double tail_l2 = tail_weighted_moment(f, 0.0, L);
  const double tail_p = f.tail_mass(L);
  for (int j = 1; j < kMaxBlocks; ++j) {
    const double x = (2.0 * j + 1.0) * L;
    const double mass = f.tail_mass(x);
    const double remaining = std::max(f.pdf(x), f.pdf(-x)) * mass;
    if (remaining <= kBlockL2Cut * tail_l2 && mass <= kBlockMassCut * tail_p) return j;
  }
  return kMaxBlocks;
}

struct FoldValue {
  double even = 0.0;
  double odd = 0.0;
  double error = 0.0;
};

// G_even(t) and G_odd(t) with explicit blocks 1..J on both sides and the
// remainder of the block series in closed form.
FoldValue fold_at(const DensitySpec& f, double L, int J, double t) {
  FoldValue v;
  const double two_l = 2.0 * L;
  // Even series remainder, Euler-Maclaurin midpoint form:
  //   sum_{j>J} h(j) ~ int_{J+1/2}^inf h(u) du + h'(J+1/2) / 24.
  const double x_mid = (2.0 * J + 1.0) * L;
  const double em_corr = two_l / 24.0 * (f.pdf_derivative(t + x_mid) - f.pdf_derivative(t - x_mid));
  v.even = (f.sf(t + x_mid) + f.cdf(t - x_mid)) / two_l + em_corr;
  // Alternating remainder, Euler-Boole:
  //   sum_{j>J} (-1)^j h(j) ~ (-1)^{J+1} (h(J+1)/2 - h'(J+1)/4).
  const double x_next = 2.0 * (J + 1.0) * L;
  const double h_next = f.pdf(t + x_next) + f.pdf(t - x_next);
  const double boole_corr = two_l / 4.0 * (f.pdf_derivative(t + x_next) - f.pdf_derivative(t - x_next));
  const double sign = ((J + 1) % 2 == 0) ? 1.0 : -1.0;
  v.odd = sign * (0.5 * h_next - boole_corr);
  // Next terms are h'''/34 and h'''/48 times (2L)^3; for a power tail of
  // exponent a, |h'''/h'| ~ (a+1)(a+2) / x^2. Light tails keep the full term.
  double shrink = 1.0;
  if (const auto a = f.tail_exponent()) {
    const double r = two_l / x_mid * (*a + 2.0);
    shrink = std::min(1.0, r * r);
  }
  v.error = shrink * std::max(std::abs(em_corr), std::abs(boole_corr));
  // Explicit blocks, far ones first.
  for (int j = J; j >= 1; --j) {
    const double h = f.pdf(t + j * two_l) + f.pdf(t - j * two_l);
    v.even += h;
    v.odd += (j % 2 == 0) ? h : -h;
  }
  return v;
}

}  // namespace

TailCosineIntegrals tail_cosine_integrals(const DensitySpec& f, double L, int k_max,
                                          unsigned workers) {
  check_half_width(L);
  if (k_max < 0) throw DomainError("k_max must be >= 0");
  TailCosineIntegrals out;
  out.half_width = L;
  out.values.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (support_inside(f, L)) {
    // Inner Parseval still matters for d-dimensional totals.
    const std::vector<double> edges =
        numerics::panel_edges(-L, L, std::min(0.25 * L, 0.5 * f.length_scale()), folded_breaks(f, L, 0));
    const auto grid = numerics::composite_gauss_legendre(edges, kOrder);
    CompensatedSum l2;
    CompensatedSum m;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
      const double v = f.pdf(grid.nodes[i]);
      l2.add(grid.weights[i] * v * v);
      m.add(grid.weights[i] * v);
    }
    out.inner_parseval = l2.value() + m.value() * m.value() / (2.0 * L);
    return out;
  }

  const int J = choose_blocks(f, L);
  out.blocks_used = 2 * J;
  out.tail_mass = f.tail_mass(L);

  const std::vector<double> edges =
      numerics::panel_edges(-L, L, fold_panel_width(f, L, k_max), folded_breaks(f, L, J));
  const auto grid = numerics::composite_gauss_legendre(edges, kOrder);
  const std::size_t n = grid.nodes.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;

  std::vector<double> g_even(n);
  std::vector<double> g_odd(n);
  std::vector<double> f_in(n);
  std::vector<double> fold_err(n);
  // Values at -t for the symmetric/antisymmetric split.
  std::vector<double> g_even_m(n);
  std::vector<double> g_odd_m(n);
  std::vector<double> f_in_m(n);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double t = grid.nodes[i];
      const FoldValue v = fold_at(f, L, J, t);
      g_even[i] = v.even;
      g_odd[i] = v.odd;
      f_in[i] = f.pdf(t);
      fold_err[i] = v.error;
      if (f.is_even()) {
        g_even_m[i] = v.even;
        g_odd_m[i] = v.odd;
        f_in_m[i] = f_in[i];
      } else {
        const FoldValue w = fold_at(f, L, J, -t);
        g_even_m[i] = w.even;
        g_odd_m[i] = w.odd;
        f_in_m[i] = f.pdf(-t);
        fold_err[i] = std::max(fold_err[i], w.error);
      }
    }
  });

  // T_k by chunk partial sums, reduced in a fixed order.
  const std::size_t modes = out.values.size();
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(modes, 0.0));
  parallel_for(chunks, workers, [&](std::size_t c) {
    auto& acc = partial[c];
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double theta = std::numbers::pi * (grid.nodes[i] + L) / (2.0 * L);
      const double c1 = std::cos(theta);
      const double s1 = std::sin(theta);
      const double we = grid.weights[i] * g_even[i];
      const double wo = grid.weights[i] * g_odd[i];
      double ck = 1.0;
      double sk = 0.0;
      for (std::size_t k = 0; k < modes; ++k) {
        if (k > 0) {
          if (k % kResync == 0) {
            ck = std::cos(static_cast<double>(k) * theta);
            sk = std::sin(static_cast<double>(k) * theta);
          } else {
            const double cn = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = cn;
          }
        }
        acc[k] += ((k % 2 == 0) ? we : wo) * ck;
      }
    }
  });
  std::vector<double> column(chunks);
  for (std::size_t k = 0; k < modes; ++k) {
    for (std::size_t c = 0; c < chunks; ++c) column[c] = partial[c][k];
    out.values[k] = pairwise_sum(column);
  }

  // Parseval on the folded functions: even modes see the part of G_even that
  // is symmetric in t, odd modes the antisymmetric part of G_odd.
  std::vector<double> tt(n);
  std::vector<double> ff(n);
  std::vector<double> ft(n);
  std::vector<double> fm(n);
  std::vector<double> abs_g(n);
  double max_fold_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.weights[i];
    const double ge = 0.5 * (g_even[i] + g_even_m[i]);
    const double go = 0.5 * (g_odd[i] - g_odd_m[i]);
    const double fe = 0.5 * (f_in[i] + f_in_m[i]);
    const double fo = 0.5 * (f_in[i] - f_in_m[i]);
    tt[i] = w * (ge * ge + go * go);
    ff[i] = w * (fe * fe + fo * fo);
    ft[i] = w * (fe * ge + fo * go);
    fm[i] = w * f_in[i];
    abs_g[i] = w * (std::abs(g_even[i]) + std::abs(g_odd[i]));
    max_fold_err = std::max(max_fold_err, fold_err[i]);
  }
  const double t0 = out.values[0];
  const double m_in = pairwise_sum(fm);
  out.parseval_total = pairwise_sum(tt) + t0 * t0 / (2.0 * L);
  out.inner_parseval = pairwise_sum(ff) + m_in * m_in / (2.0 * L);
  out.cross_parseval = pairwise_sum(ft) + m_in * t0 / (2.0 * L);
  out.coeff_error = 2.0 * L * max_fold_err + std::abs(t0 - out.tail_mass) +
                    32.0 * kEps * pairwise_sum(abs_g);
  return out;
}

TailEnergyResult brute_force_B(const DensitySpec& f, double L, int k_max, unsigned workers) {
  check_half_width(L);
  if (k_max < 16) throw DomainError("brute_force_B requires k_max >= 16");
  TailEnergyResult r;
  r.k_max = k_max;
  if (support_inside(f, L)) return r;

  const TailCosineIntegrals tc = tail_cosine_integrals(f, L, k_max, workers);
  std::vector<double> terms(tc.values.size());
  double abs_sum = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    terms[k] = tc.values[k] * tc.values[k] / L;
    abs_sum += std::abs(tc.values[k]);
  }
  r.value = pairwise_sum(terms);
  const auto last = static_cast<std::size_t>(std::ceil(0.9 * k_max));
  const double recent = pairwise_sum(std::span<const double>(terms).subspan(last));
  r.stagnated = recent < 1e-6 * r.value;
  r.parseval_total = tc.parseval_total;
  r.k_tail_estimate = std::max(0.0, tc.parseval_total - r.value);
  const double d = tc.coeff_error;
  r.quad_error = (2.0 * d * abs_sum + static_cast<double>(terms.size()) * d * d) / L;
  r.blocks_used = tc.blocks_used;
  return r;
}

TailEnergyResult brute_force_Bd(const ProductDensitySpec& f, const std::vector<double>& L,
                                int k_max_per_axis, unsigned workers) {
  const int d = f.dimension();
  if (d > 3) throw UnsupportedError("brute_force_Bd supports dimensions 1 to 3");
  if (static_cast<int>(L.size()) != d) throw DomainError("need one half-width per axis");
  for (double l : L) check_half_width(l);
  if (k_max_per_axis < 8) throw DomainError("brute_force_Bd requires k_max_per_axis >= 8");

  TailEnergyResult r;
  r.k_max = k_max_per_axis;
  const std::size_t modes = static_cast<std::size_t>(k_max_per_axis) + 1;

  struct Axis {
    std::vector<double> inner;  // int_{-L}^{L} f cos
    std::vector<double> tail;   // T_k
    double inner_err;
    double tail_err;
    double aa, at, tt;          // all-mode Parseval inner products
  };
  std::vector<Axis> axes;
  double norm = 1.0;
  bool any_tail = false;
  for (int i = 0; i < d; ++i) {
    const auto& fi = f.factors()[static_cast<std::size_t>(i)];
    const double Li = L[static_cast<std::size_t>(i)];
    norm *= Li;
    const TailCosineIntegrals tc = tail_cosine_integrals(fi, Li, k_max_per_axis, workers);
    std::vector<double> inner = exact_coeffs_A(fi, Li, static_cast<int>(modes));
    double max_inner = 0.0;
    for (double& a : inner) {
      a *= Li;
      max_inner = std::max(max_inner, std::abs(a));
    }
    any_tail = any_tail || !support_inside(fi, Li);
    r.blocks_used += tc.blocks_used;
    axes.push_back({std::move(inner), tc.values, 64.0 * kEps * std::max(max_inner, 1.0),
                    tc.coeff_error, tc.inner_parseval, tc.cross_parseval, tc.parseval_total});
  }
  if (!any_tail) return r;

  // Multi-indices are grouped by the first axis index; each group is summed
  // with compensation and groups are reduced pairwise in index order.
  std::size_t inner_count = 1;
  for (int i = 1; i < d; ++i) inner_count *= modes;
  std::vector<double> group_sum(modes, 0.0);
  std::vector<double> group_err(modes, 0.0);
  parallel_for(modes, workers, [&](std::size_t k0) {
    CompensatedSum s;
    CompensatedSum e;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    idx[0] = k0;
    for (std::size_t flat = 0; flat < inner_count; ++flat) {
      std::size_t rem = flat;
      for (int i = 1; i < d; ++i) {
        idx[static_cast<std::size_t>(i)] = rem % modes;
        rem /= modes;
      }
      // prod(a + t) - prod(a), accumulated axis by axis.
      double diff = 0.0;
      double inner_prod = 1.0;
      double err = 0.0;
      double abs_full = 1.0;
      for (int i = 0; i < d; ++i) {
        const Axis& ax = axes[static_cast<std::size_t>(i)];
        const double a = ax.inner[idx[static_cast<std::size_t>(i)]];
        const double t = ax.tail[idx[static_cast<std::size_t>(i)]];
        diff = diff * (a + t) + inner_prod * t;
        inner_prod *= a;
        const double delta = ax.inner_err + ax.tail_err;
        err = err * (std::abs(a) + std::abs(t) + delta) + abs_full * delta;
        abs_full *= std::abs(a) + std::abs(t);
      }
      s.add(diff * diff / norm);
      e.add((2.0 * std::abs(diff) * err + err * err) / norm);
    }
    group_sum[k0] = s.value();
    group_err[k0] = e.value();
  });
  r.value = pairwise_sum(group_sum);
  r.quad_error = pairwise_sum(group_err);

  // All-mode total: sum over non-empty axis subsets S, S' of the product of
  // per-axis inner products <u_S, u_S'> with u in {inner, tail}.
  double total = 0.0;
  const int subsets = 1 << d;
  for (int s1 = 1; s1 < subsets; ++s1) {
    for (int s2 = 1; s2 < subsets; ++s2) {
      double prod = 1.0;
      for (int i = 0; i < d; ++i) {
        const Axis& ax = axes[static_cast<std::size_t>(i)];
        const bool in1 = (s1 >> i) & 1;
        const bool in2 = (s2 >> i) & 1;
        prod *= (in1 && in2) ? ax.tt : (in1 || in2) ? ax.at : ax.aa;
      }
      total += prod;
    }
  }
  // The per-axis totals carry the 1/L_i normalisation already.
  r.parseval_total = total;
  r.k_tail_estimate = std::max(0.0, total - r.value);
  const auto cut = static_cast<std::size_t>(std::ceil(0.9 * k_max_per_axis));
  double recent = 0.0;
  for (std::size_t k0 = cut; k0 < modes; ++k0) recent += group_sum[k0];
  r.stagnated = recent < 1e-6 * r.value;
  return r;
}

BlockEnergy block_energy(const DensitySpec& f, double L, int j, int k_max) {
  check_half_width(L);
  if (j == 0) throw DomainError("block index j must be non-zero");
  if (k_max < 0) throw DomainError("k_max must be >= 0");
  const double shift = 2.0 * j * L;
  std::vector<double> breaks;
  for (double b : f.breakpoints()) {
    const double t = b - shift;
    if (t > -L && t < L) breaks.push_back(t);
  }
  const double s = f.length_scale();
  const double width = std::min({L / std::max(k_max, 1), 0.25 * s, 0.25 * L});
  const auto grid = numerics::composite_gauss_legendre(numerics::panel_edges(-L, L, width, breaks), kOrder);
  const std::size_t n = grid.nodes.size();
  std::vector<double> wf(n);
  std::vector<double> sq(n);
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f.pdf(grid.nodes[i] + shift);
    wf[i] = grid.weights[i] * v;
    sq[i] = grid.weights[i] * v * v;
    theta[i] = std::numbers::pi * (grid.nodes[i] + L) / (2.0 * L);
  }
  std::vector<double> terms(n);
  std::vector<double> energy(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    for (std::size_t i = 0; i < n; ++i) terms[i] = wf[i] * std::cos(k * theta[i]);
    const double e = pairwise_sum(terms);
    energy[static_cast<std::size_t>(k)] = e * e / L;
  }
  BlockEnergy b;
  b.mode_energy = pairwise_sum(energy);
  b.l2_mass = pairwise_sum(sq);
  b.mass = pairwise_sum(wf);
  return b;
}

}  // namespace cosadmit
