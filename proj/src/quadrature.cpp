#include "cosadmit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "cosadmit/errors.hpp"
#include "cosadmit/summation.hpp"

namespace cosadmit::numerics {
namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525159164, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

enum class PieceKind { finite, upper_infinite, lower_infinite };

// One contiguous piece of the original domain and its map from a finite
// parameter interval.
struct Piece {
  PieceKind kind;
  double anchor;  // finite end for infinite pieces
  double lo;      // parameter interval
  double hi;
};

struct Segment {
  int piece;
  double lo;
  double hi;
  double value;
  double error;
};

struct ByError {
  bool operator()(const Segment& a, const Segment& b) const { return a.error < b.error; }
};

[[noreturn]] void non_finite(double x) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand returned a non-finite value at x = " << x;
  throw DomainError(os.str());
}

double eval_mapped(const Integrand& f, const Piece& piece, double t) {
  double x = t;
  double fx = 0.0;
  switch (piece.kind) {
    case PieceKind::finite:
      fx = f(t);
      if (!std::isfinite(fx)) non_finite(x);
      return fx;
    case PieceKind::upper_infinite:
      x = piece.anchor + (1.0 - t) / t;
      break;
    case PieceKind::lower_infinite:
      x = piece.anchor - (1.0 - t) / t;
      break;
  }
  fx = f(x);
  if (!std::isfinite(fx)) non_finite(x);
  if (fx == 0.0) return 0.0;
  // Divide twice instead of by t*t so the Jacobian cannot overflow first.
  return fx / t / t;
}

Segment gk21(const Integrand& f, const Piece& piece, int index, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = eval_mapped(f, piece, center);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double resabs = std::abs(resk);
  std::array<double, 10> fv1{};
  std::array<double, 10> fv2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = eval_mapped(f, piece, center - dx);
    const double f2 = eval_mapped(f, piece, center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  const double result = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return Segment{index, lo, hi, result, err};
}

std::vector<Piece> make_pieces(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> cuts;
  for (double c : breakpoints) {
    if (std::isfinite(c) && c > a && c < b) cuts.push_back(c);
  }
  if (std::isinf(a) && std::isinf(b) && cuts.empty()) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> pts;
  pts.push_back(a);
  pts.insert(pts.end(), cuts.begin(), cuts.end());
  pts.push_back(b);

  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i];
    const double hi = pts[i + 1];
    if (std::isinf(lo)) {
      pieces.push_back({PieceKind::lower_infinite, hi, 0.0, 1.0});
    } else if (std::isinf(hi)) {
      pieces.push_back({PieceKind::upper_infinite, lo, 0.0, 1.0});
    } else {
      pieces.push_back({PieceKind::finite, 0.0, lo, hi});
    }
  }
  return pieces;
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, QuadTolerance tol) {
  return integrate(f, a, b, std::span<const double>{}, tol);
}

QuadResult integrate(const Integrand& f, double a, double b,
                     std::span<const double> breakpoints, QuadTolerance tol) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integration limits must not be NaN");
  if (!(tol.abs >= 0.0) || !(tol.rel >= 0.0) || (tol.abs == 0.0 && tol.rel == 0.0)) {
    throw DomainError("integration tolerance must be positive");
  }
  if (a == b) return {0.0, 0.0, 1};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  if (std::isinf(a) && a > 0) throw DomainError("lower limit is +infinity");
  if (std::isinf(b) && b < 0) throw DomainError("upper limit is -infinity");

  const std::vector<Piece> pieces = make_pieces(a, b, breakpoints);
  std::priority_queue<Segment, std::vector<Segment>, ByError> active;
  std::vector<Segment> frozen;  // can no longer be bisected in floating point
  double total = 0.0;
  double total_err = 0.0;
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
    Segment s = gk21(f, pieces[i], i, pieces[i].lo, pieces[i].hi);
    total += s.value;
    total_err += s.error;
    active.push(s);
  }
  int count = static_cast<int>(pieces.size());

  auto collect = [&]() {
    // Recompute totals from scratch in a fixed order to avoid drift.
    std::vector<Segment> all = frozen;
    auto copy = active;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) {
      return x.piece != y.piece ? x.piece < y.piece : x.lo < y.lo;
    });
    CompensatedSum v;
    CompensatedSum e;
    for (const auto& s : all) {
      v.add(s.value);
      e.add(s.error);
    }
    total = v.value();
    total_err = e.value();
  };

  while (total_err > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (active.empty()) {
      collect();
      if (total_err <= std::max(tol.abs, tol.rel * std::abs(total))) break;
      throw AccuracyError("quadrature stalled at floating-point resolution", sign * total,
                          total_err);
    }
    if (count >= tol.max_subdivisions) {
      collect();
      if (total_err <= std::max(tol.abs, tol.rel * std::abs(total))) break;
      std::ostringstream os;
      os.precision(3);
      os << "quadrature did not converge within " << tol.max_subdivisions
         << " subdivisions (error estimate " << total_err << ")";
      throw AccuracyError(os.str(), sign * total, total_err);
    }
    const Segment worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) <= 4.0 * kEps * std::max(std::abs(worst.lo), std::abs(worst.hi))) {
      frozen.push_back(worst);
      continue;
    }
    const Segment left = gk21(f, pieces[worst.piece], worst.piece, worst.lo, mid);
    const Segment right = gk21(f, pieces[worst.piece], worst.piece, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
    ++count;
    if (count % 64 == 0) collect();
  }
  collect();
  if (!std::isfinite(total) || !std::isfinite(total_err)) {
    throw AccuracyError("quadrature produced a non-finite result", sign * total, total_err);
  }
  return {sign * total, total_err, count};
}

QuadratureGrid gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  QuadratureGrid g;
  g.nodes.resize(static_cast<std::size_t>(n));
  g.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[static_cast<std::size_t>(i)] = -x;
    g.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    g.weights[static_cast<std::size_t>(i)] = w;
    g.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) g.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return g;
}

QuadratureGrid composite_gauss_legendre(std::span<const double> edges, int order) {
  const QuadratureGrid base = gauss_legendre(order);
  QuadratureGrid g;
  if (edges.size() < 2) return g;
  g.nodes.reserve((edges.size() - 1) * base.nodes.size());
  g.weights.reserve(g.nodes.capacity());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double c = 0.5 * (edges[i] + edges[i + 1]);
    const double h = 0.5 * (edges[i + 1] - edges[i]);
    for (std::size_t j = 0; j < base.nodes.size(); ++j) {
      g.nodes.push_back(c + h * base.nodes[j]);
      g.weights.push_back(h * base.weights[j]);
    }
  }
  return g;
}

std::vector<double> panel_edges(double a, double b, double max_width,
                                std::span<const double> extra) {
  if (!(b > a) || !(max_width > 0.0)) throw DomainError("panel_edges needs a < b and width > 0");
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / max_width));
  std::vector<double> e;
  e.reserve(n + 1 + extra.size());
  for (std::size_t i = 0; i <= n; ++i) {
    e.push_back(i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
  }
  for (double x : extra) {
    if (x > a && x < b) e.push_back(x);
  }
  std::sort(e.begin(), e.end());
  // Drop points that would create slivers narrower than rounding noise.
  std::vector<double> out;
  out.reserve(e.size());
  for (double x : e) {
    if (out.empty() || x - out.back() > 8.0 * kEps * std::max(1.0, std::abs(x))) {
      out.push_back(x);
    }
  }
  out.back() = b;
  return out;
}

}  // namespace cosadmit::numerics
