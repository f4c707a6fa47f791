#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cosadmit/cos_expansion.hpp"
#include "cosadmit/density.hpp"
#include "cosadmit/errors.hpp"

using namespace cosadmit;

namespace {

const double kPi = std::numbers::pi;

double t_pdf(double nu, double x) {
  const double c = std::exp(std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu)) / std::sqrt(nu * kPi);
  return c * std::pow(1.0 + x * x / nu, -0.5 * (nu + 1));
}

// 2 int_a^X f(x) cos(x) dx with X = 2 pi M by Simpson, then the remainder
// int_X^inf f cos = -f'(X) - ... from two integrations by parts.
double t_tail_cos_integral(double nu, double a) {
  const double X = 2.0 * kPi * 1000.0;
  const int n = 1600000;
  const double h = (X - a) / n;
  double s = t_pdf(nu, a) * std::cos(a) + t_pdf(nu, X) * std::cos(X);
  for (int i = 1; i < n; ++i) {
    const double x = a + i * h;
    s += (i % 2 == 1 ? 4.0 : 2.0) * t_pdf(nu, x) * std::cos(x);
  }
  const double fprime = t_pdf(nu, X) * (-(nu + 1) * X / (nu + X * X));
  return 2.0 * (s * h / 3.0 - fprime);
}

}  // namespace

TEST_CASE("exact coefficients") {
  for (const double L : {1.0, 2.0, 5.0}) CHECK(std::abs(exact_coeff_A(DensitySpec::uniform(), L, 0) - 1.0 / L) <= 1e-13);
  CHECK(std::abs(exact_coeff_A(DensitySpec::normal(), 8.0, 1)) <= 1e-12);
  // cos(pi (x + 4) / 4) = -cos(pi x / 4), and int_0^4 e^-x cos(pi x / 4) = (1 + e^-4) / (1 + pi^2/16).
  const double oracle = -(1.0 + std::exp(-4.0)) / (4.0 * (1.0 + kPi * kPi / 16.0));
  CHECK(std::abs(exact_coeff_A(DensitySpec::laplace(), 4.0, 2) - oracle) <= 1e-13);
  const auto many = exact_coeffs_A(DensitySpec::laplace(), 4.0, 40);
  REQUIRE(many.size() == 40);
  CHECK(std::abs(many[2] - oracle) <= 1e-13);
  for (int k : {0, 1, 7, 39}) CHECK(std::abs(many[k] - exact_coeff_A(DensitySpec::laplace(), 4.0, k)) <= 1e-12);
}

TEST_CASE("cf coefficients") {
  for (const auto& f : catalog()) {
    CAPTURE(f.name());
    CHECK(cf_coeff_F(f, 4.0, 0) == 0.25);
    for (int k = 1; k < 64; k += 2) CHECK(cf_coeff_F(f, 4.0, k) == 0.0);
  }
  const double want = -(1.0 / 8.0) * std::exp(-0.5 * (kPi / 8.0) * (kPi / 8.0));
  CHECK(std::abs(cf_coeff_F(DensitySpec::normal(), 8.0, 2) - want) <= 1e-16);
  CHECK_THROWS_AS(cf_coeff_F(DensitySpec::normal(), 0.0, 2), DomainError);
  CHECK_THROWS_AS(cf_coeff_F(DensitySpec::normal(), 1.0, -1), DomainError);
}

TEST_CASE("building expansions") {
  const auto one = build_expansion(DensitySpec::normal(), 8.0, 1);
  REQUIRE(one.mode_count() == 1);
  CHECK(one.coeffs()[0] == 0.125);

  const auto u = build_expansion(DensitySpec::uniform(), 2.0, 4);
  // F_k = (1/2) Re[sin(w)/w i^k] at w = k pi / 4.
  CHECK(u.coeffs()[0] == 0.5);
  CHECK(u.coeffs()[1] == 0.0);
  CHECK(std::abs(u.coeffs()[2] + 1.0 / kPi) <= 1e-16);
  CHECK(u.coeffs()[3] == 0.0);

  const auto t = build_expansion(DensitySpec::student_t(0.4), 16.0, 256);
  REQUIRE(t.mode_count() == 256);
  for (double c : t.coeffs()) CHECK(std::isfinite(c));
  CHECK(t.coeffs()[0] == 1.0 / 16.0);

  CHECK_THROWS_AS(build_expansion(DensitySpec::normal(), 8.0, 0), DomainError);
  CHECK_THROWS_AS(build_expansion(DensitySpec::normal(), -1.0, 8), DomainError);
}

TEST_CASE("evaluation") {
  for (const auto& f : catalog()) {
    const auto e = build_expansion(f, 3.0, 1);
    for (double x : {-3.0, -1.0, 0.0, 2.9}) CHECK(e.evaluate(x) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  }
  const auto n = build_expansion(DensitySpec::normal(), 8.0, 128);
  CHECK(std::abs(n.evaluate(0.0) - 0.3989422804) <= 1e-8);
  CHECK(std::abs(n.evaluate(0.0) - 1.0 / std::sqrt(2.0 * kPi)) <= 1e-8);
  CHECK(std::abs(n.evaluate(3.0) - n.evaluate(-3.0)) <= 1e-12);
  CHECK_THROWS_AS(n.evaluate(8.5), DomainError);
  CHECK_THROWS_AS(n.evaluate(-8.0001), DomainError);
  CHECK_NOTHROW(n.evaluate(8.0));

  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(-8.0 + 0.16 * i);
  const auto ys = n.evaluate_many(xs);
  REQUIRE(ys.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(ys[i] - n.evaluate(xs[i])) <= 1e-14);
}

TEST_CASE("mass") {
  for (const auto& f : catalog()) {
    for (double L : {1.0, 4.0, 16.0}) {
      for (int N : {1, 8, 64}) {
        CAPTURE(f.name());
        CHECK(std::abs(build_expansion(f, L, N).mass() - 1.0) <= 1e-15);
      }
    }
  }
  const auto e = build_expansion(DensitySpec::laplace(), 4.0, 16);
  std::vector<double> doubled = e.coeffs();
  for (double& c : doubled) c *= 2.0;
  CHECK(CosExpansion(4.0, doubled, "scaled").mass() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(e.truncated(3).mass() == e.mass());
  CHECK(e.truncated(3).mode_count() == 3);
  CHECK_THROWS_AS(e.truncated(0), DomainError);
  CHECK_THROWS_AS(e.truncated(17), DomainError);
}

TEST_CASE("parity") {
  for (const auto& f : catalog()) {
    CAPTURE(f.name());
    const auto e = build_expansion(f, 8.0, 128);
    for (int k = 1; k < 128; k += 2) CHECK(e.coeffs()[k] == 0.0);
    for (double x : {0.3, 1.7, 5.2, 8.0}) CHECK(std::abs(e.evaluate(x) - e.evaluate(-x)) <= 1e-12);
  }
}

TEST_CASE("truncated characteristic function") {
  for (double w : {0.0, 0.7, 3.0, 12.5}) {
    const double full = w == 0.0 ? 1.0 : std::sin(w) / w;
    CHECK(std::abs(truncated_cf(DensitySpec::uniform(), 2.0, w).real() - full) <= 1e-13);
  }
  for (const auto& f : catalog()) {
    const double m = truncated_cf(f, 4.0, 0.0).real();
    CHECK(m > 0.0);
    CHECK(m <= 1.0);
    CHECK(std::abs(m - (1.0 - f.tail_mass(4.0))) <= 1e-12);
  }
  const auto t = DensitySpec::student_t(0.4);
  const double phi1 = truncated_cf(t, 8.0, 1.0).real();
  const double tail = t_tail_cos_integral(0.4, 8.0);
  CHECK(std::abs(t.cf(1.0).real() - phi1) > 1e-3);
  CHECK(std::abs(t.cf(1.0).real() - tail - phi1) <= 1e-8);
}

TEST_CASE("coefficient consistency") {
  for (const auto& f : catalog()) {
    for (double L : {2.0, 4.0, 8.0}) {
      CAPTURE(f.name());
      CAPTURE(L);
      const auto A = exact_coeffs_A(f, L, 64);
      const double cap = 2.0 * f.tail_mass(L);
      for (int k = 0; k < 64; ++k) CHECK(std::abs(cf_coeff_F(f, L, k) - A[k]) <= cap + 1e-12);
    }
  }
  const auto A = exact_coeffs_A(DensitySpec::uniform(), 2.0, 128);
  for (int k = 0; k < 128; ++k) CHECK(std::abs(cf_coeff_F(DensitySpec::uniform(), 2.0, k) - A[k]) <= 1e-12);
}

TEST_CASE("reconstruction errors") {
  const auto f = DensitySpec::normal();
  const auto r = measure_error(f, build_expansion(f, 8.0, 128), 401);
  CHECK(r.l2_error <= 1e-8);
  CHECK(r.sup_error <= 1e-8);
  CHECK(r.grid_points == 401);
  double prev = INFINITY;
  for (int N : {4, 8, 16, 32, 64, 128}) {
    const double l2 = measure_error(f, build_expansion(f, 8.0, N), 101).l2_error;
    CHECK(l2 <= prev + 1e-12);
    prev = l2;
  }
  // Discontinuous target: report only.
  const auto u = measure_error(DensitySpec::uniform(), build_expansion(DensitySpec::uniform(), 2.0, 2048), 401, 2);
  CHECK(std::isfinite(u.l2_error));
  CHECK(u.l2_error > 0.0);
  CHECK_THROWS_AS(measure_error(f, build_expansion(f, 8.0, 8), 1), DomainError);
}

TEST_CASE("coefficient CSV") {
  const auto e = build_expansion(DensitySpec::laplace(), 4.0, 5);
  std::ostringstream os;
  write_coefficients_csv(os, e);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,F_k");
  int rows = 0;
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(std::stoi(line.substr(0, comma)) == rows);
    CHECK(std::strtod(line.c_str() + comma + 1, nullptr) == e.coeffs()[rows]);
    ++rows;
  }
  CHECK(rows == 5);
}
