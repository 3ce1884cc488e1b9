#include <doctest.h>

#include <cmath>
#include <numbers>

#include "collapse/quadrature.hpp"

using namespace collapse;
namespace nb = std::numbers;

TEST_CASE("semi-infinite: plain exponential") {
  auto r = integrate_semi_infinite([](double x) { return std::exp(-x); });
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.error_estimate <= std::max(1e-8 * r.value, 1e-14));
}

TEST_CASE("semi-infinite: x^4 exp(-x^2) = 3 sqrt(pi)/8") {
  auto r = integrate_semi_infinite([](double x) { return std::pow(x, 4) * std::exp(-x * x); });
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(3.0 * std::sqrt(nb::pi) / 8.0).epsilon(1e-10));
}

TEST_CASE("semi-infinite: damped oscillation, Laplace transform of sin") {
  // int_0^inf e^{-x} sin(w x) dx = w/(1+w^2)
  for (double w : {1.0, 10.0, 100.0}) {
    QuadratureSpec spec;
    spec.oscillation_period = 2.0 * nb::pi / w;
    auto r = integrate_semi_infinite([w](double x) { return std::exp(-x) * std::sin(w * x); }, spec);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(w / (1.0 + w * w)).epsilon(1e-8));
    CHECK(r.evals < 400000);
  }
}

TEST_CASE("linearity within combined error estimates") {
  auto f = [](double x) { return std::exp(-x); };
  auto g = [](double x) { return std::exp(-x * x); };
  const double a = 2.5, b = -1.25;
  auto rf = integrate_semi_infinite(f);
  auto rg = integrate_semi_infinite(g);
  auto rc = integrate_semi_infinite([&](double x) { return a * f(x) + b * g(x); });
  const double lhs = rc.value;
  const double rhs = a * rf.value + b * rg.value;
  const double budget = 2.0 * (rc.error_estimate + std::abs(a) * rf.error_estimate +
                               std::abs(b) * rg.error_estimate);
  CHECK(std::abs(lhs - rhs) <= std::max(budget, 1e-13));
}

TEST_CASE("finite interval with interior oscillation") {
  // int_0^pi sin(50 x) sin(x) dx = -(50 sin(pi*50)cos(pi) - ... ) ; use product formula:
  // int sin(ax)sin(x) = sin((a-1)x)/(2(a-1)) - sin((a+1)x)/(2(a+1))
  const double a = 50.0;
  QuadratureSpec spec;
  spec.oscillation_period = 2.0 * nb::pi / a;
  auto r = integrate_finite([a](double x) { return std::sin(a * x) * std::sin(x); }, 0.0,
                            nb::pi, spec);
  const double exact = std::sin((a - 1) * nb::pi) / (2 * (a - 1)) -
                       std::sin((a + 1) * nb::pi) / (2 * (a + 1));
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("integrable endpoint singularity x^{-1/2}") {
  auto r = integrate_finite([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("NaN from integrand is a hard error naming the abscissa") {
  auto bad = [](double x) { return x < 0.5 ? 1.0 : std::nan(""); };
  CHECK_THROWS_AS(integrate_finite(bad, 0.0, 1.0), ConvergenceError);
}

TEST_CASE("non-convergence is reported, never silent") {
  QuadratureSpec spec;
  spec.max_evals = 60;  // far too small for the oscillation below
  spec.rel_tol = 1e-12;
  auto r = integrate_finite([](double x) { return std::sin(200.0 * x); }, 0.0, 20.0, spec);
  CHECK_FALSE(r.converged);
}

TEST_CASE("bose_integral: zeta = 0 closed forms") {
  CHECK(bose_integral(1.0, 0.0, 1.0) == doctest::Approx(nb::pi * nb::pi / 6.0).epsilon(1e-9));
  // T^{n+1} scaling
  CHECK(bose_integral(1.0, 0.0, 2.0) ==
        doctest::Approx(4.0 * nb::pi * nb::pi / 6.0).epsilon(1e-9));
  // Gamma(4) zeta(4) = 6 * pi^4/90
  CHECK(bose_integral(3.0, 0.0, 1.0) ==
        doctest::Approx(6.0 * std::pow(nb::pi, 4) / 90.0).epsilon(1e-9));
}

TEST_CASE("bose_integral: negative chemical potential against series oracle") {
  // sum_k e^{zeta k / T} Gamma(n+1) T^{n+1} / k^{n+1}, oracle by brute summation
  const double n = 3.0, zeta = -1.0, T = 1.0;
  double oracle = 0.0;
  for (int k = 1; k < 400; ++k) oracle += 6.0 * std::exp(zeta * k) / std::pow(k, 4);
  const double v = bose_integral(n, zeta, T);
  CHECK(v == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(v < 6.0 * std::pow(nb::pi, 4) / 90.0);  // below the zeta = 0 value
}

TEST_CASE("bose_integral: monotone in T and in zeta on a sampled grid") {
  double prev = 0.0;
  for (double T : {0.5, 1.0, 1.5, 2.0}) {
    const double v = bose_integral(2.0, -0.5, T);
    CHECK(v > prev);
    prev = v;
  }
  prev = 0.0;
  for (double z : {-2.0, -1.0, -0.5, -0.1}) {
    const double v = bose_integral(2.0, z, 1.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("bose_integral: domain errors") {
  CHECK_THROWS_AS(bose_integral(1.0, 0.1, 1.0), DomainError);   // physical-region pole
  CHECK_THROWS_AS(bose_integral(-0.5, 0.0, 1.0), DomainError);  // divergent at origin
  CHECK_THROWS_AS(bose_integral(1.0, -1.0, 0.0), DomainError);
}
