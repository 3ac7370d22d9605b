#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gevfit/rng.hpp"
#include "gevfit/special.hpp"
#include "support/oracles.hpp"

using namespace gevfit;

TEST_CASE("ln_gamma values") {
  CHECK(std::abs(ln_gamma(1.0)) < 1e-15);
  CHECK(std::abs(ln_gamma(2.0)) < 1e-15);
  // log Gamma(1/2) = log sqrt(pi).
  CHECK(std::abs(ln_gamma(0.5) - 0.5 * std::log(std::numbers::pi)) < 1e-12);
  for (const double x : {1e-3, 0.1, 0.7, 3.3, 12.5, 49.0}) {
    CHECK(ln_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(ln_gamma(0.0), DomainError);
  CHECK_THROWS_AS(ln_gamma(-1.0), DomainError);
}

TEST_CASE("digamma recurrence") {
  UniformStream u(5);
  for (int i = 0; i < 100; ++i) {
    const double x = 1e-3 + 50 * u();
    CHECK(std::abs(digamma(x + 1) - digamma(x) - 1 / x) < 1e-10 * std::max(1.0, 1 / x));
  }
  CHECK_THROWS_AS(digamma(0.0), DomainError);
  CHECK_THROWS_AS(trigamma(-2.0), DomainError);
}

TEST_CASE("digamma and trigamma match finite differences") {
  const auto lg = [](long double x) { return static_cast<long double>(ln_gamma(static_cast<double>(x))); };
  const double psi1 = static_cast<double>(oracle::richardson(lg, 1.0L, 1e-5L));
  CHECK(std::abs(digamma(1.0) - psi1) < 1e-9);
  CHECK(std::abs(digamma(1.0) + 0.5772156649015329) < 1e-14);

  const auto dg = [](long double x) { return static_cast<long double>(digamma(static_cast<double>(x))); };
  const double tri1 = static_cast<double>(oracle::richardson(dg, 1.0L, 1e-5L));
  CHECK(std::abs(trigamma(1.0) - tri1) < 1e-9);
  CHECK(std::abs(trigamma(1.0) - std::numbers::pi * std::numbers::pi / 6) < 1e-14);

  for (const double x : {1e-3, 0.05, 0.9, 4.0, 20.0, 50.0}) {
    const long double h = 1e-4L * x;
    const double d1 = static_cast<double>(oracle::richardson(lg, x, h));
    const double d2 = static_cast<double>(oracle::richardson(dg, x, h));
    CHECK(digamma(x) == doctest::Approx(d1).epsilon(1e-9));
    CHECK(trigamma(x) == doctest::Approx(d2).epsilon(1e-9));
  }
}

TEST_CASE("gamma derivatives") {
  constexpr double euler = 0.5772156649015329;
  CHECK(gamma_deriv(GammaDerivOrder(0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_deriv(GammaDerivOrder(1), 1.0) == doctest::Approx(-euler).epsilon(1e-12));
  CHECK(gamma_deriv(GammaDerivOrder(2), 1.0) ==
        doctest::Approx(euler * euler + std::numbers::pi * std::numbers::pi / 6).epsilon(1e-12));
  CHECK(gamma_deriv(GammaDerivOrder(2), 1.0) == doctest::Approx(1.978111991).epsilon(1e-9));

  // Independent oracle: finite differences of Gamma = exp(ln_gamma).
  const auto g = [](long double x) { return std::exp(static_cast<long double>(ln_gamma(static_cast<double>(x)))); };
  const auto g1 = [&](long double x) { return oracle::richardson(g, x, 1e-4L); };
  for (const double x : {0.3, 1.2, 2.0, 3.7}) {
    CHECK(gamma_deriv(GammaDerivOrder(1), x) == doctest::Approx(static_cast<double>(g1(x))).epsilon(1e-8));
    CHECK(gamma_deriv(GammaDerivOrder(2), x) ==
          doctest::Approx(static_cast<double>(oracle::richardson(g1, x, 1e-3L))).epsilon(1e-6));
  }
  CHECK_THROWS_AS(GammaDerivOrder(3), DomainError);
  CHECK_THROWS_AS(gamma_deriv(GammaDerivOrder(0), 0.0), DomainError);
}
