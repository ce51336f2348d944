#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "treegibbs/quadrature.hpp"

using treegibbs::QuadratureRule;
using treegibbs::integrate_1d;
using treegibbs::integrate_2d;

TEST_CASE("gauss_legendre: small orders") {
  auto r1 = QuadratureRule::gauss_legendre(1);
  REQUIRE(r1.order() == 1);
  CHECK(r1.node(0) == 0.5);
  CHECK(r1.weight(0) == doctest::Approx(1.0).epsilon(1e-15));

  auto r2 = QuadratureRule::gauss_legendre(2);
  CHECK(r2.node(0) == doctest::Approx((1 - 1 / std::sqrt(3.0)) / 2).epsilon(1e-15));
  CHECK(r2.node(1) == doctest::Approx((1 + 1 / std::sqrt(3.0)) / 2).epsilon(1e-15));
  CHECK(r2.weight(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r2.weight(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("gauss_legendre: order range") {
  CHECK_THROWS_AS(QuadratureRule::gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(QuadratureRule::gauss_legendre(513), std::invalid_argument);
  CHECK_NOTHROW(QuadratureRule::gauss_legendre(512));
}

TEST_CASE("gauss_legendre: rule invariants across orders") {
  for (int order : {1, 2, 3, 5, 16, 32, 63, 64, 128, 257, 512}) {
    auto r = QuadratureRule::gauss_legendre(order);
    auto w = r.weights();
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    CHECK_MESSAGE(std::fabs(sum - 1.0) <= 1e-14, "order " << order);
    for (int i = 0; i < order; ++i) {
      CHECK(r.node(i) > 0.0);
      CHECK(r.node(i) < 1.0);
      CHECK(r.weight(i) > 0.0);
      if (i > 0) CHECK(r.node(i) > r.node(i - 1));
    }
  }
}

TEST_CASE("gauss_legendre: exact for degree 2n-1") {
  for (int order : {1, 2, 3, 4, 8, 16}) {
    auto r = QuadratureRule::gauss_legendre(order);
    for (int deg = 0; deg <= 2 * order - 1; ++deg) {
      double got = integrate_1d([&](double x) { return std::pow(x, deg); }, r);
      CHECK_MESSAGE(std::fabs(got - 1.0 / (deg + 1)) <= 1e-14, "order " << order << " degree " << deg);
    }
  }
}

TEST_CASE("gauss_legendre: deterministic") {
  auto a = QuadratureRule::gauss_legendre(64);
  auto b = QuadratureRule::gauss_legendre(64);
  CHECK(std::memcmp(a.nodes().data(), b.nodes().data(), 64 * sizeof(double)) == 0);
  CHECK(std::memcmp(a.weights().data(), b.weights().data(), 64 * sizeof(double)) == 0);
}

TEST_CASE("integrate_1d: examples") {
  auto r16 = QuadratureRule::gauss_legendre(16);
  CHECK(std::fabs(integrate_1d([](double t) { return t * t; }, r16) - 1.0 / 3.0) <= 1e-15);
  CHECK(std::fabs(integrate_1d([](double) { return 1.0; }, r16) - 1.0) <= 1e-15);
  for (int order : {1, 2, 7})
    CHECK(std::fabs(integrate_1d([](double t) { return t; }, QuadratureRule::gauss_legendre(order)) - 0.5) <=
          1e-15);
  // e - 1 from the antiderivative.
  CHECK(std::fabs(integrate_1d([](double t) { return std::exp(t); }, r16) - (std::exp(1.0) - 1.0)) <= 1e-13);
}

TEST_CASE("integrate_2d: examples") {
  auto r16 = QuadratureRule::gauss_legendre(16);
  CHECK(std::fabs(integrate_2d([](double, double) { return 1.0; }, r16) - 1.0) <= 1e-15);
  CHECK(std::fabs(integrate_2d([](double u, double v) { return u * v; }, r16) - 0.25) <= 1e-15);
  const double em1 = std::exp(1.0) - 1.0;
  CHECK(std::fabs(integrate_2d([](double u, double v) { return std::exp(u + v); }, r16) - em1 * em1) <= 1e-12);
}

TEST_CASE("integrate: non-finite integrand names the node") {
  auto r = QuadratureRule::gauss_legendre(4);
  CHECK_THROWS_AS(integrate_1d([](double) { return NAN; }, r), treegibbs::NumericError);
  CHECK_THROWS_AS(integrate_2d([](double u, double) { return u > 0.5 ? INFINITY : 1.0; }, r),
                  treegibbs::NumericError);
}

TEST_CASE("property: convergence and positivity for smooth integrands") {
  auto r32 = QuadratureRule::gauss_legendre(32);
  auto r64 = QuadratureRule::gauss_legendre(64);
  for (double a : {-3.0, -1.0, 0.5, 2.0, 4.0}) {
    auto f = [a](double u, double v) { return std::exp(a * u * v + std::sin(3 * u) * v); };
    double i32 = integrate_2d(f, r32);
    double i64 = integrate_2d(f, r64);
    CHECK(std::fabs(i32 - i64) < 1e-12);
    CHECK(i64 > 0.0);
  }
}
