#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "oracles.hpp"
#include "treegibbs/error.hpp"
#include "treegibbs/reduction.hpp"

using namespace treegibbs;
using expr::parse;

namespace {

DegenerateKernel degenerate(const char* psi1, const char* psi2, const char* phi1, const char* phi2) {
  return DegenerateKernel::build(parse(psi1), parse(psi2), parse(phi1), parse(phi2));
}

const QuadratureRule& rule32() {
  static const auto r = QuadratureRule::gauss_legendre(32);
  return r;
}

void check_close(double a, double b, double tol) { CHECK(std::abs(a - b) <= tol * (1 + std::abs(b))); }

// mu0 = 1, critical points at a < b, and a double root at the chosen one.
CubicPolynomial double_root_at_beta(double a, double b) {
  return {1.0, -1.5 * (a + b), 3 * a * b, b * b * (1.5 * a - 0.5 * b)};
}
CubicPolynomial double_root_at_alpha(double a, double b) {
  return {1.0, -1.5 * (a + b), 3 * a * b, a * a * (1.5 * b - 0.5 * a)};
}

}  // namespace

TEST_CASE("compute_coefficients: unit kernel") {
  auto qs = compute_coefficients(degenerate("1", "1", "1", "1"), rule32());
  const std::array<double, 6> expected{1, 2, 1, 1, 2, 1};
  for (int i = 0; i < 6; ++i) check_close(qs.coefficients()[i], expected[i], 1e-14);
  CHECK(qs.quad_order == 32);
  auto c = build_cubic(qs);
  check_close(c.mu0, 1, 1e-14);
  check_close(c.mu1, 1, 1e-14);
  check_close(c.mu2, -1, 1e-14);
  check_close(c.mu3, 1, 1e-14);
}

TEST_CASE("compute_coefficients: affine kernel against exact rationals") {
  using oracle::Poly;
  using oracle::Rational;
  // psi1 = 1, psi2 = t, phi1 = 1, phi2 = v.
  const Poly psi1{Rational(1)}, psi2{Rational(0), Rational(1)}, phi1{Rational(1)}, phi2{Rational(0), Rational(1)};
  auto integral = [](const oracle::Poly2& w, const Poly& x, const Poly& y) {
    return oracle::integrate_unit_square(w * oracle::in_u(x) * oracle::in_v(y));
  };
  auto sym = [&](const oracle::Poly2& w) {
    return oracle::integrate_unit_square(w * (oracle::in_u(psi1) * oracle::in_v(psi2) + oracle::in_u(psi2) * oracle::in_v(psi1)));
  };
  const auto w1 = oracle::in_u(phi1), w2 = oracle::in_v(phi2);
  const Rational a11 = integral(w1, psi1, psi1), a12 = sym(w1), a22 = integral(w1, psi2, psi2);
  const Rational b11 = integral(w2, psi1, psi1), b12 = sym(w2), b22 = integral(w2, psi2, psi2);
  CHECK(a11 == Rational(1));
  CHECK(a12 == Rational(1));
  CHECK(a22 == Rational(1, 4));
  CHECK(b11 == Rational(1, 2));
  CHECK(b12 == Rational(7, 12));
  CHECK(b22 == Rational(1, 6));

  auto qs = compute_coefficients(degenerate("1", "t", "1", "v"), rule32());
  const std::array<Rational, 6> exact{a11, a12, a22, b11, b12, b22};
  for (int i = 0; i < 6; ++i) check_close(qs.coefficients()[i], exact[i].value(), 1e-14);

  // 12 P3 = 6 x^3 - 5 x^2 - 10 x - 3
  auto c = build_cubic(qs);
  check_close(12 * c.mu0, 6, 1e-13);
  check_close(12 * c.mu1, -5, 1e-13);
  check_close(12 * c.mu2, -10, 1e-13);
  check_close(12 * c.mu3, 3, 1e-13);
}

TEST_CASE("compute_coefficients: exp kernel") {
  // psi1 = exp(t): a11 = (e - 1)^2
  auto qs = compute_coefficients(degenerate("exp(t)", "1", "1", "1"), rule32());
  const double em1 = std::exp(1.0) - 1;
  check_close(qs.a11, em1 * em1, 1e-14);
  check_close(qs.a12, 2 * em1, 1e-14);
  check_close(qs.a22, 1, 1e-14);
}

TEST_CASE("CaseLabel round-trips through its string form") {
  for (auto c : {CaseLabel::T41_i, CaseLabel::T41_ii, CaseLabel::T41_iii, CaseLabel::T41_iv, CaseLabel::T41_v,
                 CaseLabel::T42_i, CaseLabel::T42_ii, CaseLabel::Fallback3Roots, CaseLabel::FallbackNumeric})
    CHECK(parse_case_label(to_string(c)) == c);
  CHECK_FALSE(parse_case_label("T43").has_value());
}

TEST_CASE("classify: examples") {
  auto unit = classify({1, 1, -1, 1});
  CHECK(unit.matched_case == CaseLabel::T41_iii);
  CHECK(unit.predicted_count == 1);
  CHECK(unit.D == doctest::Approx(4));
  REQUIRE(unit.crit_alpha);
  CHECK(*unit.crit_alpha == doctest::Approx(-1).epsilon(1e-14));
  CHECK(*unit.crit_beta == doctest::Approx(1.0 / 3).epsilon(1e-14));

  auto neg_d = classify({1, 0, 3, 1});
  CHECK(neg_d.matched_case == CaseLabel::T41_i);
  CHECK(neg_d.D == doctest::Approx(-9));
  CHECK_FALSE(neg_d.crit_alpha.has_value());

  auto affine = classify({6, -5, -10, 3});
  CHECK(affine.matched_case == CaseLabel::T41_iii);
  CHECK(affine.predicted_count == 1);

  // Both critical points negative.
  CHECK(classify({1, 6, 9, 1}).matched_case == CaseLabel::T41_ii);
  // Critical points 1 and 2, P3(1) = 2.5 - mu3, P3(2) = 2 - mu3.
  CHECK(classify({1, -4.5, 6, 3}).matched_case == CaseLabel::T41_iv);
  CHECK(classify({1, -4.5, 6, 1}).matched_case == CaseLabel::T41_v);
  CHECK(classify({1, -4.5, 6, 2.2}).matched_case == CaseLabel::Fallback3Roots);
  // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
  auto three = classify({1, -6, 11, 6});
  CHECK(three.matched_case == CaseLabel::Fallback3Roots);
  CHECK(three.predicted_count == 3);
}

TEST_CASE("classify: precondition") {
  CHECK_THROWS_AS(classify({0, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(classify({1, 1, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(classify({1, 1, 1, -2}), std::invalid_argument);
}

TEST_CASE("classify and positive_roots: double roots at a critical point") {
  auto at_beta = double_root_at_beta(1.0, 2.0);
  auto r = classify(at_beta);
  CHECK(r.matched_case == CaseLabel::T42_ii);
  CHECK(r.predicted_count == 2);
  auto roots = positive_roots(at_beta);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].multiplicity == 1);
  CHECK(roots[1].multiplicity == 2);
  CHECK(roots[1].value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(at_beta(roots[0].value)) <= 1e-12);

  auto at_alpha = double_root_at_alpha(1.0, 2.0);
  auto s = classify(at_alpha);
  CHECK(s.matched_case == CaseLabel::T42_i);
  CHECK(s.predicted_count == 2);
  auto roots2 = positive_roots(at_alpha);
  REQUIRE(roots2.size() == 2);
  CHECK(roots2[0].multiplicity == 2);
  CHECK(roots2[0].value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(roots2[1].value > 2.0);
}

TEST_CASE("positive_roots: examples") {
  auto unit = positive_roots({1, 1, -1, 1});
  REQUIRE(unit.size() == 1);
  CHECK(unit[0].value == doctest::Approx(1.0).epsilon(1e-15));

  auto three = positive_roots({1, -6, 11, 6});
  REQUIRE(three.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(three[i].value == doctest::Approx(i + 1.0).epsilon(1e-14));

  auto affine = positive_roots({6, -5, -10, 3});
  REQUIRE(affine.size() == 1);
  CHECK(affine[0].value == doctest::Approx(1.8685170918213298).epsilon(1e-15));
}

TEST_CASE("property: roots agree with the closed-form oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-5, 5), pos(0.1, 5);
  for (int i = 0; i < 500; ++i) {
    CubicPolynomial c{pos(rng), coef(rng), coef(rng), pos(rng)};
    auto roots = positive_roots(c);
    auto report = classify(c);
    std::vector<double> expected;
    for (double x : oracle::cubic_real_roots(c.mu0, c.mu1, c.mu2, -c.mu3))
      if (x > 0) expected.push_back(x);
    REQUIRE(roots.size() == expected.size());
    CHECK(report.predicted_count == static_cast<int>(roots.size()));
    for (std::size_t k = 0; k < roots.size(); ++k) {
      CHECK(std::abs(roots[k].value - expected[k]) <= 1e-8 * (1 + expected[k]));
      CHECK(std::abs(c(roots[k].value)) <= 1e-10 * c.scale() * (1 + std::pow(roots[k].value, 3)));
    }
  }
}

TEST_CASE("reconstruct_plane_point") {
  QuadraticSystem unit{1, 2, 1, 1, 2, 1, 32};
  auto p = reconstruct_plane_point(unit, 1.0);
  CHECK(p.c1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.c2 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.residual <= 1e-15);
  auto m = unit.map(p.c1, p.c2);
  CHECK(m[0] == doctest::Approx(p.c1));
  CHECK(m[1] == doctest::Approx(p.c2));
  CHECK_THROWS_AS(reconstruct_plane_point(unit, 2.0), InconsistentRoot);
  CHECK_THROWS_AS(reconstruct_plane_point(unit, 2.0), NumericError);
}

TEST_CASE("reduce: affine kernel, frozen values") {
  auto r = reduce(degenerate("1", "t", "1", "v"), QuadratureRule::gauss_legendre(32));
  CHECK(r.classification.matched_case == CaseLabel::T41_iii);
  REQUIRE(r.fixed_points.size() == 1);
  const auto& fp = r.fixed_points[0];
  CHECK(fp.point.lambda == doctest::Approx(1.8685170918213298).epsilon(1e-14));
  CHECK(fp.point.c1 == doctest::Approx(0.62235918515234262).epsilon(1e-13));
  CHECK(fp.point.c2 == doctest::Approx(0.33307652783935759).epsilon(1e-13));
  auto g = h_fixed_point_from_L(fp);
  CHECK(g(0) == 1.0);
  CHECK(g(1) == doctest::Approx(1.53518375848799643).epsilon(1e-13));
  CHECK_FALSE(fp.f.describe().empty());
}

TEST_CASE("reduce: unit kernel gives f = 1/2 and g = 1") {
  auto fps = fixed_points_of_L(degenerate("1", "1", "1", "1"), rule32());
  REQUIRE(fps.size() == 1);
  for (double t : {0.0, 0.5, 1.0}) CHECK(fps[0].f(t) == doctest::Approx(0.5).epsilon(1e-14));
  auto g = h_fixed_point_from_L(fps[0]);
  for (double t : {0.0, 0.5, 1.0}) CHECK(g(t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("reduce: zero coefficient is rejected") {
  // psi2 = t vanishes only at a point, but phi2 = 0 kills the whole b-row.
  CHECK_THROWS_AS(reduce(degenerate("1", "1", "1", "0"), rule32()), KernelError);
}

TEST_CASE("property: separable cubics factor through -s2/s1") {
  // c_a = (∫phi_a f)(∫f) makes (s1 x + s2) a factor of P3, s_i = ∫psi_i.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(0.2, 3);
  for (int i = 0; i < 40; ++i) {
    char buf[4][96];
    double p[8];
    for (double& x : p) x = std::round(a(rng) * 1e6) / 1e6;  // exactly what %.6f prints
    std::snprintf(buf[0], sizeof buf[0], "%.6f + %.6f*t", p[0], p[1]);
    std::snprintf(buf[1], sizeof buf[1], "%.6f + %.6f*t^2", p[2], p[3]);
    std::snprintf(buf[2], sizeof buf[2], "%.6f + %.6f*u", p[4], p[5]);
    std::snprintf(buf[3], sizeof buf[3], "%.6f*exp(%.6f*v)", p[6], p[7]);
    auto k = degenerate(buf[0], buf[1], buf[2], buf[3]);
    auto r = reduce(k, rule32());
    const double s1 = p[0] + p[1] / 2, s2 = p[2] + p[3] / 3;
    CHECK(std::abs(r.cubic(-s2 / s1)) <= 1e-11 * r.cubic.scale() * (1 + std::pow(s2 / s1, 3)));
    CHECK(r.roots.size() == 1);
    CHECK(r.classification.predicted_count == 1);
  }
}
