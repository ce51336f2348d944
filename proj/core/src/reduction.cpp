#include "treegibbs/reduction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "treegibbs/error.hpp"

namespace treegibbs {

namespace {

std::vector<double> tabulate(const QuadratureRule& rule, double (DegenerateKernel::*component)(double) const,
                             const DegenerateKernel& k) {
  std::vector<double> out;
  out.reserve(rule.order());
  for (double x : rule.nodes()) {
    const double y = (k.*component)(x);
    if (!std::isfinite(y)) detail::throw_nonfinite_node(x);
    out.push_back(y);
  }
  return out;
}

// integrate_2d over the nodes by index, f(i, j) with i the u-node, j the v-node.
template <class F>
double tensor_sum(const QuadratureRule& rule, F&& f) {
  const auto n = static_cast<std::size_t>(rule.order());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double fij = f(i, j);
      if (!std::isfinite(fij)) detail::throw_nonfinite_node(rule.node(i), rule.node(j));
      row += rule.weight(j) * fij;
    }
    sum += rule.weight(i) * row;
  }
  return sum;
}

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

int sign_with_tolerance(double x, double tol) {
  if (std::fabs(x) <= tol) return 0;
  return x > 0 ? 1 : -1;
}

double bisect_and_polish(const CubicPolynomial& c, double lo, double hi, double tol) {
  const double target = tol * c.scale();
  double flo = c(lo);
  for (int it = 0; it < 400; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = c(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (std::fabs(fm) <= target && hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  double x = 0.5 * (lo + hi);
  // Newton polish, kept only while it improves the residual inside the bracket.
  for (int it = 0; it < 4; ++it) {
    double d = c.derivative(x);
    if (d == 0.0) break;
    double next = x - c(x) / d;
    if (!(next >= lo && next <= hi) || std::fabs(c(next)) >= std::fabs(c(x))) break;
    x = next;
  }
  return x;
}

}  // namespace

QuadraticSystem compute_coefficients(const DegenerateKernel& k, const QuadratureRule& rule) {
  const auto psi1 = tabulate(rule, &DegenerateKernel::psi1, k);
  const auto psi2 = tabulate(rule, &DegenerateKernel::psi2, k);
  const auto phi1 = tabulate(rule, &DegenerateKernel::phi1, k);
  const auto phi2 = tabulate(rule, &DegenerateKernel::phi2, k);

  QuadraticSystem qs;
  qs.quad_order = rule.order();
  qs.a11 = tensor_sum(rule, [&](auto u, auto v) { return phi1[u] * psi1[u] * psi1[v]; });
  qs.a12 = tensor_sum(rule, [&](auto u, auto v) { return phi1[u] * (psi1[u] * psi2[v] + psi2[u] * psi1[v]); });
  qs.a22 = tensor_sum(rule, [&](auto u, auto v) { return phi1[u] * psi2[u] * psi2[v]; });
  qs.b11 = tensor_sum(rule, [&](auto u, auto v) { return phi2[v] * psi1[u] * psi1[v]; });
  qs.b12 = tensor_sum(rule, [&](auto u, auto v) { return phi2[v] * (psi1[u] * psi2[v] + psi2[u] * psi1[v]); });
  qs.b22 = tensor_sum(rule, [&](auto u, auto v) { return phi2[v] * psi2[u] * psi2[v]; });
  return qs;
}

double CubicPolynomial::scale() const {
  return std::max({std::fabs(mu0), std::fabs(mu1), std::fabs(mu2), std::fabs(mu3)});
}

CubicPolynomial build_cubic(const QuadraticSystem& qs) {
  return {qs.b11, qs.b12 - qs.a11, qs.b22 - qs.a12, qs.a22};
}

std::string_view to_string(CaseLabel c) noexcept {
  switch (c) {
    case CaseLabel::T41_i: return "T41-i";
    case CaseLabel::T41_ii: return "T41-ii";
    case CaseLabel::T41_iii: return "T41-iii";
    case CaseLabel::T41_iv: return "T41-iv";
    case CaseLabel::T41_v: return "T41-v";
    case CaseLabel::T42_i: return "T42-i";
    case CaseLabel::T42_ii: return "T42-ii";
    case CaseLabel::Fallback3Roots: return "FALLBACK-3ROOTS";
    case CaseLabel::FallbackNumeric: return "FALLBACK-NUMERIC";
  }
  return "?";
}

std::optional<CaseLabel> parse_case_label(std::string_view s) noexcept {
  for (auto c : {CaseLabel::T41_i, CaseLabel::T41_ii, CaseLabel::T41_iii, CaseLabel::T41_iv,
                 CaseLabel::T41_v, CaseLabel::T42_i, CaseLabel::T42_ii, CaseLabel::Fallback3Roots,
                 CaseLabel::FallbackNumeric})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

namespace {

// Roots of P3'(x) = 3 mu0 x^2 + 2 mu1 x + mu2, ascending; requires D > 0.
std::pair<double, double> critical_points(const CubicPolynomial& c, double D) {
  const double sq = std::sqrt(D);
  const double q = -(c.mu1 + std::copysign(sq, c.mu1));
  double r1 = q / (3.0 * c.mu0);
  double r2 = q != 0.0 ? c.mu2 / q : -r1;
  return {std::min(r1, r2), std::max(r1, r2)};
}

void require_positive_ends(const CubicPolynomial& c) {
  if (!(c.mu0 > 0.0) || !(c.mu3 > 0.0))
    throw std::invalid_argument("cubic requires mu0 > 0 and mu3 > 0");
}

}  // namespace

ClassificationReport classify(const CubicPolynomial& c) {
  require_positive_ends(c);
  ClassificationReport r;
  r.D = c.mu1 * c.mu1 - 3.0 * c.mu0 * c.mu2;
  if (r.D <= 0.0) {
    r.matched_case = CaseLabel::T41_i;
    r.predicted_count = 1;
    return r;
  }
  auto [alpha, beta] = critical_points(c, r.D);
  r.crit_alpha = alpha;
  r.crit_beta = beta;
  r.p3_at_alpha = c(alpha);
  r.p3_at_beta = c(beta);

  const double ztol = kZeroTolerance * c.scale();
  const int sa = sign_with_tolerance(*r.p3_at_alpha, ztol);
  const int sb = sign_with_tolerance(*r.p3_at_beta, ztol);

  auto set = [&](CaseLabel label, int count) {
    r.matched_case = label;
    r.predicted_count = count;
    return r;
  };
  if (beta <= 0.0) return set(CaseLabel::T41_ii, 1);
  if (alpha <= 0.0) return set(CaseLabel::T41_iii, 1);
  if (sa < 0) return set(CaseLabel::T41_iv, 1);
  if (sa > 0 && sb > 0) return set(CaseLabel::T41_v, 1);
  if (sa == 0 && sb < 0) return set(CaseLabel::T42_i, 2);
  if (sa > 0 && sb == 0) return set(CaseLabel::T42_ii, 2);
  if (sa > 0 && sb < 0) return set(CaseLabel::Fallback3Roots, 3);
  return set(CaseLabel::FallbackNumeric, static_cast<int>(positive_roots(c).size()));
}

std::vector<CubicRoot> positive_roots(const CubicPolynomial& c, double tol) {
  require_positive_ends(c);
  const double ztol = kZeroTolerance * c.scale();
  const double bound = 1.0 + (std::fabs(c.mu1) + std::fabs(c.mu2) + c.mu3) / c.mu0;

  struct Break {
    double x;
    int sign;
  };
  std::vector<Break> breaks{{0.0, -1}};
  const double D = c.mu1 * c.mu1 - 3.0 * c.mu0 * c.mu2;
  if (D > 0.0) {
    auto [alpha, beta] = critical_points(c, D);
    for (double x : {alpha, beta})
      if (x > 0.0 && x < bound) breaks.push_back({x, sign_with_tolerance(c(x), ztol)});
  }
  breaks.push_back({bound, 1});

  std::vector<CubicRoot> roots;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const auto& a = breaks[i];
    const auto& b = breaks[i + 1];
    if (a.sign * b.sign < 0) roots.push_back({bisect_and_polish(c, a.x, b.x, tol), 1});
  }
  for (std::size_t i = 1; i + 1 < breaks.size(); ++i)
    if (breaks[i].sign == 0) roots.push_back({breaks[i].x, 2});
  std::sort(roots.begin(), roots.end(),
            [](const CubicRoot& x, const CubicRoot& y) { return x.value < y.value; });
  return roots;
}

PlaneFixedPoint reconstruct_plane_point(const QuadraticSystem& qs, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InconsistentRoot("ratio must be positive and finite");
  const double q = (qs.a11 * lambda + qs.a12) * lambda + qs.a22;
  PlaneFixedPoint p;
  p.lambda = lambda;
  p.c2 = lambda / q;
  p.c1 = lambda * p.c2;

  auto defect = [&](double c1, double c2) {
    auto m = qs.map(c1, c2);
    return std::array<double, 2>{m[0] - c1, m[1] - c2};
  };
  auto residual = [](const std::array<double, 2>& d) {
    return std::max(std::fabs(d[0]), std::fabs(d[1]));
  };
  auto limit = [&] { return 1e-10 * (1.0 + std::fabs(p.c1) + std::fabs(p.c2)); };

  auto d = defect(p.c1, p.c2);
  p.residual = residual(d);
  if (p.residual > limit()) {
    // One Newton step on map(c) - c = 0.
    const double j11 = 2 * qs.a11 * p.c1 + qs.a12 * p.c2 - 1.0;
    const double j12 = qs.a12 * p.c1 + 2 * qs.a22 * p.c2;
    const double j21 = 2 * qs.b11 * p.c1 + qs.b12 * p.c2;
    const double j22 = qs.b12 * p.c1 + 2 * qs.b22 * p.c2 - 1.0;
    const double det = j11 * j22 - j12 * j21;
    if (det != 0.0 && std::isfinite(det)) {
      const double dc1 = (d[0] * j22 - d[1] * j12) / det;
      const double dc2 = (j11 * d[1] - j21 * d[0]) / det;
      p.c1 -= dc1;
      p.c2 -= dc2;
      p.corrected = true;
      if (p.c1 > 0.0 && p.c2 > 0.0) p.lambda = p.c1 / p.c2;
      p.residual = residual(defect(p.c1, p.c2));
    }
  }
  if (!(p.residual <= limit()) || !(p.c1 > 0.0) || !(p.c2 > 0.0))
    throw InconsistentRoot("ratio " + shortest(lambda) + " is not a root of the reduced cubic (defect " +
                           shortest(p.residual) + ")");
  return p;
}

std::string SeparableFunction::describe() const {
  return shortest(c1) + " * (" + expr::pretty(kernel.psi1_ast()) + ") + " + shortest(c2) + " * (" +
         expr::pretty(kernel.psi2_ast()) + ")";
}

std::string NormalizedFunction::describe() const {
  return "(" + f.describe() + ") / " + shortest(f_at_zero);
}

ReductionResult reduce(const DegenerateKernel& k, const QuadratureRule& rule, double tol) {
  ReductionResult r;
  r.system = compute_coefficients(k, rule);
  static constexpr const char* kNames[] = {"a11", "a12", "a22", "b11", "b12", "b22"};
  auto coeffs = r.system.coefficients();
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (!(coeffs[i] > 0.0))
      throw KernelError(std::string("reduced coefficient ") + kNames[i] + " = " + shortest(coeffs[i]) +
                        " is not positive");
  r.cubic = build_cubic(r.system);
  r.classification = classify(r.cubic);
  r.roots = positive_roots(r.cubic, tol);
  for (const auto& root : r.roots) {
    LFixedPoint entry{reconstruct_plane_point(r.system, root.value), root.multiplicity,
                      SeparableFunction{k, 0.0, 0.0}};
    entry.f.c1 = entry.point.c1;
    entry.f.c2 = entry.point.c2;
    r.fixed_points.push_back(std::move(entry));
  }
  return r;
}

std::vector<LFixedPoint> fixed_points_of_L(const DegenerateKernel& k, const QuadratureRule& rule,
                                           double tol) {
  return reduce(k, rule, tol).fixed_points;
}

NormalizedFunction h_fixed_point_from_L(const LFixedPoint& entry) {
  const double f0 = entry.f(0.0);
  if (!(f0 > 0.0) || !std::isfinite(f0))
    throw NumericError("fixed point of L is not positive at t=0");
  return {entry.f, f0};
}

}  // namespace treegibbs
