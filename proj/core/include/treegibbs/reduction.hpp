#pragma once

// Exact reduction of the fixed-point problem for a separable kernel
//
//   (Lf)(t) = psi1(t) c1(f) + psi2(t) c2(f),
//   c1(f) = ∬ phi1(u) f(u) f(v),  c2(f) = ∬ phi2(v) f(u) f(v),
//
// to a quadratic map on the plane, then to a cubic in the ratio c1/c2.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treegibbs/kernel.hpp"
#include "treegibbs/quadrature.hpp"

namespace treegibbs {

/// c1 = a11 c1^2 + a12 c1 c2 + a22 c2^2,  c2 = b11 c1^2 + b12 c1 c2 + b22 c2^2.
/// The a-row carries the phi1-weighted integrals, the b-row the phi2-weighted ones.
struct QuadraticSystem {
  double a11 = 0, a12 = 0, a22 = 0;
  double b11 = 0, b12 = 0, b22 = 0;
  int quad_order = 0;

  std::array<double, 2> map(double c1, double c2) const {
    return {a11 * c1 * c1 + a12 * c1 * c2 + a22 * c2 * c2,
            b11 * c1 * c1 + b12 * c1 * c2 + b22 * c2 * c2};
  }
  std::array<double, 6> coefficients() const { return {a11, a12, a22, b11, b12, b22}; }
};

QuadraticSystem compute_coefficients(const DegenerateKernel& k, const QuadratureRule& rule);

/// P3(x) = mu0 x^3 + mu1 x^2 + mu2 x - mu3.
struct CubicPolynomial {
  double mu0 = 0, mu1 = 0, mu2 = 0, mu3 = 0;

  double operator()(double x) const { return ((mu0 * x + mu1) * x + mu2) * x - mu3; }
  double derivative(double x) const { return (3.0 * mu0 * x + 2.0 * mu1) * x + mu2; }
  /// max |mu_i|
  double scale() const;
};

/// Clears the ratio identity lambda = (a11 l^2 + a12 l + a22)/(b11 l^2 + b12 l + b22):
/// mu0 = b11, mu1 = b12 - a11, mu2 = b22 - a12, mu3 = a22.
CubicPolynomial build_cubic(const QuadraticSystem& qs);

enum class CaseLabel {
  T41_i,
  T41_ii,
  T41_iii,
  T41_iv,
  T41_v,
  T42_i,
  T42_ii,
  Fallback3Roots,
  FallbackNumeric,
};

std::string_view to_string(CaseLabel c) noexcept;
std::optional<CaseLabel> parse_case_label(std::string_view s) noexcept;

/// |P3(crit)| <= kZeroTolerance * scale counts as a root at a critical point.
inline constexpr double kZeroTolerance = 1e-9;

struct ClassificationReport {
  double D = 0;
  std::optional<double> crit_alpha, crit_beta;  // crit_alpha < crit_beta, present iff D > 0
  std::optional<double> p3_at_alpha, p3_at_beta;
  CaseLabel matched_case = CaseLabel::FallbackNumeric;
  int predicted_count = 0;
};

/// Requires mu0 > 0 and mu3 > 0 (throws std::invalid_argument otherwise).
ClassificationReport classify(const CubicPolynomial& c);

struct CubicRoot {
  double value = 0;
  int multiplicity = 1;  // 2 for a root at a critical point
};

/// All roots in (0, inf), ascending. Simple roots are bracketed on the
/// monotone pieces split at the critical points, bisected, then Newton
/// polished; a critical point where |P3| <= kZeroTolerance*scale is reported
/// once with multiplicity 2.
std::vector<CubicRoot> positive_roots(const CubicPolynomial& c, double tol = 1e-14);

struct PlaneFixedPoint {
  double lambda = 0;  // c1 / c2
  double c1 = 0, c2 = 0;
  double residual = 0;  // max |map(c) - c|
  bool corrected = false;
};

/// c2 = lambda / (a11 lambda^2 + a12 lambda + a22), c1 = lambda c2, followed
/// by at most one Newton step on map(c) = c. Throws InconsistentRoot if the
/// defect exceeds 1e-10 (1 + |c1| + |c2|).
PlaneFixedPoint reconstruct_plane_point(const QuadraticSystem& qs, double lambda);

/// f = c1 psi1 + c2 psi2, a fixed point of L.
struct SeparableFunction {
  DegenerateKernel kernel;
  double c1 = 0, c2 = 0;

  double operator()(double t) const { return c1 * kernel.psi1(t) + c2 * kernel.psi2(t); }
  std::string describe() const;
};

/// g = f / f(0), the normalized candidate fixed point of H. g(0) == 1.
struct NormalizedFunction {
  SeparableFunction f;
  double f_at_zero = 1;

  double operator()(double t) const { return f(t) / f_at_zero; }
  std::string describe() const;
};

struct LFixedPoint {
  PlaneFixedPoint point;
  int multiplicity = 1;
  SeparableFunction f;
};

struct ReductionResult {
  QuadraticSystem system;
  CubicPolynomial cubic;
  ClassificationReport classification;
  std::vector<CubicRoot> roots;
  std::vector<LFixedPoint> fixed_points;
};

/// compute_coefficients -> build_cubic -> classify -> positive_roots ->
/// reconstruct_plane_point, one entry per distinct positive root.
/// Throws KernelError if any of the six coefficients is not strictly positive.
ReductionResult reduce(const DegenerateKernel& k, const QuadratureRule& rule, double tol = 1e-14);

std::vector<LFixedPoint> fixed_points_of_L(const DegenerateKernel& k, const QuadratureRule& rule,
                                           double tol = 1e-14);

/// Throws NumericError if f(0) <= 0.
NormalizedFunction h_fixed_point_from_L(const LFixedPoint& entry);

}  // namespace treegibbs
