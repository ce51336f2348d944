#include "treegibbs/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace treegibbs {

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  if (n == 0) return {1.0, 0.0};
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule QuadratureRule::gauss_legendre(int order) {
  if (order < 1 || order > kMaxOrder)
    throw std::invalid_argument("quadrature order must be in [1, " + std::to_string(kMaxOrder) +
                                "], got " + std::to_string(order));

  auto data = std::make_shared<Data>();
  data->nodes.resize(order);
  data->weights.resize(order);

  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // i-th largest root of P_n on [-1,1]; Chebyshev-type initial estimate.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre(order, x);
      dp = d;
      double dx = p / d;
      x -= dx;
      if (std::fabs(dx) <= 1e-15) break;
    }
    const bool middle = (order % 2 == 1) && (i == half - 1);
    if (middle) {
      x = 0.0;
      dp = legendre(order, 0.0).second;
    } else {
      dp = legendre(order, x).second;
    }
    // Weight on [-1,1] is 2/((1-x^2) P'(x)^2); the affine map to [0,1] halves it.
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    data->nodes[i] = 0.5 * (1.0 - x);
    data->nodes[order - 1 - i] = 0.5 * (1.0 + x);
    data->weights[i] = w;
    data->weights[order - 1 - i] = w;
  }
  return QuadratureRule(std::move(data));
}

namespace detail {

void throw_nonfinite_node(double x) {
  throw NumericError("non-finite integrand at node x=" + std::to_string(x));
}

void throw_nonfinite_node(double x, double y) {
  throw NumericError("non-finite integrand at node (" + std::to_string(x) + ", " +
                     std::to_string(y) + ")");
}

}  // namespace detail
}  // namespace treegibbs
