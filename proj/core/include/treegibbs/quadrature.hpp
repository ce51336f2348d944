#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "treegibbs/error.hpp"

namespace treegibbs {

/// Gauss-Legendre rule on [0,1]. Weights sum to one (Lebesgue measure of the
/// unit interval). Copies share storage.
class QuadratureRule {
 public:
  static constexpr int kMaxOrder = 512;

  /// Throws std::invalid_argument unless 1 <= order <= kMaxOrder.
  static QuadratureRule gauss_legendre(int order);

  int order() const noexcept { return static_cast<int>(data_->nodes.size()); }
  std::span<const double> nodes() const noexcept { return data_->nodes; }
  std::span<const double> weights() const noexcept { return data_->weights; }
  double node(std::size_t i) const { return data_->nodes[i]; }
  double weight(std::size_t i) const { return data_->weights[i]; }

  friend bool operator==(const QuadratureRule& a, const QuadratureRule& b) {
    return a.data_ == b.data_ || (a.data_->nodes == b.data_->nodes && a.data_->weights == b.data_->weights);
  }

 private:
  struct Data {
    std::vector<double> nodes;
    std::vector<double> weights;
  };
  explicit QuadratureRule(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

namespace detail {
[[noreturn]] void throw_nonfinite_node(double x);
[[noreturn]] void throw_nonfinite_node(double x, double y);
}  // namespace detail

/// Sum of w_i f(x_i). Throws NumericError naming the node on a non-finite
/// integrand value.
template <class F>
double integrate_1d(F&& f, const QuadratureRule& rule) {
  double sum = 0.0;
  for (int i = 0; i < rule.order(); ++i) {
    const double x = rule.node(i);
    const double fx = f(x);
    if (!std::isfinite(fx)) detail::throw_nonfinite_node(x);
    sum += rule.weight(i) * fx;
  }
  return sum;
}

/// Tensor-product sum of w_i w_j f(x_i, x_j).
template <class F>
double integrate_2d(F&& f, const QuadratureRule& rule) {
  double sum = 0.0;
  for (int i = 0; i < rule.order(); ++i) {
    const double x = rule.node(i);
    double row = 0.0;
    for (int j = 0; j < rule.order(); ++j) {
      const double y = rule.node(j);
      const double fxy = f(x, y);
      if (!std::isfinite(fxy)) detail::throw_nonfinite_node(x, y);
      row += rule.weight(j) * fxy;
    }
    sum += rule.weight(i) * row;
  }
  return sum;
}

}  // namespace treegibbs
