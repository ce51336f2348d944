#pragma once

// Nyström discretization of the quadratic operators
//
//   (Lf)(t) = ∬ K(t,u,v) f(u) f(v) du dv,      (Hf)(t) = (Lf)(t) / (Lf)(0),
//
// on a Gauss-Legendre grid, and a multistart Picard solver for Hf = f. The
// t = 0 row of the kernel is tabulated exactly; 0 is never a grid node.

#include <cstdint>
#include <span>
#include <vector>

#include "treegibbs/kernel.hpp"
#include "treegibbs/quadrature.hpp"

namespace treegibbs {

/// Positive function sampled at the rule's nodes plus its value at t = 0.
struct GridFunction {
  QuadratureRule rule;
  std::vector<double> values;
  double origin = 1.0;

  template <class F>
  static GridFunction sample(const QuadratureRule& rule, F&& f) {
    GridFunction g{rule, {}, f(0.0)};
    g.values.reserve(rule.order());
    for (double x : rule.nodes()) g.values.push_back(f(x));
    return g;
  }

  static GridFunction constant(const QuadratureRule& rule, double c) {
    return {rule, std::vector<double>(rule.order(), c), c};
  }

  /// Throws NumericError unless sizes match and every value is finite and > 0.
  void validate() const;

  GridFunction scaled(double c) const;
};

/// max_i |a(t_i) - b(t_i)| over the grid nodes.
double sup_distance(const GridFunction& a, const GridFunction& b);

class DiscreteOperator {
 public:
  /// Tabulates K on (nodes ∪ {0}) x nodes x nodes. Throws RangeError (or the
  /// expression error) on a non-finite kernel value.
  DiscreteOperator(const Kernel& kernel, QuadratureRule rule);

  const QuadratureRule& rule() const noexcept { return rule_; }

  /// origin of the result is (Lf)(0).
  GridFunction apply_L(const GridFunction& f) const;
  /// Lf / (Lf)(0); origin of the result is exactly 1.
  GridFunction apply_H(const GridFunction& f) const;

 private:
  double row_sum(std::size_t row, std::span<const double> wf) const;

  QuadratureRule rule_;
  std::size_t n_;
  std::vector<double> table_;  // [(row * n + j) * n + k], row n is t = 0
};

GridFunction apply_L(const Kernel& kernel, const GridFunction& f);
GridFunction apply_H(const Kernel& kernel, const GridFunction& f);

struct EigenCheck {
  double lambda = 0;      // (Lf)(0)
  double defect_sup = 0;  // max_i |(Lf)(t_i) - lambda f(t_i)/f(0)|
};

EigenCheck eigen_check(const DiscreteOperator& op, const GridFunction& f);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  double damping = 1.0;  // f <- (1-damping) f + damping Hf, in (0,1]
};

struct SolveResult {
  GridFunction solution;
  int iterations = 0;
  double residual_sup = 0;  // sup |H(solution) - solution|
  bool converged = false;
  double eigenvalue_lambda = 0;  // (L solution)(0)
  double eigen_defect = 0;
};

/// Picard iteration; throws std::invalid_argument on bad options. The returned solution is the k-th iterate (k >= 1) and
/// residual_sup its own H-defect, so converged implies residual_sup <= tol.
SolveResult iterate_H(const DiscreteOperator& op, const GridFunction& f0, const SolveOptions& opts = {});

struct MultistartOptions {
  SolveOptions solve;
  int n_starts = 16;
  std::uint64_t seed = 0;
  double cluster_eps = 1e-4;
  int perturbations_per_seed = 2;
  double seed_perturbation = 1e-9;  // relative
};

enum class StartKind { random, seeded };

struct StartRecord {
  int index = 0;
  StartKind kind = StartKind::random;
  bool converged = false;
  int iterations = 0;
  double residual_sup = 0;
  int cluster = -1;
};

struct SolutionCluster {
  SolveResult representative;  // smallest residual among members
  int representative_start = 0;
  int random_hits = 0;
  int seeded_hits = 0;
};

struct MultistartResult {
  std::vector<SolutionCluster> clusters;  // sorted by value at the first node
  std::vector<StartRecord> starts;
  int nonconverged = 0;
};

/// Log-uniform values in [0.1, 10] from a stream determined by (seed, index).
GridFunction random_start(const QuadratureRule& rule, std::uint64_t seed, int index);

/// Runs n_starts random starts, then perturbations of each seed function, and
/// clusters converged results by sup distance <= cluster_eps. Deterministic.
MultistartResult multistart_solve(const DiscreteOperator& op, const MultistartOptions& opts,
                                  std::span<const GridFunction> seeds = {});

/// As above; for a degenerate kernel the seeds are the analytic H fixed
/// points from the reduction pipeline (skipped if that pipeline fails).
MultistartResult multistart_solve(const Kernel& kernel, const QuadratureRule& rule,
                                  const MultistartOptions& opts);

}  // namespace treegibbs
