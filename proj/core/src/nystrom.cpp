#include "treegibbs/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "treegibbs/error.hpp"
#include "treegibbs/reduction.hpp"

namespace treegibbs {

void GridFunction::validate() const {
  if (values.size() != static_cast<std::size_t>(rule.order()))
    throw NumericError("grid function has " + std::to_string(values.size()) + " values for a rule of order " +
                       std::to_string(rule.order()));
  for (double x : values)
    if (!std::isfinite(x) || !(x > 0.0)) throw NumericError("grid function must be positive and finite");
  if (!std::isfinite(origin) || !(origin > 0.0))
    throw NumericError("grid function must be positive and finite at t=0");
}

GridFunction GridFunction::scaled(double c) const {
  GridFunction g = *this;
  for (double& x : g.values) x *= c;
  g.origin *= c;
  return g;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::fabs(a.values[i] - b.values[i]));
  return d;
}

DiscreteOperator::DiscreteOperator(const Kernel& kernel, QuadratureRule rule)
    : rule_(std::move(rule)), n_(static_cast<std::size_t>(rule_.order())) {
  table_.resize((n_ + 1) * n_ * n_);
  for (std::size_t row = 0; row <= n_; ++row) {
    const double t = row < n_ ? rule_.node(row) : 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k) {
        double value = evaluate_kernel(kernel, t, rule_.node(j), rule_.node(k));
        if (!std::isfinite(value)) throw RangeError("non-finite kernel value in operator table");
        table_[(row * n_ + j) * n_ + k] = value;
      }
  }
}

double DiscreteOperator::row_sum(std::size_t row, std::span<const double> wf) const {
  const double* block = table_.data() + row * n_ * n_;
  double sum = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    const double* line = block + j * n_;
    double inner = 0.0;
    for (std::size_t k = 0; k < n_; ++k) inner += line[k] * wf[k];
    sum += wf[j] * inner;
  }
  return sum;
}

GridFunction DiscreteOperator::apply_L(const GridFunction& f) const {
  if (!(f.rule == rule_)) throw NumericError("grid function and operator use different rules");
  f.validate();
  std::vector<double> wf(n_);
  for (std::size_t k = 0; k < n_; ++k) wf[k] = rule_.weight(k) * f.values[k];

  GridFunction out{rule_, std::vector<double>(n_), row_sum(n_, wf)};
  for (std::size_t i = 0; i < n_; ++i) out.values[i] = row_sum(i, wf);
  for (double x : out.values)
    if (!std::isfinite(x)) throw RangeError("non-finite value of Lf");
  if (!std::isfinite(out.origin)) throw RangeError("non-finite value of Lf at t=0");
  return out;
}

GridFunction DiscreteOperator::apply_H(const GridFunction& f) const {
  GridFunction lf = apply_L(f);
  if (!(lf.origin > 0.0)) throw NumericError("(Lf)(0) vanishes");
  const double denom = lf.origin;
  for (double& x : lf.values) x /= denom;
  lf.origin = denom / denom;
  return lf;
}

GridFunction apply_L(const Kernel& kernel, const GridFunction& f) {
  return DiscreteOperator(kernel, f.rule).apply_L(f);
}

GridFunction apply_H(const Kernel& kernel, const GridFunction& f) {
  return DiscreteOperator(kernel, f.rule).apply_H(f);
}

namespace {

EigenCheck eigen_from(const GridFunction& f, const GridFunction& lf) {
  EigenCheck e;
  e.lambda = lf.origin;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    e.defect_sup = std::max(e.defect_sup, std::fabs(lf.values[i] - e.lambda * f.values[i] / f.origin));
  return e;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

EigenCheck eigen_check(const DiscreteOperator& op, const GridFunction& f) {
  return eigen_from(f, op.apply_L(f));
}

SolveResult iterate_H(const DiscreteOperator& op, const GridFunction& f0, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw std::invalid_argument("damping must be in (0,1]");
  f0.validate();

  const double theta = opts.damping;
  auto step = [&](const GridFunction& f, const GridFunction& hf) {
    if (theta == 1.0) return hf;
    GridFunction g = f;
    for (std::size_t i = 0; i < g.values.size(); ++i)
      g.values[i] = (1.0 - theta) * f.values[i] + theta * hf.values[i];
    g.origin = (1.0 - theta) * f.origin + theta * hf.origin;
    return g;
  };

  SolveResult r{f0};
  GridFunction f = f0;
  GridFunction lf = op.apply_L(f);
  for (int k = 1;; ++k) {
    GridFunction hf = lf;
    for (double& x : hf.values) x /= lf.origin;
    hf.origin = 1.0;
    f = step(f, hf);
    try {
      lf = op.apply_L(f);
    } catch (const Error&) {
      r.solution = f;
      r.iterations = k;
      r.residual_sup = std::numeric_limits<double>::infinity();
      return r;
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      residual = std::max(residual, std::fabs(lf.values[i] / lf.origin - f.values[i]));

    r.iterations = k;
    r.residual_sup = residual;
    if (residual <= opts.tol || k >= opts.max_iter || !std::isfinite(residual)) {
      r.converged = residual <= opts.tol;
      r.solution = f;
      auto e = eigen_from(f, lf);
      r.eigenvalue_lambda = e.lambda;
      r.eigen_defect = e.defect_sup;
      return r;
    }
  }
}

GridFunction random_start(const QuadratureRule& rule, std::uint64_t seed, int index) {
  auto rng = stream(seed, static_cast<std::uint64_t>(index));
  const double lo = std::log(0.1), span = std::log(10.0) - std::log(0.1);
  GridFunction g{rule, std::vector<double>(rule.order()), 1.0};
  for (double& x : g.values) x = std::exp(lo + span * unit_uniform(rng));
  g.origin = std::exp(lo + span * unit_uniform(rng));
  return g;
}

MultistartResult multistart_solve(const DiscreteOperator& op, const MultistartOptions& opts,
                                  std::span<const GridFunction> seeds) {
  if (opts.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  if (!(opts.cluster_eps > 0.0)) throw std::invalid_argument("cluster_eps must be > 0");

  std::vector<GridFunction> starts;
  std::vector<StartKind> kinds;
  for (int i = 0; i < opts.n_starts; ++i) {
    starts.push_back(random_start(op.rule(), opts.seed, i));
    kinds.push_back(StartKind::random);
  }
  int stream_index = opts.n_starts;
  for (const auto& s : seeds) {
    for (int p = 0; p < opts.perturbations_per_seed; ++p) {
      auto rng = stream(opts.seed, static_cast<std::uint64_t>(stream_index++));
      GridFunction g = s;
      for (double& x : g.values) x *= 1.0 + opts.seed_perturbation * (2.0 * unit_uniform(rng) - 1.0);
      starts.push_back(std::move(g));
      kinds.push_back(StartKind::seeded);
    }
  }

  MultistartResult out;
  std::vector<SolveResult> anchors;  // first member of each cluster
  for (std::size_t i = 0; i < starts.size(); ++i) {
    SolveResult res = iterate_H(op, starts[i], opts.solve);
    StartRecord rec{static_cast<int>(i), kinds[i], res.converged, res.iterations, res.residual_sup, -1};
    if (!res.converged) {
      ++out.nonconverged;
      out.starts.push_back(rec);
      continue;
    }
    std::size_t c = 0;
    while (c < anchors.size() && sup_distance(anchors[c].solution, res.solution) > opts.cluster_eps) ++c;
    if (c == anchors.size()) {
      anchors.push_back(res);
      out.clusters.push_back({res, static_cast<int>(i), 0, 0});
    } else if (res.residual_sup < out.clusters[c].representative.residual_sup) {
      out.clusters[c].representative = res;
      out.clusters[c].representative_start = static_cast<int>(i);
    }
    (kinds[i] == StartKind::random ? out.clusters[c].random_hits : out.clusters[c].seeded_hits)++;
    rec.cluster = static_cast<int>(c);
    out.starts.push_back(rec);
  }

  std::vector<std::size_t> order(out.clusters.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.clusters[a].representative.solution.values.front() <
           out.clusters[b].representative.solution.values.front();
  });
  std::vector<int> relabel(order.size());
  std::vector<SolutionCluster> sorted;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    relabel[order[pos]] = static_cast<int>(pos);
    sorted.push_back(std::move(out.clusters[order[pos]]));
  }
  out.clusters = std::move(sorted);
  for (auto& s : out.starts)
    if (s.cluster >= 0) s.cluster = relabel[static_cast<std::size_t>(s.cluster)];
  return out;
}

MultistartResult multistart_solve(const Kernel& kernel, const QuadratureRule& rule,
                                  const MultistartOptions& opts) {
  DiscreteOperator op(kernel, rule);
  std::vector<GridFunction> seeds;
  if (const auto* dk = std::get_if<DegenerateKernel>(&kernel)) {
    try {
      for (const auto& entry : fixed_points_of_L(*dk, rule)) {
        auto g = h_fixed_point_from_L(entry);
        seeds.push_back(GridFunction::sample(rule, g));
      }
    } catch (const Error&) {
      seeds.clear();
    }
  }
  return multistart_solve(op, opts, seeds);
}

}  // namespace treegibbs
