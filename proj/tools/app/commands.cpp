#include "app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace treegibbs::app {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

constexpr int kPositivityProbes = 101;

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

DegenerateKernel require_degenerate(const RunConfig& cfg, const char* command) {
  Kernel k = build_kernel(cfg);
  if (!std::holds_alternative<DegenerateKernel>(k))
    throw ConfigError("kernel", std::string(command) + " requires a degenerate kernel");
  return std::get<DegenerateKernel>(std::move(k));
}

// Admissible: every component finite and >= 0 on the probe grid. Strict
// positivity is reported but not required; the six reduced coefficients must
// still come out positive (checked by reduce_checked).
PositivityDiagnostics require_admissible(const DegenerateKernel& k) {
  auto diag = validate_positive(k, kPositivityProbes);
  if (!diag.nonnegative) {
    std::string reason;
    for (const auto& c : diag.components) {
      if (!c.finite) {
        reason = c.name + " fails to evaluate at " + format_number(c.min_location) + ": " + c.error;
        break;
      }
      if (!(c.min_value >= 0.0)) {
        reason = c.name + " has minimum " + format_number(c.min_value) + " at " + format_number(c.min_location);
        break;
      }
    }
    throw ConfigError("kernel.degenerate", "positivity validation failed: " + reason);
  }
  return diag;
}

ReductionResult reduce_checked(const DegenerateKernel& k, const QuadratureRule& rule) {
  try {
    return reduce(k, rule);
  } catch (const KernelError& e) {
    throw ConfigError("kernel.degenerate", e.what());
  }
}

MultistartOptions multistart_options(const NumericsConfig& n) {
  MultistartOptions o;
  o.solve.tol = n.tol;
  o.solve.max_iter = n.max_iter;
  o.solve.damping = n.damping;
  o.n_starts = n.n_starts;
  o.seed = n.seed;
  o.cluster_eps = n.cluster_eps;
  return o;
}

std::vector<GridFunction> analytic_grid(const ReductionResult& r, const QuadratureRule& rule) {
  std::vector<GridFunction> out;
  for (const auto& entry : r.fixed_points) out.push_back(GridFunction::sample(rule, h_fixed_point_from_L(entry)));
  return out;
}

json positivity_json(const PositivityDiagnostics& d) {
  return {{"strictly_positive", d.pass},
          {"nonnegative", d.nonnegative},
          {"min_value", d.min_value},
          {"min_location", d.min_location},
          {"min_component", d.min_component}};
}

json system_json(const QuadraticSystem& qs) {
  return {{"a11", qs.a11}, {"a12", qs.a12}, {"a22", qs.a22},           {"b11", qs.b11},
          {"b12", qs.b12}, {"b22", qs.b22}, {"quad_order", qs.quad_order}};
}

json cubic_json(const CubicPolynomial& c) {
  return {{"mu0", c.mu0}, {"mu1", c.mu1}, {"mu2", c.mu2}, {"mu3", c.mu3}};
}

json classification_json(const ClassificationReport& r) {
  return {{"D", r.D},
          {"crit_alpha", optional_number(r.crit_alpha)},
          {"crit_beta", optional_number(r.crit_beta)},
          {"p3_at_alpha", optional_number(r.p3_at_alpha)},
          {"p3_at_beta", optional_number(r.p3_at_beta)},
          {"case", std::string(to_string(r.matched_case))},
          {"predicted_count", r.predicted_count}};
}

json roots_json(const std::vector<CubicRoot>& roots) {
  json arr = json::array();
  for (const auto& r : roots) arr.push_back({{"value", r.value}, {"multiplicity", r.multiplicity}});
  return arr;
}

json cluster_json(const SolutionCluster& c) {
  const auto& s = c.representative;
  return {{"values", s.solution.values},
          {"iterations", s.iterations},
          {"residual_sup", s.residual_sup},
          {"eigenvalue_lambda", s.eigenvalue_lambda},
          {"eigen_defect", s.eigen_defect},
          {"representative_start", c.representative_start},
          {"random_hits", c.random_hits},
          {"seeded_hits", c.seeded_hits}};
}

json oracle_json(const MultistartResult& m, const QuadratureRule& rule) {
  json clusters = json::array();
  for (const auto& c : m.clusters) clusters.push_back(cluster_json(c));
  return {{"nodes", std::vector<double>(rule.nodes().begin(), rule.nodes().end())},
          {"clusters", clusters},
          {"starts", m.starts.size()},
          {"nonconverged", m.nonconverged}};
}

struct Matching {
  std::vector<int> oracle_index;  // per analytic solution, -1 if unmatched
  std::vector<double> distance;
  bool agreement = false;
};

Matching match_solutions(const std::vector<GridFunction>& analytic, const MultistartResult& m) {
  Matching out;
  std::vector<bool> used(m.clusters.size(), false);
  bool all = true;
  for (const auto& g : analytic) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.clusters.size(); ++j) {
      double d = sup_distance(g, m.clusters[j].representative.solution);
      if (!used[j] && d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0 && best_d <= kAgreementTolerance) {
      used[static_cast<std::size_t>(best)] = true;
    } else {
      all = false;
      best = -1;
    }
    out.oracle_index.push_back(best);
    out.distance.push_back(best_d);
  }
  out.agreement = all && analytic.size() == m.clusters.size();
  return out;
}

std::vector<double> sweep_values(const SweepConfig& s) {
  std::vector<double> xs;
  for (int k = 0; k < s.steps; ++k)
    xs.push_back(k == s.steps - 1 ? s.to : s.from + (s.to - s.from) * k / (s.steps - 1));
  return xs;
}

}  // namespace

json run_classify(const RunConfig& cfg) {
  auto k = require_degenerate(cfg, "classify");
  auto positivity = require_admissible(k);
  auto rule = QuadratureRule::gauss_legendre(cfg.numerics.quad_order);
  auto r = reduce_checked(k, rule);
  return {{"command", "classify"},
          {"config", to_json(cfg)},
          {"positivity", positivity_json(positivity)},
          {"coefficients", system_json(r.system)},
          {"cubic", cubic_json(r.cubic)},
          {"classification", classification_json(r.classification)},
          {"roots", roots_json(r.roots)}};
}

json run_solve(const RunConfig& cfg) {
  Kernel kernel = build_kernel(cfg);
  auto rule = QuadratureRule::gauss_legendre(cfg.numerics.quad_order);
  auto opts = multistart_options(cfg.numerics);
  json out = {{"command", "solve"}, {"config", to_json(cfg)}};

  if (const auto* dk = std::get_if<DegenerateKernel>(&kernel)) {
    out["positivity"] = positivity_json(require_admissible(*dk));
    auto r = reduce_checked(*dk, rule);
    auto analytic = analytic_grid(r, rule);
    DiscreteOperator op(kernel, rule);
    auto oracle = multistart_solve(op, opts, analytic);
    auto matching = match_solutions(analytic, oracle);

    json entries = json::array();
    for (std::size_t i = 0; i < r.fixed_points.size(); ++i) {
      const auto& fp = r.fixed_points[i];
      auto g = h_fixed_point_from_L(fp);
      entries.push_back({{"lambda", fp.point.lambda},
                         {"c1", fp.point.c1},
                         {"c2", fp.point.c2},
                         {"multiplicity", fp.multiplicity},
                         {"plane_residual", fp.point.residual},
                         {"L_fixed_point", fp.f.describe()},
                         {"H_fixed_point", g.describe()},
                         {"f_at_zero", g.f_at_zero},
                         {"eigenvalue_lambda", 1.0 / g.f_at_zero},
                         {"oracle_cluster", matching.oracle_index[i] >= 0 ? json(matching.oracle_index[i]) : json(nullptr)},
                         {"sup_distance", std::isfinite(matching.distance[i]) ? json(matching.distance[i]) : json(nullptr)}});
    }
    out["coefficients"] = system_json(r.system);
    out["cubic"] = cubic_json(r.cubic);
    out["classification"] = classification_json(r.classification);
    out["analytic"] = entries;
    out["oracle"] = oracle_json(oracle, rule);
    out["agreement"] = matching.agreement;
  } else {
    auto oracle = multistart_solve(kernel, rule, opts);
    out["oracle"] = oracle_json(oracle, rule);
  }
  return out;
}

void flag_boundaries(std::vector<SweepRow>& rows) {
  auto count = [](const SweepRow& r) { return r.predicted_count ? *r.predicted_count : r.oracle_count; };
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].boundary = i > 0 && count(rows[i]) != count(rows[i - 1]);
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("sweep", "sweep requires a sweep section");
  auto rule = QuadratureRule::gauss_legendre(cfg.numerics.quad_order);
  auto opts = multistart_options(cfg.numerics);

  std::vector<SweepRow> rows;
  for (double value : sweep_values(*cfg.sweep)) {
    RunConfig point = with_parameter(cfg, cfg.sweep->parameter, value);
    Kernel kernel = build_kernel(point);
    SweepRow row;
    row.parameter = value;
    if (const auto* dk = std::get_if<DegenerateKernel>(&kernel)) {
      require_admissible(*dk);
      auto r = reduce_checked(*dk, rule);
      auto analytic = analytic_grid(r, rule);
      DiscreteOperator op(kernel, rule);
      auto oracle = multistart_solve(op, opts, analytic);
      row.matched_case = std::string(to_string(r.classification.matched_case));
      row.predicted_count = r.classification.predicted_count;
      row.oracle_count = static_cast<int>(oracle.clusters.size());
      for (const auto& root : r.roots) row.roots.push_back(root.value);
      row.agreement = *row.predicted_count == row.oracle_count && match_solutions(analytic, oracle).agreement;
    } else {
      row.oracle_count = static_cast<int>(multistart_solve(kernel, rule, opts).clusters.size());
    }
    rows.push_back(std::move(row));
  }
  flag_boundaries(rows);
  return rows;
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "parameter,case,predicted_count,oracle_count,root1,root2,root3,agreement,boundary\n";
  for (const auto& r : rows) {
    out += format_number(r.parameter);
    out += ',';
    out += r.matched_case.value_or("");
    out += ',';
    if (r.predicted_count) out += std::to_string(*r.predicted_count);
    out += ',';
    out += std::to_string(r.oracle_count);
    for (std::size_t i = 0; i < 3; ++i) {
      out += ',';
      if (i < r.roots.size()) out += format_number(r.roots[i]);
    }
    out += ',';
    if (r.agreement) out += *r.agreement ? "true" : "false";
    out += ',';
    out += r.boundary ? "true" : "false";
    out += '\n';
  }
  return out;
}

json sweep_to_json(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"parameter", r.parameter},
                   {"case", r.matched_case ? json(*r.matched_case) : json(nullptr)},
                   {"predicted_count", r.predicted_count ? json(*r.predicted_count) : json(nullptr)},
                   {"oracle_count", r.oracle_count},
                   {"roots", r.roots},
                   {"agreement", r.agreement ? json(*r.agreement) : json(nullptr)},
                   {"boundary", r.boundary}});
  }
  return {{"command", "sweep"}, {"config", to_json(cfg)}, {"rows", arr}};
}

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.pass; });
}

std::string VerifyReport::render() const {
  std::string out;
  int passed = 0;
  for (const auto& c : checks) {
    out += c.pass ? "PASS " : "FAIL ";
    out += c.name;
    if (!c.detail.empty()) out += ": " + c.detail;
    out += '\n';
    passed += c.pass;
  }
  out += "verify: " + std::to_string(passed) + "/" + std::to_string(checks.size()) + " checks passed\n";
  return out;
}

VerifyReport run_verify(const RunConfig& cfg, const VerifyOptions& vo) {
  VerifyReport report;
  auto add = [&](std::string name, bool pass, std::string detail) {
    report.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  auto k = require_degenerate(cfg, "verify");
  auto positivity = validate_positive(k, kPositivityProbes);
  add("component-positivity", positivity.nonnegative,
      "min " + format_number(positivity.min_value) + " at " + format_number(positivity.min_location) + " (" +
          positivity.min_component + ")" + (positivity.pass ? "" : ", zero on the boundary"));
  if (!positivity.nonnegative) return report;

  auto rule = QuadratureRule::gauss_legendre(cfg.numerics.quad_order);
  auto r = reduce_checked(k, rule);

  auto coeffs = r.system.coefficients();
  double min_coeff = *std::min_element(coeffs.begin(), coeffs.end());
  add("coefficient-positivity", min_coeff > 0.0, "min coefficient " + format_number(min_coeff));

  const auto& cl = r.classification;
  bool label_count = true;
  switch (cl.matched_case) {
    case CaseLabel::T42_i:
    case CaseLabel::T42_ii: label_count = cl.predicted_count == 2; break;
    case CaseLabel::Fallback3Roots: label_count = cl.predicted_count == 3; break;
    case CaseLabel::FallbackNumeric: break;
    default: label_count = cl.predicted_count == 1;
  }
  add("case-count-consistency",
      label_count && static_cast<int>(r.roots.size()) == cl.predicted_count,
      std::string(to_string(cl.matched_case)) + " predicts " + std::to_string(cl.predicted_count) + ", found " +
          std::to_string(r.roots.size()) + " positive roots");

  QuadraticSystem for_reconstruction = r.system;
  if (vo.coefficient_fault != 0.0) {
    for_reconstruction.b11 *= 1.0 + vo.coefficient_fault;
    for_reconstruction.b12 *= 1.0 + vo.coefficient_fault;
    for_reconstruction.b22 *= 1.0 + vo.coefficient_fault;
  }
  {
    bool ok = true;
    double worst = 0.0;
    std::string detail;
    for (const auto& root : r.roots) {
      try {
        auto p = reconstruct_plane_point(for_reconstruction, root.value);
        double ratio_error = std::fabs(p.c1 / p.c2 - root.value) / root.value;
        worst = std::max(worst, p.residual);
        if (ratio_error > 1e-10) {
          ok = false;
          detail = "ratio law violated at root " + format_number(root.value);
        }
      } catch (const InconsistentRoot& e) {
        ok = false;
        detail = e.what();
      }
    }
    if (detail.empty()) detail = "max defect " + format_number(worst);
    add("reconstruction-defect", ok, detail);
  }

  auto analytic = analytic_grid(r, rule);
  DiscreteOperator op(k, rule);
  auto oracle = multistart_solve(op, multistart_options(cfg.numerics), analytic);
  auto matching = match_solutions(analytic, oracle);
  double worst_match = 0.0;
  for (double d : matching.distance) worst_match = std::max(worst_match, d);
  add("oracle-agreement", matching.agreement,
      std::to_string(analytic.size()) + " analytic vs " + std::to_string(oracle.clusters.size()) +
          " oracle solutions, max sup distance " + format_number(worst_match) + ", " +
          std::to_string(oracle.nonconverged) + " non-converged starts");

  double worst_eigen = 0.0;
  bool eigen_ok = true;
  for (const auto& c : oracle.clusters) {
    worst_eigen = std::max(worst_eigen, c.representative.eigen_defect);
    if (c.representative.eigen_defect > 10.0 * cfg.numerics.tol) eigen_ok = false;
  }
  for (const auto& g : analytic) {
    double d = eigen_check(op, g).defect_sup;
    worst_eigen = std::max(worst_eigen, d);
    if (d > 1e-8) eigen_ok = false;
  }
  add("eigen-defect", eigen_ok, "max defect " + format_number(worst_eigen));
  return report;
}

}  // namespace treegibbs::app
