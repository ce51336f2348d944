#include "app/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace treegibbs::app {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw ConfigError(join(path, key), "unknown field");
}

const json& require_object(const json& parent, const std::string& key, const std::string& path) {
  if (!parent.contains(key)) throw ConfigError(join(path, key), "missing required section");
  const json& obj = parent.at(key);
  if (!obj.is_object()) throw ConfigError(join(path, key), "must be an object");
  return obj;
}

double get_number(const json& obj, const std::string& key, const std::string& path,
                  std::optional<double> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "missing required number");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key), "must be finite");
  return x;
}

std::int64_t get_integer(const json& obj, const std::string& key, const std::string& path,
                         std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path,
                       std::optional<std::string> fallback) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "missing required expression");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
  return v.get<std::string>();
}

std::string number_text(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::size_t count_occurrences(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + needle.size())) ++n;
  return n;
}

template <class F>
void for_each_expression(const RunConfig& cfg, F&& f) {
  if (const auto* g = std::get_if<GeneralKernelConfig>(&cfg.kernel)) {
    f("kernel.general.xi1", g->xi1);
    f("kernel.general.xi2", g->xi2);
    f("kernel.general.xi3", g->xi3);
  } else {
    const auto& d = std::get<DegenerateKernelConfig>(cfg.kernel);
    f("kernel.degenerate.psi1", d.psi1);
    f("kernel.degenerate.psi2", d.psi2);
    f("kernel.degenerate.phi1", d.phi1);
    f("kernel.degenerate.phi2", d.phi2);
  }
}

double* general_field(GeneralKernelConfig& g, const std::string& name) {
  if (name == "J") return &g.J;
  if (name == "J1") return &g.J1;
  if (name == "J3") return &g.J3;
  if (name == "alpha") return &g.alpha;
  if (name == "beta") return &g.beta;
  return nullptr;
}

void check_parameter_path(const RunConfig& cfg, const std::string& parameter) {
  const std::string path = "sweep.parameter";
  if (parameter == kThetaPlaceholder) {
    std::size_t n = 0;
    for_each_expression(cfg, [&](const char*, const std::string& text) {
      n += count_occurrences(text, kThetaPlaceholder);
    });
    if (n != 1)
      throw ConfigError(path, "placeholder $theta must occur exactly once in the kernel expressions, found " +
                                  std::to_string(n));
    return;
  }
  const std::string prefix = "kernel.general.";
  if (parameter.rfind(prefix, 0) == 0) {
    if (cfg.degenerate()) throw ConfigError(path, "'" + parameter + "' requires a general kernel");
    GeneralKernelConfig probe;
    if (general_field(probe, parameter.substr(prefix.size()))) return;
  }
  throw ConfigError(path, "unknown parameter path '" + parameter + "'");
}

}  // namespace

void validate(const RunConfig& cfg) {
  const auto& n = cfg.numerics;
  if (n.quad_order < 1 || n.quad_order > 512) throw ConfigError("numerics.quad_order", "must be in [1, 512]");
  if (!(n.tol > 0.0)) throw ConfigError("numerics.tol", "must be > 0");
  if (n.max_iter < 1) throw ConfigError("numerics.max_iter", "must be >= 1");
  if (n.n_starts < 1) throw ConfigError("numerics.n_starts", "must be >= 1");
  if (!(n.cluster_eps > 0.0)) throw ConfigError("numerics.cluster_eps", "must be > 0");
  if (!(n.damping > 0.0 && n.damping <= 1.0)) throw ConfigError("numerics.damping", "must be in (0, 1]");
  if (const auto* g = std::get_if<GeneralKernelConfig>(&cfg.kernel)) {
    if (!(g->beta > 0.0)) throw ConfigError("kernel.general.beta", "must be > 0");
  }
  if (cfg.sweep) {
    if (cfg.sweep->steps < 2) throw ConfigError("sweep.steps", "must be >= 2");
    check_parameter_path(cfg, cfg.sweep->parameter);
  }
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  reject_unknown(doc, "", {"kernel", "numerics", "sweep"});

  RunConfig cfg;
  const json& kernel = require_object(doc, "kernel", "");
  reject_unknown(kernel, "kernel", {"general", "degenerate"});
  const bool has_general = kernel.contains("general");
  const bool has_degenerate = kernel.contains("degenerate");
  if (has_general == has_degenerate)
    throw ConfigError("kernel", "exactly one of 'general' or 'degenerate' must be present");

  if (has_general) {
    const std::string p = "kernel.general";
    const json& g = require_object(kernel, "general", "kernel");
    reject_unknown(g, p, {"J", "J1", "J3", "alpha", "beta", "xi1", "xi2", "xi3"});
    GeneralKernelConfig gc;
    gc.J = get_number(g, "J", p, 0.0);
    gc.J1 = get_number(g, "J1", p, 0.0);
    gc.J3 = get_number(g, "J3", p, 0.0);
    gc.alpha = get_number(g, "alpha", p, 0.0);
    gc.beta = get_number(g, "beta", p, std::nullopt);
    gc.xi1 = get_string(g, "xi1", p, "0");
    gc.xi2 = get_string(g, "xi2", p, "0");
    gc.xi3 = get_string(g, "xi3", p, "0");
    cfg.kernel = gc;
  } else {
    const std::string p = "kernel.degenerate";
    const json& d = require_object(kernel, "degenerate", "kernel");
    reject_unknown(d, p, {"psi1", "psi2", "phi1", "phi2"});
    cfg.kernel = DegenerateKernelConfig{get_string(d, "psi1", p, std::nullopt), get_string(d, "psi2", p, std::nullopt),
                                        get_string(d, "phi1", p, std::nullopt), get_string(d, "phi2", p, std::nullopt)};
  }

  if (doc.contains("numerics")) {
    const std::string p = "numerics";
    const json& n = require_object(doc, "numerics", "");
    reject_unknown(n, p, {"quad_order", "tol", "max_iter", "n_starts", "seed", "cluster_eps", "damping"});
    NumericsConfig defaults;
    auto bounded_int = [&](const char* key, std::int64_t fallback) {
      auto v = get_integer(n, key, p, fallback);
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError(join(p, key), "out of range");
      return static_cast<int>(v);
    };
    cfg.numerics.quad_order = bounded_int("quad_order", defaults.quad_order);
    cfg.numerics.tol = get_number(n, "tol", p, defaults.tol);
    cfg.numerics.max_iter = bounded_int("max_iter", defaults.max_iter);
    cfg.numerics.n_starts = bounded_int("n_starts", defaults.n_starts);
    auto seed = get_integer(n, "seed", p, 0);
    if (seed < 0) throw ConfigError("numerics.seed", "must be >= 0");
    cfg.numerics.seed = static_cast<std::uint64_t>(seed);
    cfg.numerics.cluster_eps = get_number(n, "cluster_eps", p, defaults.cluster_eps);
    cfg.numerics.damping = get_number(n, "damping", p, defaults.damping);
  }

  if (doc.contains("sweep")) {
    const std::string p = "sweep";
    const json& s = require_object(doc, "sweep", "");
    reject_unknown(s, p, {"parameter", "from", "to", "steps"});
    SweepConfig sc;
    if (!s.contains("parameter") || !s.at("parameter").is_string())
      throw ConfigError("sweep.parameter", "missing or not a string");
    sc.parameter = s.at("parameter").get<std::string>();
    sc.from = get_number(s, "from", p, std::nullopt);
    sc.to = get_number(s, "to", p, std::nullopt);
    auto steps = get_integer(s, "steps", p, 2);
    if (steps < 2 || steps > 100000) throw ConfigError("sweep.steps", "must be in [2, 100000]");
    sc.steps = static_cast<int>(steps);
    cfg.sweep = sc;
  }

  validate(cfg);
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const RunConfig& cfg) {
  json j;
  if (const auto* g = std::get_if<GeneralKernelConfig>(&cfg.kernel)) {
    j["kernel"]["general"] = {{"J", g->J},       {"J1", g->J1},     {"J3", g->J3},   {"alpha", g->alpha},
                              {"beta", g->beta}, {"xi1", g->xi1}, {"xi2", g->xi2}, {"xi3", g->xi3}};
  } else {
    const auto& d = std::get<DegenerateKernelConfig>(cfg.kernel);
    j["kernel"]["degenerate"] = {{"psi1", d.psi1}, {"psi2", d.psi2}, {"phi1", d.phi1}, {"phi2", d.phi2}};
  }
  const auto& n = cfg.numerics;
  j["numerics"] = {{"quad_order", n.quad_order}, {"tol", n.tol},         {"max_iter", n.max_iter},
                   {"n_starts", n.n_starts},     {"seed", n.seed},       {"cluster_eps", n.cluster_eps},
                   {"damping", n.damping}};
  if (cfg.sweep)
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"from", cfg.sweep->from},
                  {"to", cfg.sweep->to},
                  {"steps", cfg.sweep->steps}};
  return j;
}

RunConfig with_parameter(const RunConfig& cfg, const std::string& parameter, double value) {
  check_parameter_path(cfg, parameter);
  RunConfig out = cfg;
  if (parameter == kThetaPlaceholder) {
    const std::string text = "(" + number_text(value) + ")";
    auto substitute = [&](std::string& s) {
      if (auto pos = s.find(kThetaPlaceholder); pos != std::string::npos)
        s.replace(pos, std::string(kThetaPlaceholder).size(), text);
    };
    if (auto* g = std::get_if<GeneralKernelConfig>(&out.kernel)) {
      for (auto* s : {&g->xi1, &g->xi2, &g->xi3}) substitute(*s);
    } else {
      auto& d = std::get<DegenerateKernelConfig>(out.kernel);
      for (auto* s : {&d.psi1, &d.psi2, &d.phi1, &d.phi2}) substitute(*s);
    }
  } else {
    auto& g = std::get<GeneralKernelConfig>(out.kernel);
    *general_field(g, parameter.substr(std::string("kernel.general.").size())) = value;
  }
  return out;
}

Kernel build_kernel(const RunConfig& cfg) {
  using expr::Var;
  std::string current;
  auto parse_field = [&](const std::string& path, const std::string& text, expr::VarSet allowed,
                         const char* allowed_text) {
    current = path;
    expr::Ast ast = [&] {
      try {
        return expr::parse(text);
      } catch (const SyntaxError& e) {
        throw ConfigError(path, e.what());
      }
    }();
    for (Var v : expr::free_variables(ast))
      if (!allowed.contains(v)) throw ConfigError(path, std::string("may only use the variables ") + allowed_text);
    return ast;
  };
  try {
    if (const auto* g = std::get_if<GeneralKernelConfig>(&cfg.kernel)) {
      ModelParams p{g->J, g->J1, g->J3, g->alpha, g->beta};
      auto xi1 = parse_field("kernel.general.xi1", g->xi1, {Var::t, Var::u, Var::v}, "t, u, v");
      auto xi2 = parse_field("kernel.general.xi2", g->xi2, {Var::u, Var::v}, "u, v");
      auto xi3 = parse_field("kernel.general.xi3", g->xi3, {Var::t, Var::u}, "t, u");
      current = "kernel.general";
      return GeneralKernel::build(p, xi1, xi2, xi3);
    }
    const auto& d = std::get<DegenerateKernelConfig>(cfg.kernel);
    auto psi1 = parse_field("kernel.degenerate.psi1", d.psi1, {Var::t}, "t");
    auto psi2 = parse_field("kernel.degenerate.psi2", d.psi2, {Var::t}, "t");
    auto phi1 = parse_field("kernel.degenerate.phi1", d.phi1, {Var::u}, "u");
    auto phi2 = parse_field("kernel.degenerate.phi2", d.phi2, {Var::v}, "v");
    current = "kernel.degenerate";
    return DegenerateKernel::build(psi1, psi2, phi1, phi2);
  } catch (const KernelError& e) {
    throw ConfigError(current, e.what());
  }
}

}  // namespace treegibbs::app
