#include "treegibbs/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "treegibbs/error.hpp"

namespace treegibbs {

using expr::Var;

namespace {

std::string var_list(const expr::VarSet& vars) {
  std::string s;
  for (Var v : vars) {
    if (!s.empty()) s += ", ";
    s += expr::to_char(v);
  }
  return "{" + s + "}";
}

void require_subset(const expr::Ast& ast, const expr::VarSet& allowed, const std::string& name) {
  for (Var v : expr::free_variables(ast)) {
    if (!allowed.contains(v))
      throw KernelError(name + " may only use " + var_list(allowed) + " but uses '" +
                        expr::to_char(v) + "' in \"" + ast.source() + "\"");
  }
}

std::string point(double t, double u, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "(t=" << t << ", u=" << u << ", v=" << v << ")";
  return os.str();
}

}  // namespace

void ModelParams::validate() const {
  for (double x : {J, J1, J3, alpha_field, beta})
    if (!std::isfinite(x)) throw KernelError("model parameters must be finite");
  if (!(beta > 0.0)) throw KernelError("beta must be > 0");
}

GeneralKernel GeneralKernel::build(const ModelParams& params, expr::Ast xi1, expr::Ast xi2,
                                   expr::Ast xi3) {
  params.validate();
  require_subset(xi1, {Var::t, Var::u, Var::v}, "xi1");
  require_subset(xi2, {Var::u, Var::v}, "xi2");
  require_subset(xi3, {Var::t, Var::u}, "xi3");
  GeneralKernel k(params, std::move(xi1), std::move(xi2), std::move(xi3));
  constexpr int kProbe = 5;
  for (int i = 0; i < kProbe; ++i)
    for (int j = 0; j < kProbe; ++j)
      for (int l = 0; l < kProbe; ++l)
        (void)k(i / (kProbe - 1.0), j / (kProbe - 1.0), l / (kProbe - 1.0));
  return k;
}

double GeneralKernel::operator()(double t, double u, double v) const {
  const auto& p = params_;
  double exponent = 0.0;
  if (p.J3 != 0.0) exponent += p.J3 * p.beta * expr::evaluate(xi1_, {{Var::t, t}, {Var::u, u}, {Var::v, v}});
  if (p.J != 0.0) exponent += p.J * p.beta * expr::evaluate(xi2_, {{Var::u, u}, {Var::v, v}});
  if (p.J1 != 0.0) {
    double a = expr::evaluate(xi3_, {{Var::t, t}, {Var::u, u}});
    double b = expr::evaluate(xi3_, {{Var::t, t}, {Var::u, v}});
    exponent += p.J1 * p.beta * (a + b);
  }
  exponent += p.alpha_field * p.beta * (u + v);
  double k = std::exp(exponent);
  if (!std::isfinite(k) || k == 0.0)
    throw RangeError("kernel value out of range at " + point(t, u, v));
  return k;
}

DegenerateKernel DegenerateKernel::build(expr::Ast psi1, expr::Ast psi2, expr::Ast phi1, expr::Ast phi2) {
  require_subset(psi1, {Var::t}, "psi1");
  require_subset(psi2, {Var::t}, "psi2");
  require_subset(phi1, {Var::u}, "phi1");
  require_subset(phi2, {Var::v}, "phi2");
  return DegenerateKernel(std::move(psi1), std::move(psi2), std::move(phi1), std::move(phi2));
}

double DegenerateKernel::psi1(double t) const { return expr::evaluate(psi1_, {{Var::t, t}}); }
double DegenerateKernel::psi2(double t) const { return expr::evaluate(psi2_, {{Var::t, t}}); }
double DegenerateKernel::phi1(double u) const { return expr::evaluate(phi1_, {{Var::u, u}}); }
double DegenerateKernel::phi2(double v) const { return expr::evaluate(phi2_, {{Var::v, v}}); }

double DegenerateKernel::operator()(double t, double u, double v) const {
  double k = psi1(t) * phi1(u) + psi2(t) * phi2(v);
  if (!std::isfinite(k)) throw RangeError("kernel value out of range at " + point(t, u, v));
  return k;
}

double evaluate_kernel(const Kernel& k, double t, double u, double v) {
  return std::visit([&](const auto& kernel) { return kernel(t, u, v); }, k);
}

PositivityDiagnostics validate_positive(const DegenerateKernel& k, int probe_count) {
  if (probe_count < 2) throw std::invalid_argument("probe_count must be >= 2");

  struct Component {
    const char* name;
    const expr::Ast* ast;
    Var var;
  };
  const Component comps[] = {{"psi1", &k.psi1_ast(), Var::t},
                             {"psi2", &k.psi2_ast(), Var::t},
                             {"phi1", &k.phi1_ast(), Var::u},
                             {"phi2", &k.phi2_ast(), Var::v}};

  PositivityDiagnostics diag;
  diag.pass = true;
  diag.nonnegative = true;
  diag.min_value = std::numeric_limits<double>::infinity();
  for (const auto& c : comps) {
    ComponentProbe probe;
    probe.name = c.name;
    probe.min_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < probe_count; ++i) {
      const double x = static_cast<double>(i) / (probe_count - 1);
      double value = 0.0;
      try {
        expr::Bindings b;
        b.set(c.var, x);
        value = expr::evaluate(*c.ast, b);
      } catch (const Error& e) {
        probe.finite = false;
        probe.error = e.what();
        probe.min_location = x;
        probe.min_value = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      if (value < probe.min_value) {
        probe.min_value = value;
        probe.min_location = x;
      }
    }
    if (!probe.finite || !(probe.min_value > 0.0)) diag.pass = false;
    if (!probe.finite || !(probe.min_value >= 0.0)) diag.nonnegative = false;
    if (probe.finite && probe.min_value < diag.min_value) {
      diag.min_value = probe.min_value;
      diag.min_location = probe.min_location;
      diag.min_component = probe.name;
    }
    diag.components.push_back(std::move(probe));
  }
  return diag;
}

}  // namespace treegibbs
