#pragma once

#include <string>
#include <variant>
#include <vector>

#include "treegibbs/expr.hpp"

namespace treegibbs {

/// Hamiltonian couplings and inverse temperature.
struct ModelParams {
  double J = 0.0;            // second neighbours
  double J1 = 0.0;           // nearest neighbours
  double J3 = 0.0;           // triples of neighbours
  double alpha_field = 0.0;  // external field
  double beta = 1.0;         // inverse temperature, > 0

  /// Throws KernelError if beta <= 0 or any field is non-finite.
  void validate() const;
};

/// K(t,u,v) = exp{ J3 b xi1(t,u,v) + J b xi2(u,v) + J1 b (xi3(t,u) + xi3(t,v)) + alpha b (u+v) }
/// with t the output variable.
class GeneralKernel {
 public:
  /// Checks the variable sets of xi1 (t,u,v), xi2 (u,v) and xi3 (t,u) and
  /// probes K on a coarse grid of [0,1]^3. Throws KernelError / RangeError /
  /// DomainError.
  static GeneralKernel build(const ModelParams& params, expr::Ast xi1, expr::Ast xi2, expr::Ast xi3);

  /// Throws RangeError if the value overflows.
  double operator()(double t, double u, double v) const;

  const ModelParams& params() const noexcept { return params_; }
  const expr::Ast& xi1() const noexcept { return xi1_; }
  const expr::Ast& xi2() const noexcept { return xi2_; }
  const expr::Ast& xi3() const noexcept { return xi3_; }

 private:
  GeneralKernel(ModelParams p, expr::Ast xi1, expr::Ast xi2, expr::Ast xi3)
      : params_(p), xi1_(std::move(xi1)), xi2_(std::move(xi2)), xi3_(std::move(xi3)) {}

  ModelParams params_;
  expr::Ast xi1_, xi2_, xi3_;
};

/// Rank-two separable kernel psi1(t) phi1(u) + psi2(t) phi2(v).
class DegenerateKernel {
 public:
  /// Requires psi1, psi2 over {t}, phi1 over {u}, phi2 over {v} (constants
  /// allowed). Throws KernelError. Positivity is checked separately by
  /// validate_positive().
  static DegenerateKernel build(expr::Ast psi1, expr::Ast psi2, expr::Ast phi1, expr::Ast phi2);

  double psi1(double t) const;
  double psi2(double t) const;
  double phi1(double u) const;
  double phi2(double v) const;

  double operator()(double t, double u, double v) const;

  const expr::Ast& psi1_ast() const noexcept { return psi1_; }
  const expr::Ast& psi2_ast() const noexcept { return psi2_; }
  const expr::Ast& phi1_ast() const noexcept { return phi1_; }
  const expr::Ast& phi2_ast() const noexcept { return phi2_; }

 private:
  DegenerateKernel(expr::Ast psi1, expr::Ast psi2, expr::Ast phi1, expr::Ast phi2)
      : psi1_(std::move(psi1)), psi2_(std::move(psi2)), phi1_(std::move(phi1)), phi2_(std::move(phi2)) {}

  expr::Ast psi1_, psi2_, phi1_, phi2_;
};

using Kernel = std::variant<GeneralKernel, DegenerateKernel>;

double evaluate_kernel(const Kernel& k, double t, double u, double v);

struct ComponentProbe {
  std::string name;  // "psi1", "psi2", "phi1", "phi2"
  double min_value = 0.0;
  double min_location = 0.0;
  bool finite = true;
  std::string error;  // evaluation failure, empty when none
};

struct PositivityDiagnostics {
  bool pass = false;         // every value finite and > 0
  bool nonnegative = false;  // every value finite and >= 0
  double min_value = 0.0;  // over all components
  double min_location = 0.0;
  std::string min_component;
  std::vector<ComponentProbe> components;
};

/// Evaluates every component at probe_count uniform nodes of [0,1] (ends
/// included). Passes iff every value is finite and strictly positive;
/// `nonnegative` is the weaker admissibility condition used by the reduction
/// pipeline (zeros on the boundary, as in psi = t, are tolerated there).
/// Throws std::invalid_argument if probe_count < 2.
PositivityDiagnostics validate_positive(const DegenerateKernel& k, int probe_count);

}  // namespace treegibbs
