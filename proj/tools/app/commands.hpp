#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/config.hpp"
#include "treegibbs/nystrom.hpp"
#include "treegibbs/reduction.hpp"

namespace treegibbs::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitVerification = 4,
};

/// An analytic solution matches an oracle cluster when their H-normalized
/// grid values differ by at most this much in sup norm.
inline constexpr double kAgreementTolerance = 1e-6;

/// Throws ConfigError for a general kernel or a kernel failing the
/// positivity probe.
nlohmann::json run_classify(const RunConfig& cfg);

/// Both pipelines for degenerate kernels, the oracle alone for general ones.
nlohmann::json run_solve(const RunConfig& cfg);

struct SweepRow {
  double parameter = 0;
  std::optional<std::string> matched_case;
  std::optional<int> predicted_count;
  int oracle_count = 0;
  std::vector<double> roots;
  std::optional<bool> agreement;
  bool boundary = false;
};

/// Requires a sweep section. Rows come back in parameter order with boundary
/// flags set.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

/// Marks every row whose count (predicted when present, else oracle) differs
/// from the previous row's.
void flag_boundaries(std::vector<SweepRow>& rows);

/// Columns: parameter,case,predicted_count,oracle_count,root1,root2,root3,agreement,boundary
std::string render_sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::json sweep_to_json(const RunConfig& cfg, const std::vector<SweepRow>& rows);

struct VerifyOptions {
  /// Test hook: multiplies the c2-row of the quadratic system used for
  /// reconstruction by (1 + fault), after the cubic has been solved.
  double coefficient_fault = 0.0;
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool pass() const;
  std::string render() const;
};

VerifyReport run_verify(const RunConfig& cfg, const VerifyOptions& opts = {});

/// Shortest round-trip decimal text.
std::string format_number(double x);

}  // namespace treegibbs::app
