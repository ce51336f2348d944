#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "treegibbs/error.hpp"
#include "treegibbs/kernel.hpp"

namespace treegibbs::app {

/// Malformed configuration. `path` is the dotted field path, e.g.
/// "numerics.quad_order".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct GeneralKernelConfig {
  double J = 0, J1 = 0, J3 = 0, alpha = 0, beta = 1;
  std::string xi1 = "0", xi2 = "0", xi3 = "0";
};

struct DegenerateKernelConfig {
  std::string psi1, psi2, phi1, phi2;
};

struct NumericsConfig {
  int quad_order = 64;
  double tol = 1e-10;
  int max_iter = 10000;
  int n_starts = 16;
  std::uint64_t seed = 0;
  double cluster_eps = 1e-4;
  double damping = 1.0;
};

struct SweepConfig {
  std::string parameter;  // kernel.general.<J|J1|J3|alpha|beta> or "$theta"
  double from = 0, to = 0;
  int steps = 2;
};

inline constexpr const char* kThetaPlaceholder = "$theta";

struct RunConfig {
  std::variant<GeneralKernelConfig, DegenerateKernelConfig> kernel;
  NumericsConfig numerics;
  std::optional<SweepConfig> sweep;

  bool degenerate() const { return std::holds_alternative<DegenerateKernelConfig>(kernel); }
};

/// Total: every malformed document raises ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Range checks shared by file input and flag overrides.
void validate(const RunConfig& cfg);

/// Resolved config with every default materialized.
nlohmann::json to_json(const RunConfig& cfg);

/// Copy of cfg with the sweep parameter set to value. Throws ConfigError for
/// an unknown parameter path or a placeholder count other than one.
RunConfig with_parameter(const RunConfig& cfg, const std::string& parameter, double value);

/// Parses the kernel expressions. Expression and variable-set errors become
/// ConfigError with the expression's field path.
Kernel build_kernel(const RunConfig& cfg);

}  // namespace treegibbs::app
