#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"

using namespace treegibbs;
using namespace treegibbs::app;

namespace {

struct Flags {
  std::string config;
  std::string output;
  std::string format;
  std::optional<int> quad_order;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  double corrupt = 0.0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration")->required();
  sub->add_option("--output", f.output, "Output file (default stdout)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--quad-order", f.quad_order, "Override numerics.quad_order");
  sub->add_option("--seed", f.seed, "Override numerics.seed");
  sub->add_option("--tol", f.tol, "Override numerics.tol");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg = load_config(f.config);
  if (f.quad_order) cfg.numerics.quad_order = *f.quad_order;
  if (f.seed) cfg.numerics.seed = *f.seed;
  if (f.tol) cfg.numerics.tol = *f.tol;
  validate(cfg);
  return cfg;
}

void emit(const Flags& f, const std::string& text) {
  if (f.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(f.output, std::ios::binary);
  if (!out) throw ConfigError("--output", "cannot open '" + f.output + "' for writing");
  out << text;
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void require_json(const Flags& f, const char* command) {
  if (!f.format.empty() && f.format != "json")
    throw ConfigError("--format", std::string(command) + " only supports json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translation-invariant Gibbs measures on the order-2 Cayley tree"};
  app.require_subcommand(1);
  Flags flags;

  auto* classify = app.add_subcommand("classify", "Reduce a degenerate kernel to its cubic and classify it");
  auto* solve = app.add_subcommand("solve", "Find fixed points analytically and with the Nystrom oracle");
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and report counts as CSV");
  auto* verify = app.add_subcommand("verify", "Audit the reduction invariants for a degenerate kernel");
  for (auto* sub : {classify, solve, sweep, verify}) add_common(sub, flags);
  verify->add_option("--corrupt-coefficients", flags.corrupt, "Test hook: relative fault in the c2-row")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = resolve(flags);
    if (classify->parsed()) {
      require_json(flags, "classify");
      emit(flags, json_text(run_classify(cfg)));
    } else if (solve->parsed()) {
      require_json(flags, "solve");
      emit(flags, json_text(run_solve(cfg)));
    } else if (sweep->parsed()) {
      auto rows = run_sweep(cfg);
      emit(flags, flags.format == "json" ? json_text(sweep_to_json(cfg, rows)) : render_sweep_csv(rows));
    } else if (verify->parsed()) {
      require_json(flags, "verify");
      auto report = run_verify(cfg, {flags.corrupt});
      emit(flags, report.render());
      return report.pass() ? kExitOk : kExitVerification;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
