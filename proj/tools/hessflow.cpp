#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "hessflow/scenario.hpp"

namespace {

hessflow::Json load_config(const std::string& config_path, const std::string& preset,
                           const std::vector<std::string>& overrides) {
  hessflow::Json cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw hessflow::ConfigError("cannot open config file: " + config_path);
    try {
      in >> cfg;
    } catch (const hessflow::Json::parse_error& e) {
      throw hessflow::ConfigError(std::string("config parse error: ") + e.what());
    }
  } else if (!preset.empty()) {
    cfg = hessflow::default_config(preset);
  } else {
    throw hessflow::ConfigError("either --config or --preset is required");
  }
  for (const auto& kv : overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw hessflow::ConfigError("--set expects key=value, got \"" + kv + "\"");
    hessflow::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-dimensional Hess-Appel'rot systems, reductions and diagnostics"};
  app.set_version_flag("--version", std::string(hessflow::kVersion));
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = "out", suite = "conservation";
  std::string scan_param;
  std::vector<std::string> overrides, scan_values;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--preset", preset, "built-in scenario preset name");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--set", overrides, "dotted-path config override key=value");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "integrate and write trajectory.csv");
  add_common(simulate);
  CLI::App* check = app.add_subcommand("check", "run one diagnostic suite");
  add_common(check);
  check->add_option("--suite", suite,
                    "invariance | conservation | lax | spectral | reduce-pendulum | "
                    "reduce-grassmann | measure");
  CLI::App* scan = app.add_subcommand("scan", "sweep one parameter, aggregate to scan.csv");
  add_common(scan);
  scan->add_option("--param", scan_param, "dotted config path to sweep")->required();
  scan->add_option("--values", scan_values, "values for the swept parameter");

  CLI11_PARSE(app, argc, argv);

  try {
    hessflow::Scenario sc = hessflow::parse_config(load_config(config_path, preset, overrides));
    if (simulate->parsed()) return hessflow::run_simulate(sc, out_dir);
    if (check->parsed()) return hessflow::run_check(sc, suite, out_dir);
    return hessflow::run_scan(sc, scan_param, scan_values, out_dir);
  } catch (const hessflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hessflow::BlowupError& e) {
    std::cerr << "numeric blow-up: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
