#ifndef HESSFLOW_SCENARIO_HPP
#define HESSFLOW_SCENARIO_HPP

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessflow/diagnostics.hpp"

namespace hessflow {

inline constexpr const char* kVersion = "hessflow 0.1.0";

/// Raised on malformed or inconsistent configuration; the message names the
/// offending key. Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// A validated configuration: defaults for the named system merged with the
/// user document (keys: scenario, operator, params, initial, integrator,
/// output).
struct Scenario {
  std::string system;
  int n = 0;
  unsigned long long seed = 1;
  Json config;
};

/// Built-in defaults per system name.
Json default_config(const std::string& system);

/// Merges onto defaults and validates. Throws ConfigError.
Scenario parse_config(const Json& user);

/// Applies a dotted-path override ("scenario.seed", "operator.b1") onto a
/// config document; the value string is parsed as JSON when possible.
void apply_override(Json& config, const std::string& key, const std::string& value);

/// Scenario lowered to a flat autonomous system ready to integrate.
struct ScenarioRun {
  FlatField field;
  Vec y0;
  std::vector<std::string> state_names;
  std::vector<NamedObserver> observers;
  IntegratorConfig config;
  std::function<Vec(const Vec&)> post_step;                  // may be empty
  std::function<Vec(const Vec&)> invariance_relation;        // may be empty
};

ScenarioRun build_run(const Scenario& sc);

/// Writes <out>/trajectory.csv and <out>/run.json. Returns the process exit
/// code (0 ok, 3 on numeric blow-up).
int run_simulate(const Scenario& sc, const std::string& out_dir);

/// Runs one diagnostic suite from {invariance, conservation, lax, spectral,
/// reduce-pendulum, reduce-grassmann, measure}; writes <out>/report.txt and
/// <out>/report.json. Returns 0 iff every verdict passes.
int run_check(const Scenario& sc, const std::string& suite, const std::string& out_dir);

/// Evaluates the scenario's conservation/invariance/measure diagnostics for
/// each override value of `param` (fanned out in parallel) and writes
/// <out>/scan.csv with one row per value in input order.
int run_scan(const Scenario& sc, const std::string& param, const std::vector<std::string>& values,
             const std::string& out_dir);

}  // namespace hessflow

#endif
