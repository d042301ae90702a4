#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catou/io.hpp"
#include "catou/plot.hpp"
#include "catou/stats.hpp"

namespace catou::harness {

using json = nlohmann::json;

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ResourceCapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ResourceCaps {
  std::size_t max_replicas = 200'000;
  std::size_t max_population = 10'000'000;  // live particles in one catalyst path
};

// Config file layout:
//   { "caps": {...}, "checks": { "<check>": { "<param>": value, ... } },
//     "simulate-sbm": {...}, "solve-dual": {...}, "sample-field": {...}, "moments": {...} }
// Unknown checks or parameters are rejected; see default_parameters().
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::optional<std::size_t> replicas;  // overrides every check's "replicas"
  ResourceCaps caps;
  json overrides = json::object();
  json tools = json::object();  // sections for the non-verify subcommands, read by the CLI

  static ExperimentConfig from_json(const json& j, std::uint64_t seed);
  // defaults merged with overrides, bounds-checked
  json parameters_for(const std::string& check) const;
  json echo() const;
};

enum class RowKind { statistical, tolerance, bound };

// statistical: pass iff |z| <= 3
// tolerance:   pass iff |estimate - analytic| <= tolerance
// bound:       pass iff lo <= estimate <= hi  (analytic holds the nearer edge)
struct Row {
  std::string name;
  std::string parameters;
  RowKind kind = RowKind::statistical;
  double analytic = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double tolerance = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

Row statistical_row(std::string name, std::string parameters, double analytic, const stats::MeanSe& mc);
Row tolerance_row(std::string name, std::string parameters, double target, double value, double tol);
Row bound_row(std::string name, std::string parameters, double value, double lo, double hi);

struct CheckResult {
  std::string check;
  std::string claim;
  json parameters;
  std::vector<Row> rows;
  std::vector<std::string> notes;
  json data = json::object();
  std::vector<plot::Series> series;
  plot::PlotOptions plot;
  std::string error;  // set when the check threw
  double wall_seconds = 0.0;

  bool pass() const;
};

const std::vector<std::string>& check_names();
const std::string& check_claim(const std::string& name);
json default_parameters(const std::string& name);

// Throws std::invalid_argument for unknown names, ConfigError for bad
// parameters and ResourceCapError when a request exceeds the caps.
CheckResult run_check(const std::string& name, const ExperimentConfig& cfg);

struct SuiteResult {
  std::vector<CheckResult> checks;
  bool pass() const;
};

// Runs each check, recording thrown errors as failed checks.
SuiteResult run_checks(const std::vector<std::string>& names, const ExperimentConfig& cfg,
                       const std::function<void(const CheckResult&)>& on_done = {});

// report.json is a pure function of (config, seed); wall times and thread
// counts go to timing.json.
json report_json(const SuiteResult& suite, const ExperimentConfig& cfg);
json timing_json(const SuiteResult& suite);
// report.json, timing.json, <check>.csv and, when a check has series, <check>.svg
void write_outputs(const SuiteResult& suite, const ExperimentConfig& cfg, const std::filesystem::path& out);

// check,parameters,analytic,mc_estimate,se,pass
std::string results_csv(const CheckResult& r);

namespace detail {

struct CheckContext {
  const ExperimentConfig& cfg;
  std::string name;
  json params;
  std::uint32_t tag;  // stream tag of the check; the low byte is free for sub-streams
};

using CheckFn = std::function<void(const CheckContext&, CheckResult&)>;

struct CheckSpec {
  std::string name;
  std::string claim;
  json defaults;
  CheckFn fn;
};

const std::vector<CheckSpec>& registry();

}  // namespace detail

}  // namespace catou::harness
