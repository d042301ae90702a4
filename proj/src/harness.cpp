#include "catou/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "catou/moments.hpp"
#include "catou/parallel.hpp"

namespace catou::harness {

namespace {

const detail::CheckSpec& find(const std::string& name) {
  const auto& r = detail::registry();
  const auto it = std::find_if(r.begin(), r.end(), [&](const auto& s) { return s.name == name; });
  if (it == r.end()) throw std::invalid_argument("unknown check '" + name + "'");
  return *it;
}

std::uint32_t tag_of(const std::string& name) {
  const auto& r = detail::registry();
  const auto i = std::find_if(r.begin(), r.end(), [&](const auto& s) { return s.name == name; }) - r.begin();
  return static_cast<std::uint32_t>(0xC0000000u | (static_cast<std::uint32_t>(i + 1) << 8));
}

const char* kind_name(RowKind k) {
  switch (k) {
    case RowKind::statistical: return "statistical";
    case RowKind::tolerance: return "tolerance";
    case RowKind::bound: return "bound";
  }
  return "?";
}

json row_json(const Row& r) {
  json j{{"name", r.name}, {"parameters", r.parameters}, {"kind", kind_name(r.kind)}, {"analytic", r.analytic},
         {"estimate", r.estimate}, {"pass", r.pass}};
  switch (r.kind) {
    case RowKind::statistical:
      j["se"] = r.se;
      j["z"] = r.z;
      break;
    case RowKind::tolerance:
      j["error"] = std::abs(r.estimate - r.analytic);
      j["tolerance"] = r.tolerance;
      break;
    case RowKind::bound:
      j["lo"] = r.lo;
      j["hi"] = r.hi;
      break;
  }
  return j;
}

}  // namespace

Row statistical_row(std::string name, std::string parameters, double analytic, const stats::MeanSe& mc) {
  Row r;
  r.name = std::move(name);
  r.parameters = std::move(parameters);
  r.kind = RowKind::statistical;
  r.analytic = analytic;
  r.estimate = mc.mean;
  r.se = mc.se;
  r.z = stats::z_score(mc.mean, analytic, mc.se);
  r.pass = std::isfinite(r.z) && std::abs(r.z) <= 3.0;
  return r;
}

Row tolerance_row(std::string name, std::string parameters, double target, double value, double tol) {
  Row r;
  r.name = std::move(name);
  r.parameters = std::move(parameters);
  r.kind = RowKind::tolerance;
  r.analytic = target;
  r.estimate = value;
  r.tolerance = tol;
  r.pass = std::abs(value - target) <= tol;
  return r;
}

Row bound_row(std::string name, std::string parameters, double value, double lo, double hi) {
  Row r;
  r.name = std::move(name);
  r.parameters = std::move(parameters);
  r.kind = RowKind::bound;
  r.estimate = value;
  r.lo = lo;
  r.hi = hi;
  r.analytic = std::isfinite(hi) ? hi : lo;
  r.pass = lo <= value && value <= hi;
  return r;
}

bool CheckResult::pass() const {
  return error.empty() && !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
}

bool SuiteResult::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass(); });
}

ExperimentConfig ExperimentConfig::from_json(const json& j, std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "caps") {
      if (!v.is_object()) throw ConfigError("config: 'caps' must be an object");
      for (const auto& [ck, cv] : v.items()) {
        if (!cv.is_number_integer() || cv.get<long long>() <= 0)
          throw ConfigError("config: caps." + ck + " must be a positive integer");
        if (ck == "max_replicas")
          c.caps.max_replicas = cv.get<std::size_t>();
        else if (ck == "max_population")
          c.caps.max_population = cv.get<std::size_t>();
        else
          throw ConfigError("config: unknown cap '" + ck + "'");
      }
    } else if (k == "checks") {
      if (!v.is_object()) throw ConfigError("config: 'checks' must be an object");
      for (const auto& [name, params] : v.items()) {
        const auto& spec = [&]() -> const detail::CheckSpec& {
          try {
            return find(name);
          } catch (const std::invalid_argument&) {
            throw ConfigError("config: unknown check '" + name + "'");
          }
        }();
        if (!params.is_object()) throw ConfigError("config: checks." + name + " must be an object");
        for (const auto& [pk, pv] : params.items()) {
          if (!spec.defaults.contains(pk)) throw ConfigError("config: unknown parameter " + name + "." + pk);
          if (pv.is_array() != spec.defaults.at(pk).is_array() || pv.is_number() != spec.defaults.at(pk).is_number())
            throw ConfigError("config: parameter " + name + "." + pk + " has the wrong type");
        }
      }
      c.overrides = v;
    } else if (k == "simulate-sbm" || k == "solve-dual" || k == "sample-field" || k == "moments") {
      if (!v.is_object()) throw ConfigError("config: '" + k + "' must be an object");
      c.tools[k] = v;
    } else if (k != "comment") {
      throw ConfigError("config: unknown key '" + k + "'");
    }
  }
  return c;
}

json ExperimentConfig::parameters_for(const std::string& check) const {
  json p = find(check).defaults;
  if (overrides.contains(check)) p.merge_patch(overrides.at(check));
  if (replicas && p.contains("replicas")) p["replicas"] = *replicas;
  return p;
}

json ExperimentConfig::echo() const {
  json j;
  j["seed"] = seed;
  j["replicas_override"] = replicas ? json(*replicas) : json(nullptr);
  j["caps"] = {{"max_replicas", caps.max_replicas}, {"max_population", caps.max_population}};
  json checks = json::object();
  for (const auto& s : detail::registry()) checks[s.name] = parameters_for(s.name);
  j["checks"] = checks;
  return j;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& s : detail::registry()) n.push_back(s.name);
    return n;
  }();
  return names;
}

const std::string& check_claim(const std::string& name) { return find(name).claim; }

json default_parameters(const std::string& name) { return find(name).defaults; }

CheckResult run_check(const std::string& name, const ExperimentConfig& cfg) {
  const auto& spec = find(name);
  CheckResult out;
  out.check = name;
  out.claim = spec.claim;
  out.parameters = cfg.parameters_for(name);
  const detail::CheckContext ctx{cfg, name, out.parameters, tag_of(name)};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    spec.fn(ctx, out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SuiteResult run_checks(const std::vector<std::string>& names, const ExperimentConfig& cfg,
                       const std::function<void(const CheckResult&)>& on_done) {
  for (const auto& n : names) find(n);
  SuiteResult suite;
  for (const auto& n : names) {
    CheckResult r;
    try {
      r = run_check(n, cfg);
    } catch (const std::exception& e) {
      r = CheckResult{};
      r.check = n;
      r.claim = find(n).claim;
      r.parameters = cfg.parameters_for(n);
      r.error = e.what();
    }
    if (on_done) on_done(r);
    suite.checks.push_back(std::move(r));
  }
  return suite;
}

json report_json(const SuiteResult& suite, const ExperimentConfig& cfg) {
  json checks = json::array();
  for (const auto& c : suite.checks) {
    json rows = json::array();
    for (const auto& r : c.rows) rows.push_back(row_json(r));
    json j{{"check", c.check}, {"claim", c.claim}, {"pass", c.pass()}, {"rows", rows}, {"notes", c.notes},
           {"data", c.data}};
    if (!c.error.empty()) j["error"] = c.error;
    if (!c.series.empty()) {
      json series = json::array();
      for (const auto& s : c.series) series.push_back({{"label", s.label}, {"x", s.x}, {"y", s.y}});
      j["series"] = series;
    }
    checks.push_back(j);
  }
  return {{"tool", "catou"},
          {"seed", cfg.seed},
          {"all_pass", suite.pass()},
          {"environment", io::environment_fingerprint()},
          {"config", cfg.echo()},
          {"checks", checks}};
}

json timing_json(const SuiteResult& suite) {
  json checks = json::array();
  double total = 0.0;
  for (const auto& c : suite.checks) {
    checks.push_back({{"check", c.check}, {"wall_seconds", c.wall_seconds}});
    total += c.wall_seconds;
  }
  return {{"threads", max_threads()}, {"total_seconds", total}, {"checks", checks}};
}

std::string results_csv(const CheckResult& c) {
  std::vector<moments::ResultRow> rows;
  for (const auto& r : c.rows)
    rows.push_back({c.check, r.parameters.empty() ? r.name : r.name + "; " + r.parameters, r.analytic, r.estimate,
                    r.kind == RowKind::statistical ? r.se : 0.0, r.pass});
  std::ostringstream os;
  moments::write_results_csv(os, rows);
  return os.str();
}

void write_outputs(const SuiteResult& suite, const ExperimentConfig& cfg, const std::filesystem::path& out) {
  io::ensure_directory(out);
  io::write_text(out / "report.json", io::dump(report_json(suite, cfg)));
  io::write_text(out / "timing.json", io::dump(timing_json(suite)));
  for (const auto& c : suite.checks) {
    io::write_text(out / (c.check + ".csv"), results_csv(c));
    if (c.series.empty()) continue;
    auto opt = c.plot;
    if (opt.title.empty()) opt.title = c.check;
    auto series = c.series;
    if (opt.loglog) {
      // exact zeros (e.g. an error at rounding level) have no place on a log axis
      for (auto& s : series) {
        plot::Series kept{s.label, {}, {}, s.line};
        for (std::size_t i = 0; i < s.x.size(); ++i)
          if (s.x[i] > 0.0 && s.y[i] > 0.0) {
            kept.x.push_back(s.x[i]);
            kept.y.push_back(s.y[i]);
          }
        s = std::move(kept);
      }
    }
    try {
      plot::emit_plot(series, out / (c.check + ".svg"), opt);
    } catch (const std::invalid_argument& e) {
      std::cerr << "warning: no plot for " << c.check << ": " << e.what() << '\n';
    }
  }
}

}  // namespace catou::harness
