#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "catou/harness.hpp"
#include "catou/plot.hpp"

using namespace catou;
using namespace catou::harness;
namespace fs = std::filesystem;

namespace {

boost::property_tree::ptree parse_xml(const std::string& s) {
  std::istringstream is(s);
  boost::property_tree::ptree pt;
  boost::property_tree::read_xml(is, pt);
  return pt;
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("catou_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Registry, FourteenChecksWithClaimsAndDefaults) {
  const auto& names = check_names();
  EXPECT_EQ(names.size(), 14u);
  for (const auto& n : names) {
    EXPECT_FALSE(check_claim(n).empty()) << n;
    EXPECT_TRUE(default_parameters(n).is_object()) << n;
  }
  EXPECT_THROW(check_claim("no-such-check"), std::invalid_argument);
  EXPECT_THROW(run_check("no-such-check", ExperimentConfig{}), std::invalid_argument);
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_THROW(ExperimentConfig::from_json(json::array(), 1), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json({{"bogus", 1}}, 1), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json({{"checks", {{"no-such-check", json::object()}}}}, 1), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json({{"checks", {{"affine-ou", {{"nope", 1}}}}}}, 1), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json({{"checks", {{"affine-ou", {{"us", 0.5}}}}}}, 1), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json({{"caps", {{"max_replicas", -3}}}}, 1), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json({{"caps", {{"max_gpus", 3}}}}, 1), ConfigError);
  EXPECT_NO_THROW(ExperimentConfig::from_json(nullptr, 1));
}

TEST(Config, OverridesMergeAndEcho) {
  auto cfg = ExperimentConfig::from_json(
      {{"comment", "x"}, {"checks", {{"affine-ou", {{"replicas", 123}}}}}, {"caps", {{"max_replicas", 5000}}}}, 9);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.caps.max_replicas, 5000u);
  auto p = cfg.parameters_for("affine-ou");
  EXPECT_EQ(p["replicas"], 123);
  EXPECT_EQ(p["beta"], default_parameters("affine-ou")["beta"]);
  cfg.replicas = 77;
  EXPECT_EQ(cfg.parameters_for("affine-ou")["replicas"], 77);
  EXPECT_FALSE(cfg.parameters_for("dual-convergence").contains("replicas"));
  const auto e = cfg.echo();
  EXPECT_EQ(e["checks"]["affine-ou"]["replicas"], 77);
  EXPECT_EQ(e["caps"]["max_replicas"], 5000);
}

TEST(Config, OutOfRangeParameterIsConfigError) {
  const auto cfg = ExperimentConfig::from_json({{"checks", {{"dual-convergence", {{"t", -1.0}}}}}}, 1);
  EXPECT_THROW(run_check("dual-convergence", cfg), ConfigError);
}

TEST(Caps, ReplicaCapFailsLoudly) {
  const auto cfg = ExperimentConfig::from_json({{"caps", {{"max_replicas", 10}}}}, 1);
  EXPECT_THROW(run_check("affine-ou", cfg), ResourceCapError);
  const auto suite = run_checks({"affine-ou"}, cfg);
  ASSERT_EQ(suite.checks.size(), 1u);
  EXPECT_FALSE(suite.pass());
  EXPECT_NE(suite.checks[0].error.find("cap"), std::string::npos);
}

TEST(Rows, PassRules) {
  EXPECT_TRUE(statistical_row("a", "", 1.0, {1.2, 0.1}).pass);
  EXPECT_FALSE(statistical_row("a", "", 1.0, {1.4, 0.1}).pass);
  EXPECT_FALSE(statistical_row("a", "", 1.0, {1.1, 0.0}).pass);
  EXPECT_TRUE(tolerance_row("t", "", 0.5, 0.5 + 1e-9, 1e-8).pass);
  EXPECT_FALSE(tolerance_row("t", "", 0.5, 0.5 + 1e-7, 1e-8).pass);
  const auto b = bound_row("b", "", 2.0, 1.0, 3.0);
  EXPECT_TRUE(b.pass);
  EXPECT_EQ(b.analytic, 3.0);
  EXPECT_FALSE(bound_row("b", "", 0.5, 1.0, INFINITY).pass);
  EXPECT_EQ(bound_row("b", "", 0.5, 1.0, INFINITY).analytic, 1.0);
}

TEST(Checks, DeterministicCsvForSameSeed) {
  const auto cfg = ExperimentConfig::from_json(nullptr, 42);
  const auto a = run_check("propagator-compose", cfg), b = run_check("propagator-compose", cfg);
  EXPECT_TRUE(a.pass());
  EXPECT_EQ(results_csv(a), results_csv(b));
  EXPECT_EQ(results_csv(a).rfind("check,parameters,analytic,mc_estimate,se,pass\n", 0), 0u);
}

TEST(Checks, DualConvergencePassesWithDefaults) {
  const auto r = run_check("dual-convergence", ExperimentConfig::from_json(nullptr, 42));
  EXPECT_TRUE(r.pass());
  for (const auto& row : r.rows)
    if (row.name.rfind("error ratio", 0) == 0) EXPECT_NEAR(row.estimate, 4.0, 0.2) << row.parameters;
}

TEST(Outputs, ReportTimingCsvAndSvg) {
  const auto cfg = ExperimentConfig::from_json(nullptr, 42);
  const auto suite = run_checks({"dual-convergence", "affine-cir"}, cfg);
  const auto dir = scratch_dir("outputs");
  write_outputs(suite, cfg, dir);
  for (const char* f : {"report.json", "timing.json", "dual-convergence.csv", "affine-cir.csv", "dual-convergence.svg"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto report = io::read_json(dir / "report.json");
  EXPECT_EQ(report["seed"], 42);
  EXPECT_EQ(report["all_pass"], suite.pass());
  EXPECT_EQ(report["checks"].size(), 2u);
  EXPECT_EQ(report.dump().find("wall_seconds"), std::string::npos);
  EXPECT_NO_THROW(parse_xml(io::read_text(dir / "dual-convergence.svg")));
  // the report depends on (config, seed) only
  EXPECT_EQ(io::dump(report_json(run_checks({"dual-convergence", "affine-cir"}, cfg), cfg)),
            io::read_text(dir / "report.json"));
  fs::remove_all(dir);
}

TEST(Plot, SinglePointIsValidXml) {
  const std::vector<plot::Series> s{{"one & only <point>", {1.0}, {2.0}, false}};
  const auto svg = plot::render_svg(s, {"title", "x", "y"});
  const auto pt = parse_xml(svg);
  EXPECT_TRUE(pt.get_child_optional("svg"));
  EXPECT_NE(svg.find("one &amp; only &lt;point&gt;"), std::string::npos);
}

TEST(Plot, RejectsBadSeries) {
  plot::PlotOptions opt;
  EXPECT_THROW(plot::render_svg(std::vector<plot::Series>{}, opt), std::invalid_argument);
  EXPECT_THROW(plot::render_svg(std::vector<plot::Series>{{"e", {}, {}}}, opt), std::invalid_argument);
  EXPECT_THROW(plot::render_svg(std::vector<plot::Series>{{"r", {1, 2}, {1}}}, opt), std::invalid_argument);
  EXPECT_THROW(plot::render_svg(std::vector<plot::Series>{{"n", {1, 2}, {1, NAN}}}, opt), std::invalid_argument);
  opt.loglog = true;
  EXPECT_THROW(plot::render_svg(std::vector<plot::Series>{{"z", {1, 2}, {0, 1}}}, opt), std::invalid_argument);
}

TEST(Plot, LogLogSlopeAnnotation) {
  plot::Series s{"t^2", {0.25, 0.5, 1, 2}, {}};
  for (double x : s.x) s.y.push_back(3.0 * x * x);
  EXPECT_NEAR(plot::loglog_slope(s), 2.0, 1e-12);
  plot::PlotOptions opt;
  opt.loglog = true;
  opt.fit_slope_of = 0;
  const std::vector<plot::Series> v{s};
  const auto svg = plot::render_svg(v, opt);
  EXPECT_NE(svg.find("fitted slope 2.0000"), std::string::npos);
  EXPECT_NO_THROW(parse_xml(svg));
}

TEST(Plot, UnwritablePathThrows) {
  const std::vector<plot::Series> v{{"a", {1.0}, {1.0}}};
  EXPECT_THROW(plot::emit_plot(v, "/proc/catou/nope/plot.svg", {}), std::exception);
}
