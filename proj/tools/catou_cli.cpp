#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "catou/dual_pde.hpp"
#include "catou/gaussian_field.hpp"
#include "catou/harness.hpp"
#include "catou/io.hpp"
#include "catou/moments.hpp"
#include "catou/parallel.hpp"
#include "catou/plot.hpp"
#include "catou/rng.hpp"
#include "catou/superprocess.hpp"

using namespace catou;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<std::size_t> replicas;
  int threads = 0;
};

harness::ExperimentConfig load(const Common& c) {
  json j;
  if (!c.config.empty()) j = io::read_json(c.config);
  auto cfg = harness::ExperimentConfig::from_json(j, c.seed.value_or(0));
  cfg.replicas = c.replicas;
  return cfg;
}

std::uint64_t need_seed(const Common& c) {
  if (!c.seed) throw harness::ConfigError("--seed is required for this command");
  return *c.seed;
}

// section of the config merged over defaults; unknown keys rejected
json section(const harness::ExperimentConfig& cfg, const std::string& name, json defaults) {
  if (cfg.tools.contains(name)) {
    for (const auto& [k, v] : cfg.tools.at(name).items())
      if (!defaults.contains(k)) throw harness::ConfigError("config: unknown parameter " + name + "." + k);
    defaults.merge_patch(cfg.tools.at(name));
  }
  return defaults;
}

superprocess::ParticleMeasure initial_measure(const json& s) {
  const auto kind = s.at("initial").get<std::string>();
  const double N = s.at("N").get<double>(), mass = s.at("mass").get<double>();
  if (kind == "point") return superprocess::ParticleMeasure::point_mass(0.0, mass, N);
  if (kind == "uniform")
    return superprocess::ParticleMeasure::uniform_cloud(s.at("a").get<double>(), s.at("b").get<double>(), mass,
                                                        static_cast<std::size_t>(std::lround(mass * N)));
  throw harness::ConfigError("initial must be 'point' or 'uniform'");
}

int simulate_sbm(const Common& c) {
  const auto cfg = load(c);
  const auto seed = need_seed(c);
  const auto s = section(cfg, "simulate-sbm",
                         {{"N", 32.0}, {"T", 1.0}, {"dt", 0.1}, {"kappa", 1.0}, {"initial", "point"}, {"mass", 1.0},
                          {"a", 0.0}, {"b", 1.0}, {"replicas", 4}, {"scheme", "exact"}});
  const auto n = c.replicas.value_or(s.at("replicas").get<std::size_t>());
  if (n > cfg.caps.max_replicas) throw harness::ResourceCapError("replicas above cap");
  superprocess::SbmOptions opt;
  opt.population_cap = cfg.caps.max_population;
  opt.scheme = s.at("scheme") == "per_step" ? superprocess::BranchingScheme::per_step : superprocess::BranchingScheme::exact;
  const auto init = initial_measure(s);
  std::vector<superprocess::CatalystPath> paths(n);
  for_each_index(n, [&](std::size_t r) {
    paths[r] = superprocess::simulate_sbm(init, s.at("N").get<double>(), s.at("T").get<double>(),
                                          s.at("dt").get<double>(), {s.at("kappa").get<double>(), 1, 2.0}, seed,
                                          stream_id(0x5B, r), opt);
  });
  io::ensure_directory(c.out);
  std::ostringstream os;
  superprocess::write_paths_csv(os, paths);
  io::write_text(fs::path(c.out) / "paths.csv", os.str());
  auto side = json::parse(superprocess::sidecar_json(paths.front()));
  side["replicas"] = n;
  io::write_text(fs::path(c.out) / "paths.json", io::dump(side));
  std::printf("wrote %zu paths to %s\n", n, (fs::path(c.out) / "paths.csv").c_str());
  return 0;
}

int solve_dual(const Common& c) {
  const auto cfg = load(c);
  const auto s = section(cfg, "solve-dual",
                         {{"psi_amplitude", 1.5}, {"psi_center", 0.0}, {"psi_width", 0.6}, {"psi_constant", 0.0},
                          {"forcing", 0.0}, {"beta", 1.0}, {"t", 1.0}, {"dt", 0.01}, {"kappa", 1.0},
                          {"stable_index", 2.0}, {"grid_n", 256}, {"grid_lo", -8.0}, {"grid_length", 16.0},
                          {"stride", 10}, {"scheme", "splitting"}, {"picard_iterations", 200}});
  const kernels::PeriodicGrid g{1, s.at("grid_n").get<int>(), s.at("grid_lo").get<double>(),
                                s.at("grid_length").get<double>()};
  dual::DualProblem p;
  const kernels::GaussianBump bump{s.at("psi_amplitude").get<double>(), s.at("psi_center").get<double>(),
                                   s.at("psi_width").get<double>()};
  const double base = s.at("psi_constant").get<double>();
  p.psi = kernels::GridFunction::sample(g, [&](double x) { return base + bump(x); });
  const double f = s.at("forcing").get<double>();
  if (f != 0.0) p.forcing = [f](double, std::span<double> o) { std::fill(o.begin(), o.end(), f); };
  p.beta = s.at("beta").get<double>();
  p.kernel = {s.at("kappa").get<double>(), 1, s.at("stable_index").get<double>()};
  p.t1 = s.at("t").get<double>();
  const auto sol = s.at("scheme") == "picard"
                       ? dual::picard_volterra_oracle(p, s.at("dt").get<double>(), s.at("picard_iterations").get<int>())
                       : dual::solve_dual(p, s.at("dt").get<double>());
  io::ensure_directory(c.out);
  std::ostringstream os;
  dual::write_solution_csv(os, sol, s.at("stride").get<std::size_t>());
  io::write_text(fs::path(c.out) / "solution.csv", os.str());
  io::write_text(fs::path(c.out) / "solution.json", io::dump(json::parse(dual::solution_metadata_json(sol))));
  for (const auto& w : sol.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("scheme %s, %zu stored steps\n", sol.scheme.c_str(), sol.times.size());
  return 0;
}

int sample_field(const Common& c) {
  const auto cfg = load(c);
  const auto seed = need_seed(c);
  const auto s = section(cfg, "sample-field",
                         {{"catalyst", "sbm"}, {"N", 32.0}, {"mass", 1.0}, {"initial", "point"}, {"a", 0.0},
                          {"b", 1.0}, {"t", 1.0}, {"dt", 0.01}, {"kappa_catalyst", 1.0}, {"kappa_field", 0.5},
                          {"points", {-0.5, 0.0, 0.5}}, {"replicas", 8}, {"representation", "points"}, {"K", 32}});
  const double t = s.at("t").get<double>();
  const auto times = superprocess::uniform_times(t, s.at("dt").get<double>());
  superprocess::CatalystPath path;
  if (s.at("catalyst") == "atom") {
    path = superprocess::simulate_atom_catalyst(times, 1, seed, stream_id(0xF1, 0));
  } else {
    superprocess::SbmOptions opt;
    opt.population_cap = cfg.caps.max_population;
    path = superprocess::simulate_sbm(initial_measure(s), s.at("N").get<double>(), times,
                                      {s.at("kappa_catalyst").get<double>(), 1, 2.0}, seed, stream_id(0xF1, 0), opt);
  }
  const auto n = c.replicas.value_or(s.at("replicas").get<std::size_t>());
  if (n > cfg.caps.max_replicas) throw harness::ResourceCapError("replicas above cap");
  io::ensure_directory(c.out);
  const double kx = s.at("kappa_field").get<double>();
  if (s.at("representation") == "eigen") {
    const auto eig = kernels::dirichlet_eigensystem(1, kx, s.at("K").get<int>());
    std::ostringstream os;
    for (std::size_t r = 0; r < n; ++r)
      field::write_eigen_field_csv(os, field::sample_eigen_path(path, eig, times, seed, stream_id(0xF2, r)), r);
    io::write_text(fs::path(c.out) / "eigen_field.csv", os.str());
  } else {
    const auto pts = s.at("points").get<std::vector<double>>();
    const auto cov = field::quenched_covariance(path, pts, t, kx);
    const auto x = field::sample_quenched_field(cov, n, seed, 0xF3);
    std::ostringstream os;
    field::write_samples_csv(os, x, t);
    io::write_text(fs::path(c.out) / "field_samples.csv", os.str());
    io::write_text(fs::path(c.out) / "covariance.json", io::dump(json::parse(field::covariance_metadata_json(cov))));
  }
  std::ostringstream ps;
  superprocess::write_paths_csv(ps, std::span(&path, 1));
  io::write_text(fs::path(c.out) / "catalyst.csv", ps.str());
  std::printf("sampled %zu replicas\n", n);
  return 0;
}

int moments_cmd(const Common& c) {
  const auto cfg = load(c);
  const auto s = section(cfg, "moments",
                         {{"times", {0.25, 0.5, 1.0, 2.0}}, {"points", {0.0, 0.5}}, {"kappa", 1.0}, {"N", 0.0},
                          {"smoothing", 0.0}});
  const auto ts = s.at("times").get<std::vector<double>>();
  const auto xs = s.at("points").get<std::vector<double>>();
  const double kappa = s.at("kappa").get<double>(), N = s.at("N").get<double>(), h = s.at("smoothing").get<double>();
  std::ostringstream os;
  os.precision(17);
  os << "quantity,t1,t2,x1,x2,value,error\n";
  for (double t : ts)
    for (double x : xs)
      os << "first_moment_delta0," << t << ",," << x << ",," << moments::first_moment_density(t, x, moments::Initial::delta0, kappa)
         << ",0\n";
  for (double t1 : ts)
    for (double t2 : ts) {
      if (t2 < t1) continue;
      for (double x1 : xs)
        for (double x2 : xs) {
          const moments::MomentQuery q{t1, t2, x1, x2, moments::Initial::delta0, kappa, h};
          const auto c2 = moments::second_moment_density(q);
          os << "second_order_delta0," << t1 << ',' << t2 << ',' << x1 << ',' << x2 << ',' << c2.value << ','
             << c2.error << '\n';
          if (N == 0.0 || N >= 1.0) {
            const auto full = moments::full_second_moment_density(q, N);
            os << "second_moment_delta0," << t1 << ',' << t2 << ',' << x1 << ',' << x2 << ',' << full.value << ','
               << full.error << '\n';
          }
          const auto leb = moments::second_moment_density({t1, t2, x1, x2, moments::Initial::lebesgue, kappa, h});
          os << "second_order_lebesgue," << t1 << ',' << t2 << ',' << x1 << ',' << x2 << ',' << leb.value << ','
             << leb.error << '\n';
        }
    }
  moments::FourthMomentOptions fo;
  fo.N = N;
  for (double t : ts) {
    const auto f = moments::fourth_moment_l2(t, fo);
    os << "fourth_moment_l2," << t << ",,,," << f.value << ',' << f.error << '\n';
  }
  io::ensure_directory(c.out);
  io::write_text(fs::path(c.out) / "moments.csv", os.str());
  std::printf("wrote %s\n", (fs::path(c.out) / "moments.csv").c_str());
  return 0;
}

void print_check(const harness::CheckResult& r) {
  std::printf("%s %-24s", r.pass() ? "PASS" : "FAIL", r.check.c_str());
  if (!r.error.empty()) std::printf(" error: %s", r.error.c_str());
  std::printf("  (%.1f s)\n", r.wall_seconds);
  for (const auto& row : r.rows) {
    if (row.kind == harness::RowKind::statistical)
      std::printf("    %s %s [%s]: analytic %.6g, estimate %.6g, se %.3g, z %.2f\n", row.pass ? "ok " : "BAD",
                  row.name.c_str(), row.parameters.c_str(), row.analytic, row.estimate, row.se, row.z);
    else
      std::printf("    %s %s [%s]: %.6g\n", row.pass ? "ok " : "BAD", row.name.c_str(), row.parameters.c_str(),
                  row.estimate);
  }
  std::fflush(stdout);
}

int verify(const Common& c, const std::vector<std::string>& names) {
  auto cfg = load(c);
  cfg.seed = need_seed(c);
  const auto suite = harness::run_checks(names, cfg, print_check);
  harness::write_outputs(suite, cfg, c.out);
  std::printf("%s: %zu checks, report in %s\n", suite.pass() ? "ALL PASS" : "FAILURES", suite.checks.size(),
              (fs::path(c.out) / "report.json").c_str());
  return suite.pass() ? 0 : 1;
}

int plot_cmd(const Common& c, const std::string& input, bool loglog, bool slope, const std::string& title) {
  // CSV with header x,y[,series]
  std::istringstream is(io::read_text(input));
  std::string line;
  std::getline(is, line);
  std::vector<plot::Series> series;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string a, b, name;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, name, ',');
    auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) { return s.label == name; });
    if (it == series.end()) {
      series.push_back({name, {}, {}});
      it = series.end() - 1;
    }
    it->x.push_back(std::stod(a));
    it->y.push_back(std::stod(b));
  }
  plot::PlotOptions opt;
  opt.title = title.empty() ? fs::path(input).stem().string() : title;
  opt.xlabel = "x";
  opt.ylabel = "y";
  opt.loglog = loglog;
  if (slope) opt.fit_slope_of = 0;
  io::ensure_directory(c.out);
  const auto path = fs::path(c.out) / (fs::path(input).stem().string() + ".svg");
  plot::emit_plot(series, path, opt);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catalytic Ornstein-Uhlenbeck field: simulation and verification"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "random seed (u64)");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--replicas", c.replicas, "override replica counts")->check(CLI::PositiveNumber);
    sub->add_option("--threads", c.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  };
  auto* sim = app.add_subcommand("simulate-sbm", "simulate branching catalyst paths");
  auto* dual = app.add_subcommand("solve-dual", "solve the dual evolution equation");
  auto* field = app.add_subcommand("sample-field", "sample the quenched field for one catalyst path");
  auto* mom = app.add_subcommand("moments", "tabulate analytic moment densities");
  auto* ver = app.add_subcommand("verify", "run one named check");
  auto* all = app.add_subcommand("verify-all", "run every check");
  auto* plt = app.add_subcommand("plot", "render a CSV (x,y[,series]) as SVG");
  for (auto* s : {sim, dual, field, mom, ver, all, plt}) add_common(s);
  std::string check;
  ver->add_option("check", check, "check name")->required();
  std::string input, title;
  bool loglog = false, slope = false;
  plt->add_option("--input", input, "CSV file")->required()->check(CLI::ExistingFile);
  plt->add_option("--title", title);
  plt->add_flag("--loglog", loglog);
  plt->add_flag("--slope", slope, "annotate the fitted log-log slope of the first series");
  auto* list = app.add_subcommand("list-checks", "print the registered check names");

  CLI11_PARSE(app, argc, argv);
  try {
    if (c.threads > 0) set_threads(c.threads);
    if (*sim) return simulate_sbm(c);
    if (*dual) return solve_dual(c);
    if (*field) return sample_field(c);
    if (*mom) return moments_cmd(c);
    if (*ver) return verify(c, {check});
    if (*all) return verify(c, harness::check_names());
    if (*plt) return plot_cmd(c, input, loglog, slope, title);
    if (*list) {
      for (const auto& n : harness::check_names()) std::printf("%s\n", n.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
