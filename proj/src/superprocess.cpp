#include "catou/superprocess.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "catou/rng.hpp"
#include "json.hpp"

namespace catou::superprocess {

ParticleMeasure ParticleMeasure::point_mass(std::span<const double> x, double mass, double N) {
  if (!(N >= 1.0)) throw std::invalid_argument("point_mass: N must be >= 1");
  if (!(mass >= 0.0)) throw std::invalid_argument("point_mass: negative mass");
  ParticleMeasure m;
  m.d = static_cast<int>(x.size());
  m.mass_per_particle = 1.0 / N;
  const auto n = static_cast<std::size_t>(std::llround(mass * N));
  for (std::size_t i = 0; i < n; ++i) m.positions.insert(m.positions.end(), x.begin(), x.end());
  return m;
}

ParticleMeasure ParticleMeasure::point_mass(double x, double mass, double N) {
  const double p[1] = {x};
  return point_mass(p, mass, N);
}

ParticleMeasure ParticleMeasure::uniform_cloud(double a, double b, double mass, std::size_t n) {
  if (!(b > a) || n == 0) throw std::invalid_argument("uniform_cloud: empty support");
  ParticleMeasure m;
  m.mass_per_particle = mass / static_cast<double>(n);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) m.positions.push_back(a + (i + 0.5) * h);
  return m;
}

void ParticleMeasure::validate() const {
  if (d < 1) throw std::invalid_argument("ParticleMeasure: dimension must be >= 1");
  if (positions.size() % d != 0) throw std::invalid_argument("ParticleMeasure: ragged positions");
  if (!(mass_per_particle >= 0.0)) throw std::invalid_argument("ParticleMeasure: negative mass");
  for (double v : positions)
    if (!std::isfinite(v)) throw std::invalid_argument("ParticleMeasure: non-finite coordinate");
}

const char* to_string(CatalystKind k) {
  switch (k) {
    case CatalystKind::sbm: return "sbm";
    case CatalystKind::atom: return "atom";
    case CatalystKind::frozen: return "frozen";
  }
  return "?";
}

void CatalystPath::validate() const {
  if (times.empty() || times.size() != states.size())
    throw std::invalid_argument("CatalystPath: times and states must be nonempty and aligned");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("CatalystPath: times must be strictly increasing");
    if (states[i].time_stamp != times[i])
      throw std::invalid_argument("CatalystPath: state time stamp mismatch");
  }
}

std::vector<double> uniform_times(double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("uniform_times: dt must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("uniform_times: negative horizon");
  std::vector<double> t{0.0};
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  for (std::size_t i = 1; i < n; ++i) t.push_back(static_cast<double>(i) * dt);
  if (T > 0.0) t.push_back(T);
  return t;
}

std::vector<double> refined_times(double T, double dt, double ratio, double tau_min) {
  if (!(ratio > 1.0) || !(tau_min > 0.0) || !(tau_min < dt))
    throw std::invalid_argument("refined_times: need ratio > 1 and 0 < tau_min < dt");
  const double start = std::max(T - dt, 0.0);
  auto t = start > 0.0 ? uniform_times(start, dt) : std::vector<double>{0.0};
  std::vector<double> tau;
  for (double v = tau_min; v < dt; v *= ratio) tau.push_back(v);
  for (auto it = tau.rbegin(); it != tau.rend(); ++it)
    if (T - *it > t.back()) t.push_back(T - *it);
  if (T > t.back()) t.push_back(T);
  return t;
}

namespace {

void check_times(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("record grid is empty");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("record grid must be strictly increasing");
}

ParticleMeasure snapshot(const std::vector<double>& pos, int d, double mass, double t) {
  ParticleMeasure s;
  s.d = d;
  s.positions = pos;
  s.mass_per_particle = mass;
  s.time_stamp = t;
  return s;
}

struct Population {
  int d;
  double sd_rate;  // sqrt(2 kappa)
  std::vector<double> pos;
  std::vector<double> last;
  std::size_t cap;

  std::size_t size() const { return last.size(); }

  template <class G, class Dist>
  void advance(std::size_t i, double t, G& g, Dist& normal) {
    const double s = sd_rate * std::sqrt(t - last[i]);
    for (int a = 0; a < d; ++a) pos[i * d + a] += s * normal(g);
    last[i] = t;
  }
  void kill(std::size_t i) {
    const std::size_t j = size() - 1;
    if (i != j) {
      for (int a = 0; a < d; ++a) pos[i * d + a] = pos[j * d + a];
      last[i] = last[j];
    }
    pos.resize(j * d);
    last.pop_back();
  }
  void duplicate(std::size_t i) {
    if (size() + 1 > cap) throw PopulationOverflow("simulate_sbm: population cap exceeded");
    for (int a = 0; a < d; ++a) pos.push_back(pos[i * d + a]);
    last.push_back(last[i]);
  }
};

}  // namespace

CatalystPath simulate_sbm(const ParticleMeasure& initial, double N, std::span<const double> times,
                          const HeatKernelParams& params, std::uint64_t seed, std::uint64_t stream,
                          const SbmOptions& opt) {
  params.validate();
  if (params.stable_index != 2.0)
    throw std::invalid_argument("simulate_sbm: unsupported regime, only a = 2, beta = 1 particles");
  if (!(N >= 1.0)) throw std::invalid_argument("simulate_sbm: N must be >= 1");
  initial.validate();
  if (initial.d != params.d) throw std::invalid_argument("simulate_sbm: dimension mismatch");
  if (params.d > 8) throw std::invalid_argument("simulate_sbm: d > 8 not supported");
  if (std::abs(initial.mass_per_particle * N - 1.0) > 1e-12)
    throw std::invalid_argument("simulate_sbm: initial particles must carry mass 1/N");
  check_times(times);
  if (initial.count() > opt.population_cap)
    throw PopulationOverflow("simulate_sbm: initial population exceeds cap");

  CatalystPath path;
  path.kind = CatalystKind::sbm;
  path.seed = seed;
  path.stream = stream;
  path.N = N;
  path.kappa = params.kappa;
  path.d = params.d;
  path.dt = times.size() > 1 ? times[1] - times[0] : 0.0;
  path.times.assign(times.begin(), times.end());

  Philox4x32 g(seed, stream);
  std::normal_distribution<double> normal;
  const int d = params.d;
  const double mass = 1.0 / N;
  Population pop{d, std::sqrt(2.0 * params.kappa), initial.positions,
                 std::vector<double>(initial.count(), times[0]), opt.population_cap};
  path.states.push_back(snapshot(pop.pos, d, mass, times[0]));

  if (opt.scheme == BranchingScheme::per_step) {
    double max_step = 0.0;
    for (std::size_t r = 1; r < times.size(); ++r) {
      const double h = times[r] - times[r - 1];
      max_step = std::max(max_step, h);
      const double p = -std::expm1(-2.0 * N * h);
      const double s = pop.sd_rate * std::sqrt(h);
      std::vector<double> next;
      next.reserve(pop.pos.size() + 16);
      for (std::size_t i = 0; i < pop.size(); ++i) {
        double x[8];
        for (int a = 0; a < d; ++a) x[a] = pop.pos[i * d + a] + s * normal(g);
        int copies = 1;
        if (g.uniform() < p) copies = g.uniform() < 0.5 ? 0 : 2;
        for (int c = 0; c < copies; ++c) next.insert(next.end(), x, x + d);
      }
      if (next.size() / d > opt.population_cap)
        throw PopulationOverflow("simulate_sbm: population cap exceeded");
      pop.pos.swap(next);
      pop.last.assign(pop.pos.size() / d, times[r]);
      path.states.push_back(snapshot(pop.pos, d, mass, times[r]));
    }
    if (2.0 * N * max_step > 0.1)
      path.warnings.push_back("per-step branching with 2 N dt > 0.1; variance is biased low");
    return path;
  }

  const double rate = 2.0 * N;
  double t = times[0];
  for (std::size_t r = 1; r < times.size(); ++r) {
    const double target = times[r];
    while (pop.size() > 0) {
      const double wait = -std::log(g.uniform()) / (rate * static_cast<double>(pop.size()));
      if (t + wait >= target) break;
      t += wait;
      const auto i = std::min(static_cast<std::size_t>(g.uniform() * pop.size()), pop.size() - 1);
      pop.advance(i, t, g, normal);
      if (g.uniform() < 0.5)
        pop.kill(i);
      else
        pop.duplicate(i);
    }
    t = target;
    for (std::size_t i = 0; i < pop.size(); ++i) pop.advance(i, t, g, normal);
    path.states.push_back(snapshot(pop.pos, d, mass, t));
  }
  return path;
}

CatalystPath simulate_sbm(const ParticleMeasure& initial, double N, double T, double dt,
                          const HeatKernelParams& params, std::uint64_t seed, std::uint64_t stream,
                          const SbmOptions& opt) {
  const auto times = uniform_times(T, dt);
  auto p = simulate_sbm(initial, N, times, params, seed, stream, opt);
  p.dt = dt;
  return p;
}

CatalystPath simulate_atom_catalyst(std::span<const double> times, int d, std::uint64_t seed,
                                    std::uint64_t stream) {
  if (d < 1) throw std::invalid_argument("simulate_atom_catalyst: dimension must be >= 1");
  check_times(times);
  if (times[0] != 0.0) throw std::invalid_argument("simulate_atom_catalyst: grid must start at 0");
  CatalystPath path;
  path.kind = CatalystKind::atom;
  path.seed = seed;
  path.stream = stream;
  path.kappa = 0.5;
  path.d = d;
  path.dt = times.size() > 1 ? times[1] - times[0] : 0.0;
  path.times.assign(times.begin(), times.end());
  Philox4x32 g(seed, stream);
  std::normal_distribution<double> normal;
  std::vector<double> b(d, 0.0);
  path.states.push_back(snapshot(b, d, 1.0, 0.0));
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double s = std::sqrt(times[i] - times[i - 1]);
    for (auto& v : b) v += s * normal(g);
    path.states.push_back(snapshot(b, d, 1.0, times[i]));
  }
  return path;
}

CatalystPath simulate_atom_catalyst(double T, double dt, int d, std::uint64_t seed, std::uint64_t stream) {
  auto p = simulate_atom_catalyst(uniform_times(T, dt), d, seed, stream);
  p.dt = dt;
  return p;
}

CatalystPath frozen_path(const ParticleMeasure& state, std::span<const double> times) {
  state.validate();
  check_times(times);
  CatalystPath path;
  path.kind = CatalystKind::frozen;
  path.d = state.d;
  path.N = state.mass_per_particle > 0 ? 1.0 / state.mass_per_particle : 1.0;
  path.times.assign(times.begin(), times.end());
  for (double t : times) {
    auto s = state;
    s.time_stamp = t;
    path.states.push_back(std::move(s));
  }
  return path;
}

double measure_pairing(const ParticleMeasure& state, const std::function<double(std::span<const double>)>& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < state.count(); ++i) s += phi(state.at(i));
  return state.mass_per_particle * s;
}

double measure_pairing(const ParticleMeasure& state, const std::function<double(double)>& phi) {
  if (state.d != 1) throw std::invalid_argument("measure_pairing: scalar test function needs d = 1");
  double s = 0.0;
  for (double x : state.positions) s += phi(x);
  return state.mass_per_particle * s;
}

double occupation_integral(const CatalystPath& path,
                           const std::function<double(double, std::span<const double>)>& forcing) {
  if (path.times.empty()) throw std::invalid_argument("occupation_integral: empty path");
  std::vector<double> f(path.times.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = path.times[i];
    f[i] = measure_pairing(path.states[i], [&](std::span<const double> x) { return forcing(s, x); });
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) acc += 0.5 * (path.times[i] - path.times[i - 1]) * (f[i] + f[i - 1]);
  return acc;
}

double occupation_integral(const CatalystPath& path, const std::function<double(double, double)>& forcing) {
  if (path.d != 1) throw std::invalid_argument("occupation_integral: scalar forcing needs d = 1");
  return occupation_integral(path, [&](double s, std::span<const double> x) { return forcing(s, x[0]); });
}

std::vector<double> simulate_mass(double initial_mass, double N, std::span<const double> times,
                                  std::uint64_t seed, std::uint64_t stream, std::size_t population_cap) {
  if (!(N >= 1.0)) throw std::invalid_argument("simulate_mass: N must be >= 1");
  check_times(times);
  Philox4x32 g(seed, stream);
  auto n = static_cast<std::int64_t>(std::llround(initial_mass * N));
  std::vector<double> out{static_cast<double>(n) / N};
  for (std::size_t r = 1; r < times.size(); ++r) {
    if (n > 0) {
      const double nh = N * (times[r] - times[r - 1]);
      const double keep = 1.0 / (1.0 + nh);
      std::binomial_distribution<std::int64_t> surv(n, keep);
      const std::int64_t s = surv(g);
      n = s;
      if (s > 0) {
        // each surviving line holds a Geometric(keep) number of particles on {1, 2, ...}
        std::negative_binomial_distribution<std::int64_t> extra(s, keep);
        n += extra(g);
      }
      if (static_cast<std::size_t>(n) > population_cap)
        throw PopulationOverflow("simulate_mass: population cap exceeded");
    }
    out.push_back(static_cast<double>(n) / N);
  }
  return out;
}

double MassTrajectory::mass_at(double t) const {
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - jump_times.begin()) - 1));
  return mass_per_particle * static_cast<double>(counts[i]);
}

double MassTrajectory::weighted_occupation(std::span<const double> breaks, std::span<const double> values) const {
  if (breaks.empty() || breaks.size() != values.size() || breaks[0] != 0.0)
    throw std::invalid_argument("weighted_occupation: malformed step function");
  double acc = 0.0;
  std::size_t piece = 0;
  for (std::size_t i = 0; i < jump_times.size(); ++i) {
    double a = jump_times[i];
    const double b = i + 1 < jump_times.size() ? jump_times[i + 1] : horizon;
    const double m = mass_per_particle * static_cast<double>(counts[i]);
    while (a < b) {
      while (piece + 1 < breaks.size() && breaks[piece + 1] <= a) ++piece;
      const double end = piece + 1 < breaks.size() ? std::min(b, breaks[piece + 1]) : b;
      acc += values[piece] * m * (end - a);
      a = end;
    }
  }
  return acc;
}

MassTrajectory simulate_mass_trajectory(double initial_mass, double N, double T, std::uint64_t seed,
                                        std::uint64_t stream, std::size_t population_cap) {
  if (!(N >= 1.0)) throw std::invalid_argument("simulate_mass_trajectory: N must be >= 1");
  if (!(T >= 0.0)) throw std::invalid_argument("simulate_mass_trajectory: negative horizon");
  Philox4x32 g(seed, stream);
  MassTrajectory m;
  m.mass_per_particle = 1.0 / N;
  m.horizon = T;
  auto n = static_cast<std::int64_t>(std::llround(initial_mass * N));
  m.jump_times.push_back(0.0);
  m.counts.push_back(n);
  double t = 0.0;
  while (n > 0) {
    t += -std::log(g.uniform()) / (2.0 * N * static_cast<double>(n));
    if (t >= T) break;
    n += g.uniform() < 0.5 ? -1 : 1;
    if (static_cast<std::size_t>(n) > population_cap)
      throw PopulationOverflow("simulate_mass_trajectory: population cap exceeded");
    m.jump_times.push_back(t);
    m.counts.push_back(n);
  }
  return m;
}

void write_paths_csv(std::ostream& os, std::span<const CatalystPath> paths) {
  const int d = paths.empty() ? 1 : paths.front().d;
  os << "replica,time_index,time,particle_index";
  for (int a = 1; a <= d; ++a) os << ",x" << a;
  os << '\n';
  os.precision(17);
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const auto& p = paths[r];
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      const auto& s = p.states[i];
      for (std::size_t k = 0; k < s.count(); ++k) {
        os << r << ',' << i << ',' << p.times[i] << ',' << k;
        for (double x : s.at(k)) os << ',' << x;
        os << '\n';
      }
    }
  }
}

std::string sidecar_json(const CatalystPath& path) {
  nlohmann::ordered_json j;
  j["N"] = path.N;
  j["dt"] = path.dt;
  j["seed"] = path.seed;
  j["stream"] = path.stream;
  j["kind"] = to_string(path.kind);
  j["kappa"] = path.kappa;
  j["d"] = path.d;
  j["warnings"] = path.warnings;
  return j.dump(2);
}

}  // namespace catou::superprocess
