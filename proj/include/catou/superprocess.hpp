#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "catou/kernels.hpp"

namespace catou::superprocess {

struct ParticleMeasure {
  int d = 1;
  std::vector<double> positions;  // count() * d, row major
  double mass_per_particle = 1.0;
  double time_stamp = 0.0;

  std::size_t count() const { return d > 0 ? positions.size() / d : 0; }
  double total_mass() const { return mass_per_particle * static_cast<double>(count()); }
  std::span<const double> at(std::size_t i) const {
    return {positions.data() + i * d, static_cast<std::size_t>(d)};
  }

  // round(mass * N) particles of mass 1/N, all at x
  static ParticleMeasure point_mass(std::span<const double> x, double mass, double N);
  static ParticleMeasure point_mass(double x, double mass, double N);
  // n evenly spaced particles of total mass `mass` spread over [a, b] (d = 1)
  static ParticleMeasure uniform_cloud(double a, double b, double mass, std::size_t n);

  void validate() const;
};

enum class CatalystKind { sbm, atom, frozen };
const char* to_string(CatalystKind k);

struct CatalystPath {
  std::vector<double> times;
  std::vector<ParticleMeasure> states;
  CatalystKind kind = CatalystKind::sbm;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double N = 1.0;
  double dt = 0.0;  // nominal record spacing, 0 for non-uniform grids
  double kappa = 1.0;
  int d = 1;
  std::vector<std::string> warnings;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  void validate() const;
};

enum class BranchingScheme {
  exact,     // continuous-time event simulation; the record grid only samples the path
  per_step,  // move, then branch with probability 1 - exp(-2 N dt) per record step
};

struct SbmOptions {
  BranchingScheme scheme = BranchingScheme::exact;
  std::size_t population_cap = 10'000'000;
};

class PopulationOverflow : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Critical binary branching Brownian motion: mass 1/N per particle, branching
// rate 2N, 0 or 2 offspring with probability 1/2, motion with generator
// kappa * Delta. Records the population at every entry of `times`
// (strictly increasing, times[0] is the start time of `initial`).
CatalystPath simulate_sbm(const ParticleMeasure& initial, double N, std::span<const double> times,
                          const HeatKernelParams& params, std::uint64_t seed, std::uint64_t stream = 0,
                          const SbmOptions& opt = {});
// uniform record grid 0, dt, ..., T (the last step may be shorter)
CatalystPath simulate_sbm(const ParticleMeasure& initial, double N, double T, double dt,
                          const HeatKernelParams& params, std::uint64_t seed, std::uint64_t stream = 0,
                          const SbmOptions& opt = {});

// Single unit atom following a standard Brownian motion from the origin.
CatalystPath simulate_atom_catalyst(std::span<const double> times, int d, std::uint64_t seed,
                                    std::uint64_t stream = 0);
CatalystPath simulate_atom_catalyst(double T, double dt, int d, std::uint64_t seed,
                                    std::uint64_t stream = 0);

// The same measure at every grid time.
CatalystPath frozen_path(const ParticleMeasure& state, std::span<const double> times);

std::vector<double> uniform_times(double T, double dt);
// uniform spacing dt up to T - dt, then points T - tau for tau = tau_min *
// ratio^k < dt, so that the grid is geometric towards T
std::vector<double> refined_times(double T, double dt, double ratio, double tau_min);

double measure_pairing(const ParticleMeasure& state, const std::function<double(std::span<const double>)>& phi);
double measure_pairing(const ParticleMeasure& state, const std::function<double(double)>& phi);

// Trapezoid rule for int_0^T <Phi(s), Z_s> ds over the path grid.
double occupation_integral(const CatalystPath& path,
                           const std::function<double(double, std::span<const double>)>& forcing);
double occupation_integral(const CatalystPath& path, const std::function<double(double, double)>& forcing);

// Total-mass process alone. Particle counts follow a critical linear
// birth-death chain with birth and death rate N per particle.

// exact transition law between record times (binomial survivors plus
// negative-binomial offspring); returns total mass at each time
std::vector<double> simulate_mass(double initial_mass, double N, std::span<const double> times,
                                  std::uint64_t seed, std::uint64_t stream = 0,
                                  std::size_t population_cap = 10'000'000);

// every jump of the chain on [0, T]
struct MassTrajectory {
  double mass_per_particle = 1.0;
  double horizon = 0.0;
  std::vector<double> jump_times;    // jump_times[0] = 0
  std::vector<std::int64_t> counts;  // count on [jump_times[i], jump_times[i+1])

  double mass_at(double t) const;
  // int_0^T w(s) <1, Z_s> ds for w piecewise constant: w = values[i] on
  // [breaks[i], breaks[i+1]), breaks[0] = 0, final piece extends to T
  double weighted_occupation(std::span<const double> breaks, std::span<const double> values) const;
};

MassTrajectory simulate_mass_trajectory(double initial_mass, double N, double T, std::uint64_t seed,
                                        std::uint64_t stream = 0,
                                        std::size_t population_cap = 10'000'000);

// CSV: replica,time_index,time,particle_index,x1[,x2]
void write_paths_csv(std::ostream& os, std::span<const CatalystPath> paths);
// JSON sidecar: N, dt, seed, kind, kappa
std::string sidecar_json(const CatalystPath& path);

}  // namespace catou::superprocess
