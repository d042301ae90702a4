// Serial reference vs OpenMP path for the hot kernels. Run with
// OMP_NUM_THREADS set to compare; on one core the two should match.
#include <benchmark/benchmark.h>

#include <vector>

#include "catou/affine_ref.hpp"
#include "catou/gaussian_field.hpp"
#include "catou/parallel.hpp"
#include "catou/rng.hpp"
#include "catou/superprocess.hpp"

namespace {

using catou::Exec;

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) == 0 ? "serial" : "openmp"); }

std::vector<double> grid_points(int n) {
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = -1.0 + 2.0 * (i + 0.5) / n;
  return p;
}

void BM_QuenchedCovariance(benchmark::State& s) {
  const auto path = catou::superprocess::simulate_sbm(catou::superprocess::ParticleMeasure::uniform_cloud(-1, 1, 1, 32),
                                                      32, 1.0, 0.01, {1.0, 1, 2.0}, 7, 0);
  const auto pts = grid_points(static_cast<int>(s.range(1)));
  for (auto _ : s) benchmark::DoNotOptimize(catou::field::quenched_covariance(path, pts, 1.0, 0.5, exec_of(s)));
  label(s);
}
BENCHMARK(BM_QuenchedCovariance)->Args({0, 32})->Args({1, 32})->Unit(benchmark::kMillisecond);

void BM_SampleQuenchedField(benchmark::State& s) {
  const auto path = catou::superprocess::simulate_atom_catalyst(1.0, 0.01, 1, 3, 0);
  const auto cov = catou::field::quenched_covariance(path, grid_points(48), 1.0, 0.5, Exec::serial);
  for (auto _ : s) benchmark::DoNotOptimize(catou::field::sample_quenched_field(cov, s.range(1), 11, 0, exec_of(s)));
  label(s);
}
BENCHMARK(BM_SampleQuenchedField)->Args({0, 4096})->Args({1, 4096})->Unit(benchmark::kMillisecond);

void BM_SbmReplicaFanOut(benchmark::State& s) {
  const auto init = catou::superprocess::ParticleMeasure::uniform_cloud(-1, 1, 1, 32);
  const auto n = static_cast<std::size_t>(s.range(1));
  std::vector<double> mass(n);
  for (auto _ : s) {
    catou::for_each_index(
        n,
        [&](std::size_t r) {
          const auto p = catou::superprocess::simulate_sbm(init, 32, 1.0, 0.01, {1.0, 1, 2.0}, 5, catou::stream_id(1, r));
          mass[r] = p.states.back().total_mass();
        },
        exec_of(s));
    benchmark::DoNotOptimize(mass.data());
  }
  label(s);
}
BENCHMARK(BM_SbmReplicaFanOut)->Args({0, 256})->Args({1, 256})->Unit(benchmark::kMillisecond);

void BM_EulerMaruyamaCir(benchmark::State& s) {
  const catou::affine::AffineModel m{catou::affine::Kind::cir, 0.6, 1.1, 0.7, 0.9};
  for (auto _ : s) benchmark::DoNotOptimize(catou::affine::euler_maruyama(m, 0.002, 1.0, s.range(1), 9, 0, exec_of(s)));
  label(s);
}
BENCHMARK(BM_EulerMaruyamaCir)->Args({0, 20000})->Args({1, 20000})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
