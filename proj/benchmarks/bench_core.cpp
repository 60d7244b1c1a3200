#include <benchmark/benchmark.h>

#include "ddsa/covariance.hpp"
#include "ddsa/sfb.hpp"
#include "ddsa/tilt.hpp"

using namespace ddsa;

namespace {

Problem benchmark_problem() { return Problem::swap_gaussian(0.5); }

void BM_SamplerDraw(benchmark::State& state) {
  const auto p = benchmark_problem();
  RandomStream rng(1);
  Vector x(2);
  x << 1, 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample(p, x, rng));
}
BENCHMARK(BM_SamplerDraw);

void BM_SfbStep(benchmark::State& state) {
  const auto p = benchmark_problem();
  RandomStream rng(2);
  Vector x = Vector::Zero(2);
  for (auto _ : state) {
    auto r = sfb_step(p, x, 1e-3, rng);
    benchmark::DoNotOptimize(r.next_x);
  }
}
BENCHMARK(BM_SfbStep);

void BM_RunSfb(benchmark::State& state) {
  const auto p = benchmark_problem();
  const StepSchedule sched(1.0, 0.75);
  Vector x0(2);
  x0 << 5, 5;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto traj = run_sfb(p, x0, sched, state.range(0), seed++);
    benchmark::DoNotOptimize(traj.final_xbar);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunSfb)->Arg(10000)->Arg(100000);

void BM_MeanFieldMonteCarlo(benchmark::State& state) {
  const auto p = benchmark_problem();
  Vector x(2), y(2);
  x << 1, 0;
  y << 0.2, -0.1;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mean_field(p, x, y, MonteCarloMode{state.range(0), seed++, 1}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MeanFieldMonteCarlo)->Arg(10000)->Arg(100000);

void BM_AsymptoticCovariance(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RandomStream rng(7);
  Matrix a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = rng.next_normal();
  const Matrix sigma = a * a.transpose() + Matrix::Identity(d, d);
  const Matrix w = Matrix::Identity(d, d) + 0.1 * a;
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_covariance(sigma, w));
}
BENCHMARK(BM_AsymptoticCovariance)->Arg(2)->Arg(8)->Arg(32);

void BM_TiltedSample(benchmark::State& state) {
  const auto p = benchmark_problem();
  const auto tilt = TiltSpec::canonical((Vector(2) << 0.5, 0).finished());
  RandomStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_tilted(p, tilt, Vector::Zero(2), rng));
}
BENCHMARK(BM_TiltedSample);

void BM_SaturationValue(benchmark::State& state) {
  const auto h = SaturationFunction::c3_blend();
  double t = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(h.value(t));
    t += 0.001;
    if (t > 3.0) t = -3.0;
  }
}
BENCHMARK(BM_SaturationValue);

void BM_Normalizer(benchmark::State& state) {
  const auto p = benchmark_problem();
  const auto tilt = TiltSpec::canonical((Vector(2) << 0.1, 0).finished());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalizer(p, tilt, Vector::Zero(2), state.range(0), seed++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Normalizer)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
