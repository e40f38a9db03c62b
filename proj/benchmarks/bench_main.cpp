#include <benchmark/benchmark.h>

#include "affdim/dimension.hpp"
#include "affdim/domination.hpp"

namespace {

using affdim::Matrix;

std::vector<Matrix> stp_pair() {
  Matrix a(3, 3), b(3, 3);
  a << 1, 1, 1, 1, 2, 3, 1, 3, 6;
  b << 5, 7, 4, 7, 11, 9, 2, 5, 8;
  return {0.1 * a, 0.04 * b};
}

affdim::IfsSystem carpet() {
  const std::vector<affdim::CarpetDigit> digits{{0, 0}, {1, 0}, {2, 1}};
  const std::vector<double> p(3, 1.0 / 3.0);
  return affdim::bedford_mcmullen_ifs(digits, p, 3, 2);
}

void BM_LyapunovSpectrum(benchmark::State& state) {
  const auto maps = stp_pair();
  affdim::LyapunovOptions o;
  o.steps = static_cast<std::size_t>(state.range(0));
  o.trials = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        affdim::lyapunov_spectrum(maps, affdim::BernoulliWeights::uniform(2), o, affdim::Rng(1)).chi);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LyapunovSpectrum)->Arg(1000)->Arg(10000);

void BM_ExteriorPower(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  affdim::Rng rng(2);
  const Matrix a = rng.gaussian(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(affdim::exterior_power(a, d / 2));
}
BENCHMARK(BM_ExteriorPower)->DenseRange(2, 6);

void BM_GapRatioScan(benchmark::State& state) {
  const auto maps = stp_pair();
  for (auto _ : state) {
    benchmark::DoNotOptimize(affdim::gap_ratio_scan(maps, static_cast<std::size_t>(state.range(0))).max_log_ratio);
  }
}
BENCHMARK(BM_GapRatioScan)->Arg(8)->Arg(12);

void BM_StrongStableBundle(benchmark::State& state) {
  const auto maps = stp_pair();
  const auto rep = affdim::detect_domination(affdim::gap_ratio_scan(maps, 10));
  affdim::Rng rng(3);
  const auto w = affdim::BernoulliWeights::uniform(2);
  const auto future = affdim::sample_word(w, 81, rng);
  const auto past = affdim::sample_word(w, 40, rng);
  for (auto _ : state) benchmark::DoNotOptimize(affdim::strong_stable_bundle(maps, future, past, 1, 40, rep).F);
}
BENCHMARK(BM_StrongStableBundle);

void BM_SampleMeasure(benchmark::State& state) {
  const auto ifs = carpet();
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(affdim::sample_measure(ifs, count, 20, affdim::Rng(4)).points);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleMeasure)->Arg(10000)->Arg(100000);

void BM_LocalDimension(benchmark::State& state) {
  const auto cloud = affdim::sample_measure(carpet(), static_cast<std::size_t>(state.range(0)), 20, affdim::Rng(5));
  affdim::LocalDimensionOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(affdim::local_dimension_estimate(cloud, o, affdim::Rng(6)).median);
}
BENCHMARK(BM_LocalDimension)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SeparationCheck(benchmark::State& state) {
  const auto ifs = carpet();
  for (auto _ : state) benchmark::DoNotOptimize(affdim::check_separation(ifs, 6).status);
}
BENCHMARK(BM_SeparationCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
