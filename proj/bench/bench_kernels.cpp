// Serial reference kernels against their OpenMP counterparts.

#include "phaseslope/spectra.hpp"
#include "phaseslope/timeseries.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

namespace {

using namespace phaseslope;

const EpochedData& fixture(Index channels) {
  static std::map<Index, EpochedData> cache;
  auto it = cache.find(channels);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd data(channels, 60000);
  for (Index t = 0; t < data.cols(); ++t)
    for (Index c = 0; c < channels; ++c) data(c, t) = gauss(rng);
  auto record = make_record(std::move(data), 100.0);
  return cache.emplace(channels, epoch(record, EpochPlan::from_seconds(100.0))).first->second;
}

void BM_CrossSpectrumSerial(benchmark::State& state) {
  const auto& data = fixture(state.range(0));
  const auto config = SpectralConfig::from_plan(data.plan);
  for (auto _ : state) benchmark::DoNotOptimize(reference::cross_spectrum(data, config));
}

void BM_CrossSpectrumParallel(benchmark::State& state) {
  const auto& data = fixture(state.range(0));
  const auto config = SpectralConfig::from_plan(data.plan);
  for (auto _ : state) benchmark::DoNotOptimize(cross_spectrum(data, config));
}

void BM_LeaveOneOutSerial(benchmark::State& state) {
  const auto& data = fixture(state.range(0));
  const auto spectra = epoch_spectra(data, SpectralConfig::from_plan(data.plan));
  for (auto _ : state) benchmark::DoNotOptimize(reference::leave_one_out_spectra(spectra));
}

void BM_LeaveOneOutParallel(benchmark::State& state) {
  const auto& data = fixture(state.range(0));
  const auto spectra = epoch_spectra(data, SpectralConfig::from_plan(data.plan));
  for (auto _ : state) benchmark::DoNotOptimize(leave_one_out_spectra(spectra));
}

}  // namespace

BENCHMARK(BM_CrossSpectrumSerial)->Arg(2)->Arg(19)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossSpectrumParallel)->Arg(2)->Arg(19)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeaveOneOutSerial)->Arg(2)->Arg(19)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeaveOneOutParallel)->Arg(2)->Arg(19)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
