#include <benchmark/benchmark.h>

#include <random>

#include "corae/log_format.hpp"
#include "corae/report.hpp"
#include "generators.hpp"

namespace {

using namespace corae;

AnnotationLog session_log(double seconds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gen::random_session(rng, seconds);
}

RatingSeries series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> v(-7, 7);
  RatingSeries s{0, 1, std::vector<int>(n)};
  for (auto& x : s.values) x = v(rng);
  return s;
}

void BM_Resample(benchmark::State& state) {
  const auto log = session_log(static_cast<double>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(resample(log, 1.0, 0.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.records.size()));
}
BENCHMARK(BM_Resample)->Arg(60)->Arg(600);

void BM_WindowedSlope(benchmark::State& state) {
  const auto cir = cumulative(series(static_cast<std::size_t>(state.range(0)), 2));
  for (auto _ : state) benchmark::DoNotOptimize(windowed_slope(cir, 15.0));
}
BENCHMARK(BM_WindowedSlope)->Arg(600)->Arg(36000);

void BM_WindowedCorrelation(benchmark::State& state) {
  const auto a = series(static_cast<std::size_t>(state.range(0)), 3);
  const auto b = series(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(windowed_correlation(a.values, b.values, 7));
}
BENCHMARK(BM_WindowedCorrelation)->Arg(600)->Arg(36000);

void BM_AnalyzeSession(benchmark::State& state) {
  const auto a = session_log(static_cast<double>(state.range(0)), 5);
  const auto b = session_log(static_cast<double>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_session(a, b));
}
BENCHMARK(BM_AnalyzeSession)->Arg(600);

void BM_LogSerialize(benchmark::State& state) {
  const auto log = session_log(600.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(log_serialize(log));
}
BENCHMARK(BM_LogSerialize);

void BM_LogParse(benchmark::State& state) {
  const auto text = log_serialize(session_log(600.0, 8));
  for (auto _ : state) benchmark::DoNotOptimize(log_parse(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_LogParse);

}  // namespace
BENCHMARK_MAIN();
