// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "cmseq/classify.hpp"
#include "cmseq/models.hpp"
#include "cmseq/oracle.hpp"
#include "cmseq/simulate.hpp"

namespace {

using namespace cmseq;

ForwardCmcModel reciprocal_model(std::size_t n, std::size_t d) {
  return build_forward(random_law(LawClass::Reciprocal, n, d, 7), ConditioningSide::Last);
}

void BM_SampleForwardSerial(benchmark::State& state) {
  const auto model = reciprocal_model(6, 2);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::sample_forward(model, m, 11));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleForwardOmp(benchmark::State& state) {
  const auto model = reciprocal_model(6, 2);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_forward(model, m, 11));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleCovarianceSerial(benchmark::State& state) {
  const auto batch = sample_forward(reciprocal_model(6, 2), static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(serial::sample_covariance(batch));
}

void BM_SampleCovarianceOmp(benchmark::State& state) {
  const auto batch = sample_forward(reciprocal_model(6, 2), static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_covariance(batch));
}

void BM_OracleSweepSerial(benchmark::State& state) {
  const auto law = random_law(LawClass::Generic, 7, 2, 5);
  const auto queries = reciprocal_queries(law.last_index());
  for (auto _ : state) benchmark::DoNotOptimize(serial::sweep(law, queries, Tolerance{}));
}

void BM_OracleSweepOmp(benchmark::State& state) {
  const auto law = random_law(LawClass::Generic, 7, 2, 5);
  const auto queries = reciprocal_queries(law.last_index());
  for (auto _ : state) benchmark::DoNotOptimize(sweep(law, queries, Tolerance{}));
}

void BM_FullReportSerial(benchmark::State& state) {
  const auto law = random_law(LawClass::CmLOnly, 7, 2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(serial::full_report(law, Tolerance{}));
}

void BM_FullReportOmp(benchmark::State& state) {
  const auto law = random_law(LawClass::CmLOnly, 7, 2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(full_report(law, Tolerance{}));
}

}  // namespace

BENCHMARK(BM_SampleForwardSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleForwardOmp)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleCovarianceSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleCovarianceOmp)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSweepSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OracleSweepOmp)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FullReportSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FullReportOmp)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
