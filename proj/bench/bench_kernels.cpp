// Serial reference versus OpenMP kernels on the two hot loops of the search:
// region accumulation (centroids) and codebook decoding (squared error).

#include <benchmark/benchmark.h>

#include "cmplq/kernels.hpp"
#include "cmplq/optimizer.hpp"
#include "cmplq/reference.hpp"

using namespace cmplq;

namespace {

struct Fixture {
  SourceModel source;
  CombinerConfig config;
  SampleSet samples;
  Codebook codebook;
};

Fixture make_fixture(std::size_t dim, std::size_t k, std::size_t n) {
  const SourceModel source(SourceKind::gaussian, dim);
  RngStream rng(42, 0);
  CombinerConfig config = random_configuration(dim, k, source, rng);
  SampleSet samples = draw_samples(source, rng, n);
  const std::vector<SampleSet> passes{samples};
  Codebook codebook = reference::centroids(config, source, passes);
  return {source, std::move(config), std::move(samples), std::move(codebook)};
}

void args(benchmark::internal::Benchmark* b) {
  for (int dim : {2, 4})
    for (int k : {5, 12}) b->Args({dim, k, 100000});
  b->ArgNames({"d", "k", "n"})->Unit(benchmark::kMillisecond);
}

void BM_AccumulateReference(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
  const std::vector<SampleSet> passes{f.samples};
  for (auto _ : state) benchmark::DoNotOptimize(reference::accumulate_regions(f.config, passes));
  state.SetItemsProcessed(state.iterations() * state.range(2));
}

void BM_AccumulateKernel(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
  for (auto _ : state) {
    kernels::RegionAccumulator acc(f.config.dim(), f.config.size());
    acc.add(f.config, f.samples);
    benchmark::DoNotOptimize(acc.total());
  }
  state.SetItemsProcessed(state.iterations() * state.range(2));
}

void BM_SquaredErrorReference(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(reference::squared_errors(f.config, f.codebook, f.samples).sum);
  state.SetItemsProcessed(state.iterations() * state.range(2));
}

void BM_SquaredErrorKernel(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::squared_errors(f.config, f.codebook, f.samples).sum);
  state.SetItemsProcessed(state.iterations() * state.range(2));
}

void BM_NearestReference(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
  std::vector<double> points;
  for (const auto& e : f.codebook.entries()) points.insert(points.end(), e.centroid.begin(), e.centroid.end());
  for (auto _ : state) benchmark::DoNotOptimize(reference::nearest_errors(points, f.samples).sum);
  state.SetItemsProcessed(state.iterations() * state.range(2));
}

void BM_NearestKernel(benchmark::State& state) {
  const auto f = make_fixture(state.range(0), state.range(1), state.range(2));
  std::vector<double> points;
  for (const auto& e : f.codebook.entries()) points.insert(points.end(), e.centroid.begin(), e.centroid.end());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_errors(points, f.samples).sum);
  state.SetItemsProcessed(state.iterations() * state.range(2));
}

}  // namespace

BENCHMARK(BM_AccumulateReference)->Apply(args);
BENCHMARK(BM_AccumulateKernel)->Apply(args);
BENCHMARK(BM_SquaredErrorReference)->Apply(args);
BENCHMARK(BM_SquaredErrorKernel)->Apply(args);
BENCHMARK(BM_NearestReference)->Apply(args);
BENCHMARK(BM_NearestKernel)->Apply(args);

BENCHMARK_MAIN();
