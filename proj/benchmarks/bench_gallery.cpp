#include <benchmark/benchmark.h>

#include "handgest/gallery.hpp"
#include "synthetic.hpp"

namespace {

using namespace handgest;

FeatureVector random_vector(testing::Rng& rng) {
  std::array<double, kFeatureDim> v;
  for (auto& x : v) x = testing::uniform(rng, -1.0, 1.0);
  return FeatureVector(v);
}

void BM_GalleryNearest(benchmark::State& state) {
  testing::Rng rng(3);
  Gallery g;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    g.add("c" + std::to_string(i % 24), random_vector(rng));
  }
  const auto k = static_cast<std::size_t>(state.range(1));
  std::vector<FeatureVector> queries;
  for (int i = 0; i < 64; ++i) queries.push_back(random_vector(rng));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(g.nearest(queries[i++ & 63].values(), k));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GalleryNearest)
    ->ArgsProduct({{24, 240, 928, 10000}, {1, 5}})
    ->ArgNames({"size", "k"});

}  // namespace
