#include <benchmark/benchmark.h>

#include "handgest/geometry.hpp"
#include "synthetic.hpp"

namespace {

using namespace handgest;

void BM_ComputeTransform(benchmark::State& state) {
  testing::Rng rng(1);
  const auto ref = default_reference_anchors();
  const auto frame = testing::random_hand(rng);
  const auto anchors = extract_anchors(frame);
  for (auto _ : state) benchmark::DoNotOptimize(compute_transform(anchors, ref));
}
BENCHMARK(BM_ComputeTransform);

void BM_Normalize(benchmark::State& state) {
  testing::Rng rng(2);
  const auto ref = default_reference_anchors();
  std::vector<HandLandmarks> frames;
  for (int i = 0; i < 256; ++i) frames.push_back(testing::random_hand(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize(frames[i++ & 255], ref));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Normalize);

}  // namespace
