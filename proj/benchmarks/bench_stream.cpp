#include <benchmark/benchmark.h>

#include "handgest/classifier.hpp"
#include "synthetic.hpp"

namespace {

using namespace handgest;

void BM_StreamStep(benchmark::State& state) {
  testing::Rng rng(4);
  const auto ref = default_reference_anchors();
  Gallery g;
  std::vector<HandLandmarks> protos;
  for (int c = 0; c < 24; ++c) {
    protos.push_back(testing::random_hand(rng));
    for (int j = 0; j < 10; ++j) {
      g.add("c" + std::to_string(c), normalize(testing::jitter(protos.back(), 0.005, rng), ref));
    }
  }
  std::vector<HandLandmarks> frames;
  for (int i = 0; i < 128; ++i) frames.push_back(testing::jitter(protos[i % 24], 0.005, rng));

  ClassifierConfig config;
  config.top_n = static_cast<std::size_t>(state.range(1));
  StreamState s(static_cast<std::size_t>(state.range(0)), config.top_n);
  std::size_t i = 0;
  for (auto _ : state) {
    auto [next, out] = stream_step(std::move(s), g, frames[i++ & 127], ref, config);
    s = std::move(next);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_StreamStep)->ArgsProduct({{1, 10, 30}, {1, 3}})->ArgNames({"window", "n"});

}  // namespace
