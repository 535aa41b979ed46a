// Accuracy should not drop as the per-class training set grows. Statistical,
// so it compares medians over several seeds with a small slack.

#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "handgest/eval.hpp"
#include "synthetic.hpp"

using namespace handgest;

TEST(TrainingSizeTrend, MedianAccuracyIsNonDecreasing) {
  // Noise large enough that classes overlap in feature space.
  const auto data = handgest::testing::prototype_dataset(24, 38, 0.03, 2024);
  ASSERT_FALSE(data.separable);

  std::vector<double> medians;
  for (std::size_t k : {1u, 5u, 10u}) {
    std::vector<double> acc;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto split = make_split(data.manifest, {PerClassK{k}, seed, std::nullopt});
      EvalConfig cfg;
      cfg.threads = 0;
      acc.push_back(evaluate(split.train, split.test, cfg).accuracy);
    }
    std::nth_element(acc.begin(), acc.begin() + 2, acc.end());
    medians.push_back(acc[2]);
    RecordProperty("median_k" + std::to_string(k), std::to_string(acc[2]));
  }
  EXPECT_LT(medians[0], 1.0);
  EXPECT_GE(medians[1] + 0.01, medians[0]);
  EXPECT_GE(medians[2] + 0.01, medians[1]);
}
