#include "chromainv/error.hpp"
#include "chromainv/normalization.hpp"
#include "chromainv/split.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace {

using namespace chromainv;

Sample feature_sample(double r, double h1)
{
  Sample s;
  s.response = {r};
  s.injection = {h1, 7.0};
  return s;
}

TEST(Normalization, FitUsesPopulationDeviation)
{
  const std::vector<Sample> train{feature_sample(1, 10), feature_sample(2, 20), feature_sample(3, 30)};
  const NormStats stats = fit_norm(train);
  ASSERT_EQ(stats.size(), 3u);
  EXPECT_DOUBLE_EQ(stats.mean[0], 2.0);
  EXPECT_NEAR(stats.stddev[0], std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(stats.mean[2], 7.0);
  EXPECT_EQ(stats.stddev[2], 0.0);
}

TEST(Normalization, StandardizesAndCentresConstantFeatures)
{
  const std::vector<Sample> train{feature_sample(1, 10), feature_sample(2, 20), feature_sample(3, 30)};
  const NormStats stats = fit_norm(train);
  const std::vector<double> x{3.0, 20.0, 9.0};
  const std::vector<double> z = normalize(x, stats);
  EXPECT_NEAR(z[0], 1.2247, 1e-4);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
  EXPECT_DOUBLE_EQ(z[2], 2.0);
  const std::vector<double> at_mean = normalize(stats.mean, stats);
  for (double v : at_mean)
    EXPECT_EQ(v, 0.0);
}

TEST(Normalization, TrainingFeaturesAreStandardized)
{
  std::vector<Sample> train;
  Rng rng = make_stream(3, "test");
  std::normal_distribution<double> d(5.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    Sample s;
    s.response = {d(rng), 2.0 * d(rng), 0.0};
    s.injection = {d(rng), d(rng)};
    train.push_back(s);
  }
  const NormStats stats = fit_norm(train);
  for (std::size_t f = 0; f < stats.size(); ++f) {
    double sum = 0.0;
    double sq = 0.0;
    for (const Sample& s : train) {
      const double z = normalize(s.features(), stats)[f];
      sum += z;
      sq += z * z;
    }
    const double mean = sum / 500.0;
    EXPECT_NEAR(mean, 0.0, 1e-9);
    if (stats.stddev[f] > 0.0) {
      EXPECT_NEAR(std::sqrt(sq / 500.0 - mean * mean), 1.0, 1e-9);
    }
  }
}

TEST(Normalization, HeldOutSamplesDoNotInfluenceStatistics)
{
  const std::vector<Sample> train{feature_sample(1, 10), feature_sample(2, 20), feature_sample(3, 30)};
  const NormStats before = fit_norm(train);
  std::vector<Sample> with_outlier = train;
  with_outlier.push_back(feature_sample(1e6, 1e6));
  const NormStats polluted = fit_norm(with_outlier);
  EXPECT_NE(before.fingerprint(), polluted.fingerprint());
  EXPECT_EQ(before.fingerprint(), fit_norm(train).fingerprint());
}

TEST(Normalization, RejectsMismatchedSizes)
{
  const std::vector<Sample> train{feature_sample(1, 10), feature_sample(2, 20)};
  const NormStats stats = fit_norm(train);
  const std::vector<double> wrong{1.0, 2.0};
  EXPECT_THROW(normalize(wrong, stats), ValidationError);
  EXPECT_THROW(fit_norm(std::vector<Sample>{}), ValidationError);
}

bool is_partition(const SplitPlan& p, std::size_t n)
{
  std::vector<std::size_t> all;
  for (const auto* set : {&p.train, &p.validation, &p.test})
    all.insert(all.end(), set->begin(), set->end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] != i)
      return false;
  return all.size() == n;
}

TEST(Split, DefaultFractionsGiveSixtyTwentyTwenty)
{
  Rng rng = make_stream(1, "split");
  const SplitPlan p = split(100, 0, SplitSpec{}, rng);
  EXPECT_EQ(p.train.size(), 60u);
  EXPECT_EQ(p.validation.size(), 20u);
  EXPECT_EQ(p.test.size(), 20u);
  EXPECT_TRUE(is_partition(p, 100));
  EXPECT_TRUE(p.real_train.empty());
}

TEST(Split, FullScaleTrainingCount)
{
  Rng rng = make_stream(1, "split");
  const SplitPlan p = split(63500, 0, SplitSpec{}, rng);
  EXPECT_EQ(p.train.size(), 38100u);
  EXPECT_TRUE(is_partition(p, 63500));
}

TEST(Split, SameSeedSamePlan)
{
  Rng a = make_stream(4, "split");
  Rng b = make_stream(4, "split");
  const SplitPlan pa = split(50, 0, SplitSpec{}, a);
  const SplitPlan pb = split(50, 0, SplitSpec{}, b);
  EXPECT_EQ(pa.train, pb.train);
  EXPECT_EQ(pa.test, pb.test);
}

TEST(Split, RealSlotArithmetic)
{
  EXPECT_EQ(real_slot_count(1000, 3, 10.0), 100u);
  EXPECT_EQ(real_slot_count(0, 3, 10.0), 3u); // every distinct real appears at least once
  EXPECT_EQ(real_slot_count(1000, 0, 10.0), 0u);
}

TEST(Split, RealSamplesDuplicatedIntoTrainingAndValidation)
{
  Rng rng = make_stream(1, "split");
  const SplitPlan p = split(2000, 5, SplitSpec{}, rng);
  ASSERT_EQ(p.train.size(), 1200u);
  EXPECT_EQ(p.real_train.size(), 120u);
  EXPECT_EQ(p.real_validation.size(), 40u);
  const std::set<std::size_t> tr(p.real_train.begin(), p.real_train.end());
  const std::set<std::size_t> va(p.real_validation.begin(), p.real_validation.end());
  EXPECT_EQ(tr.size(), 3u);
  EXPECT_EQ(va.size(), kRealValidationCount);
  for (std::size_t r : va)
    EXPECT_FALSE(tr.contains(r));
  for (std::size_t t : p.test)
    EXPECT_LT(t, 2000u);
}

TEST(Split, TooFewRealSamplesIsAnError)
{
  Rng rng = make_stream(1, "split");
  EXPECT_THROW(split(100, 3, SplitSpec{}, rng), ValidationError);
  SplitSpec bad;
  bad.test_fraction = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Split, MaterializeFollowsPlan)
{
  std::vector<Sample> syn;
  for (int k = 0; k < 10; ++k)
    syn.push_back(feature_sample(k, 0));
  Rng rng = make_stream(2, "split");
  const SplitPlan p = split(10, 0, SplitSpec{}, rng);
  const SplitSets sets = materialize(p, syn, {});
  ASSERT_EQ(sets.train.size(), p.train.size());
  for (std::size_t i = 0; i < p.train.size(); ++i)
    EXPECT_EQ(sets.train[i].response, syn[p.train[i]].response);
}

} // namespace
