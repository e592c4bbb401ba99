#include "chromainv/dataset.hpp"
#include "chromainv/error.hpp"
#include "chromainv/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

namespace {

using namespace chromainv;

ColumnConfig small_column()
{
  ColumnConfig c;
  c.n_cells = 50;
  c.horizon = 600.0;
  c.n_time_points = 100;
  return c;
}

TEST(Sampling, TargetsAreUniformOnTheBox)
{
  Rng rng = make_stream(1, "sample");
  std::array<double, 8> sum{};
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const IsothermParams y = sample_target(rng);
    for (std::size_t i = 0; i < 8; ++i) {
      ASSERT_GE(y[i], 0.0);
      ASSERT_LT(y[i], kTargetUpper);
      sum[i] += y[i];
    }
  }
  for (double s : sum)
    EXPECT_NEAR(s / draws, 50.0, 2.0);
}

TEST(Sampling, InjectionsAreUniformOnTheBox)
{
  Rng rng = make_stream(2, "sample");
  std::array<double, 2> sum{};
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const auto h = sample_injection(rng);
    sum[0] += h[0];
    sum[1] += h[1];
  }
  EXPECT_NEAR(sum[0] / draws, 15.0, 1.0);
  EXPECT_NEAR(sum[1] / draws, 15.0, 1.0);
}

TEST(Sampling, StreamsAreReproducibleAndIndependent)
{
  Rng a = make_stream(7, "sample", 3);
  Rng b = make_stream(7, "sample", 3);
  EXPECT_EQ(sample_target(a), sample_target(b));
  EXPECT_NE(derive_seed(7, "sample", 3), derive_seed(7, "sample", 4));
  EXPECT_NE(derive_seed(7, "sample", 3), derive_seed(7, "noise", 3));
  EXPECT_NE(derive_seed(7, "sample", 3), derive_seed(8, "sample", 3));
}

TEST(Sampling, CanonicalOrderPutsSmallerAssociationFirst)
{
  const IsothermParams y{std::array<double, 8>{1, 50, 2, 3, 4, 40, 5, 6}};
  const IsothermParams c = canonical_site_order(y);
  EXPECT_EQ(c, (IsothermParams{std::array<double, 8>{2, 3, 1, 50, 5, 6, 4, 40}}));
  EXPECT_EQ(canonical_site_order(c), c);
  const Concentration2 at{3.0, 7.0};
  EXPECT_NEAR(isotherm_eval(y, at).c1, isotherm_eval(c, at).c1, 1e-12);
  EXPECT_NEAR(isotherm_eval(y, at).c2, isotherm_eval(c, at).c2, 1e-12);
}

TEST(Generate, ZeroInjectionGivesZeroResponse)
{
  const IsothermParams y{std::array<double, 8>{9.54, 0.91, 9.53, 1.00, 2.74, 0.43, 1.80, 0.08}};
  const Sample s = make_sample(small_column(), DetectorSpec{}, y, {0.0, 0.0});
  EXPECT_EQ(s.response, std::vector<double>(100, 0.0));
  EXPECT_EQ(s.feature_count(), 102u);
  const std::vector<double> f = s.features();
  EXPECT_EQ(f.size(), 102u);
}

TEST(Generate, DeterministicAndThreadIndependent)
{
  const Dataset a = generate(4, small_column(), DetectorSpec{}, {.seed = 5, .threads = 1});
  const Dataset b = generate(4, small_column(), DetectorSpec{}, {.seed = 5, .threads = 3});
  ASSERT_EQ(a.samples.size(), 4u);
  std::set<std::vector<double>> distinct;
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(a.samples[k].response, b.samples[k].response);
    EXPECT_EQ(a.samples[k].injection, b.samples[k].injection);
    EXPECT_EQ(a.samples[k].target, b.samples[k].target);
    EXPECT_EQ(a.samples[k].response.size(), 100u);
    distinct.insert(a.samples[k].response);
  }
  EXPECT_EQ(distinct.size(), 4u);
  EXPECT_EQ(a.meta.time_grid.size(), 100u);
  EXPECT_DOUBLE_EQ(a.meta.time_grid.front(), 6.0);
}

TEST(Generate, CanonicalTargetsAreStoredCanonically)
{
  const Dataset d = generate(6, small_column(), DetectorSpec{}, {.seed = 9});
  for (const Sample& s : d.samples)
    EXPECT_EQ(canonical_site_order(*s.target), *s.target);
}

TEST(Generate, RejectsEmptyDataset)
{
  EXPECT_THROW(generate(0, small_column(), DetectorSpec{}, {}), ValidationError);
}

TEST(Shift, ShiftsWithZeroFill)
{
  const std::vector<double> r{1, 2, 3, 4, 5};
  EXPECT_EQ(shift_series(r, 2), (std::vector<double>{0, 0, 1, 2, 3}));
  EXPECT_EQ(shift_series(r, -2), (std::vector<double>{3, 4, 5, 0, 0}));
  EXPECT_EQ(shift_series(r, 0), r);
  EXPECT_EQ(shift_series(r, 9), (std::vector<double>(5, 0.0)));
}

Dataset toy_dataset(std::size_t n)
{
  Dataset d;
  d.meta.time_grid = {1, 2, 3, 4, 5, 6};
  for (std::size_t k = 0; k < n; ++k) {
    Sample s;
    s.response = {0, 1, 2, 3, 2, 1};
    s.injection = {static_cast<double>(k), 1.0};
    s.target = IsothermParams{std::array<double, 8>{1, 2, 3, 4, 5, 6, 7, static_cast<double>(k)}};
    d.samples.push_back(s);
  }
  return d;
}

TEST(Augment, ZeroShiftLeavesDatasetUnchanged)
{
  const Dataset d = toy_dataset(5);
  Rng rng = make_stream(1, "augment");
  const Dataset a = augment_shift(d, 0, rng);
  for (std::size_t k = 0; k < d.samples.size(); ++k)
    EXPECT_EQ(a.samples[k].response, d.samples[k].response);
}

TEST(Augment, ShiftsStayWithinRangeAndSkipRealSamples)
{
  Dataset d = toy_dataset(200);
  d.samples[3].origin = Origin::real;
  Rng rng = make_stream(1, "augment");
  std::vector<int> drawn;
  const Dataset a = augment_shift(d, 8, rng, &drawn);
  ASSERT_EQ(drawn.size(), 199u);
  std::set<int> seen(drawn.begin(), drawn.end());
  EXPECT_EQ(*seen.begin(), -8);
  EXPECT_EQ(*seen.rbegin(), 8);
  EXPECT_EQ(a.samples[3].response, d.samples[3].response);
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    EXPECT_EQ(a.samples[k].injection, d.samples[k].injection);
    EXPECT_EQ(a.samples[k].target, d.samples[k].target);
  }
}

Sample flat_sample(std::size_t n)
{
  Sample s;
  s.response.assign(n, 1.0);
  s.injection = {3.0, 4.0};
  return s;
}

double mean_response(const Sample& s)
{
  return std::accumulate(s.response.begin(), s.response.end(), 0.0) / static_cast<double>(s.response.size());
}

TEST(Noise, IdentitySpecsLeaveSampleUnchanged)
{
  const Sample s = toy_dataset(1).samples[0];
  Rng rng = make_stream(1, "noise");
  EXPECT_EQ(corrupt(s, NormalNoise{0.0, 0.0}, rng).response, s.response);
  EXPECT_EQ(corrupt(s, TimeShiftNoise{0}, rng).response, s.response);
}

TEST(Noise, MultiplicativeScenariosHaveExpectedMeans)
{
  const Sample s = flat_sample(20000);
  Rng rng = make_stream(4, "noise");
  EXPECT_NEAR(mean_response(corrupt(s, NormalNoise{0.04, 0.1}, rng)), 1.04, 0.003);
  EXPECT_NEAR(mean_response(corrupt(s, UniformNoise{-0.2, 0.1}, rng)), 0.95, 0.003);
  EXPECT_NEAR(mean_response(corrupt(s, PoissonNoise{5.0, 100.0}, rng)), 1.05, 0.003);
}

TEST(Noise, InjectionEntriesAreNeverCorrupted)
{
  const Sample s = flat_sample(50);
  Rng rng = make_stream(4, "noise");
  for (const NoiseSpec& spec : {NoiseSpec{NormalNoise{}}, NoiseSpec{UniformNoise{}}, NoiseSpec{PoissonNoise{}},
                                NoiseSpec{TimeShiftNoise{3}}})
    EXPECT_EQ(corrupt(s, spec, rng).injection, s.injection);
}

TEST(Noise, ShiftNoiseIsAWholeSeriesLag)
{
  const Sample s = toy_dataset(1).samples[0];
  Rng rng = make_stream(2, "noise");
  for (int trial = 0; trial < 20; ++trial) {
    const Sample c = corrupt(s, TimeShiftNoise{1}, rng);
    const bool matches = c.response == shift_series(s.response, -1) || c.response == s.response ||
                         c.response == shift_series(s.response, 1);
    EXPECT_TRUE(matches);
  }
}

TEST(Noise, ParsesAndFormatsSpecs)
{
  const NoiseSpec n = parse_noise_spec("normal:0.04:0.1");
  ASSERT_TRUE(std::holds_alternative<NormalNoise>(n));
  EXPECT_DOUBLE_EQ(std::get<NormalNoise>(n).mean, 0.04);
  EXPECT_DOUBLE_EQ(std::get<NormalNoise>(n).stddev, 0.1);
  EXPECT_EQ(std::get<TimeShiftNoise>(parse_noise_spec("shift:8")).max_shift, 8);
  for (const char* text : {"normal:0.04:0.1", "uniform:-0.2:0.1", "poisson:5:100", "shift:1"})
    EXPECT_EQ(to_string(parse_noise_spec(text)), text);
  EXPECT_THROW(parse_noise_spec("gamma:1:2"), ValidationError);
  EXPECT_THROW(parse_noise_spec("normal:0.1"), ValidationError);
  EXPECT_THROW(parse_noise_spec("uniform:0.2:0.1"), ValidationError);
  EXPECT_THROW(parse_noise_spec("shift:-1"), ValidationError);
}

} // namespace
