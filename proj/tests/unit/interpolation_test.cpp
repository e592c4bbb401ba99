#include "chromainv/error.hpp"
#include "chromainv/interpolation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace chromainv;

std::vector<double> linspace(double lo, double hi, int n)
{
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

TEST(Interpolation, IdenticalGridReturnsSeries)
{
  const Chromatogram c{{1, 2, 3, 4, 5}, {0.0, 1.0, 4.0, 2.0, 0.5}};
  const Chromatogram r = regrid(c, c.time);
  EXPECT_EQ(r.time, c.time);
  for (std::size_t i = 0; i < c.response.size(); ++i)
    EXPECT_DOUBLE_EQ(r.response[i], c.response[i]);
}

TEST(Interpolation, ReproducesCubicsOnUniformAndIrregularGrids)
{
  const auto cubic = [](double x) { return 0.3 * x * x * x - 1.7 * x * x + 2.0 * x + 5.0; };
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> gap(0.2, 1.0);
  for (int variant = 0; variant < 2; ++variant) {
    std::vector<double> x;
    if (variant == 0) {
      x = linspace(-3.0, 4.0, 12);
    } else {
      double at = -3.0;
      for (int i = 0; i < 12; ++i, at += gap(rng))
        x.push_back(at);
    }
    std::vector<double> y;
    for (double v : x)
      y.push_back(cubic(v));
    const std::vector<double> q = linspace(x.front(), x.back(), 2001);
    const std::vector<double> got = hermite_interpolate(x, y, q);
    double worst = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
      worst = std::max(worst, std::abs(got[i] - cubic(q[i])));
    EXPECT_LE(worst, 1e-9) << "variant " << variant;
  }
}

TEST(Interpolation, MonotoneDataStaysMonotone)
{
  // step-like data that makes unlimited cubics overshoot
  const std::vector<double> x = linspace(0.0, 10.0, 11);
  const std::vector<double> y{0, 0, 0, 0.1, 5, 9.9, 10, 10, 10, 10, 10};
  const std::vector<double> q = linspace(0.0, 10.0, 4001);
  const std::vector<double> got = hermite_interpolate(x, y, q);
  for (std::size_t i = 1; i < got.size(); ++i)
    ASSERT_GE(got[i], got[i - 1] - 1e-12) << "at " << q[i];
  EXPECT_GE(*std::min_element(got.begin(), got.end()), -1e-12);
  EXPECT_LE(*std::max_element(got.begin(), got.end()), 10.0 + 1e-12);
}

TEST(Interpolation, OutsideSourceSpanIsZero)
{
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{5, 6, 7};
  const std::vector<double> q{0.5, 3.5};
  EXPECT_EQ(hermite_interpolate(x, y, q), (std::vector<double>{0.0, 0.0}));
}

TEST(Interpolation, RegridNeverNegative)
{
  const Chromatogram peak{linspace(1, 20, 20), {0, 0, 0, 0, 0, 0.01, 3, 10, 3, 0.01, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}};
  const Chromatogram r = regrid(peak, linspace(1, 20, 500));
  for (double v : r.response)
    EXPECT_GE(v, 0.0);
}

TEST(Interpolation, RejectsBadInput)
{
  const std::vector<double> q{1.0};
  EXPECT_THROW(hermite_interpolate(std::vector<double>{1.0}, std::vector<double>{1.0}, q), ValidationError);
  EXPECT_THROW(hermite_interpolate(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}, q),
               ValidationError);
  EXPECT_THROW(hermite_interpolate(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}, q), ValidationError);
}

} // namespace
