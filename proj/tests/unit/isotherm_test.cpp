#include "chromainv/error.hpp"
#include "chromainv/isotherm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace {

using namespace chromainv;

const IsothermParams kReference{std::array<double, 8>{9.54, 0.91, 9.53, 1.00, 2.74, 0.43, 1.80, 0.08}};

TEST(Isotherm, ZeroConcentrationGivesZeroLoading)
{
  const Concentration2 q = isotherm_eval(kReference, {0.0, 0.0});
  EXPECT_EQ(q.c1, 0.0);
  EXPECT_EQ(q.c2, 0.0);
}

TEST(Isotherm, ReferenceParametersAtUnitConcentration)
{
  // denominators 1 + 0.91 + 0.43 = 2.34 and 1 + 1.00 + 0.08 = 2.08
  const Concentration2 q = isotherm_eval(kReference, {1.0, 1.0});
  EXPECT_NEAR(q.c1, 9.54 / 2.34 + 9.53 / 2.08, 1e-12);
  EXPECT_NEAR(q.c2, 2.74 / 2.34 + 1.80 / 2.08, 1e-12);
  EXPECT_NEAR(q.c1, 8.6586, 1e-4);
  EXPECT_NEAR(q.c2, 2.0363, 1e-4);
}

TEST(Isotherm, LinearDegenerationWithoutAssociation)
{
  const IsothermParams p{std::array<double, 8>{1.5, 0, 2.0, 0, 0.25, 0, 4.0, 0}};
  const Concentration2 q = isotherm_eval(p, {2.0, 3.0});
  EXPECT_DOUBLE_EQ(q.c1, 3.5 * 2.0);
  EXPECT_DOUBLE_EQ(q.c2, 4.25 * 3.0);
  for (const Concentration2 c : {Concentration2{0, 0}, Concentration2{2, 3}, Concentration2{17, 0.5}}) {
    const Jacobian2 j = isotherm_jacobian(p, c);
    EXPECT_DOUBLE_EQ(j[0][0], 3.5);
    EXPECT_DOUBLE_EQ(j[1][1], 4.25);
    EXPECT_EQ(j[0][1], 0.0);
    EXPECT_EQ(j[1][0], 0.0);
  }
}

TEST(Isotherm, JacobianAtZeroIsDiagonalOfSiteSums)
{
  const Jacobian2 j = isotherm_jacobian(kReference, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(j[0][0], 9.54 + 9.53);
  EXPECT_DOUBLE_EQ(j[1][1], 2.74 + 1.80);
  EXPECT_EQ(j[0][1], 0.0);
  EXPECT_EQ(j[1][0], 0.0);
}

TEST(Isotherm, JacobianMatchesFiniteDifferences)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> par(0.0, 100.0);
  std::uniform_real_distribution<double> conc(0.05, 30.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, 8> v{};
    for (auto& x : v)
      x = par(rng);
    const IsothermParams p{v};
    const Concentration2 c{conc(rng), conc(rng)};
    const Jacobian2 j = isotherm_jacobian(p, c);
    for (int col = 0; col < 2; ++col) {
      const double h = 1e-6 * std::max(1.0, c[col]);
      Concentration2 up = c;
      Concentration2 down = c;
      (col == 0 ? up.c1 : up.c2) += h;
      (col == 0 ? down.c1 : down.c2) -= h;
      const Concentration2 qu = isotherm_eval(p, up);
      const Concentration2 qd = isotherm_eval(p, down);
      for (int row = 0; row < 2; ++row) {
        const double fd = (qu[row] - qd[row]) / (2 * h);
        EXPECT_NEAR(j[row][col], fd, 1e-6 * std::max(std::abs(fd), 1e-3)) << "trial " << trial;
      }
    }
  }
}

TEST(Isotherm, SwappedComponentsRelabelTheSystem)
{
  const IsothermParams s = kReference.swapped_components();
  const Concentration2 q = isotherm_eval(kReference, {2.0, 5.0});
  const Concentration2 qs = isotherm_eval(s, {5.0, 2.0});
  EXPECT_DOUBLE_EQ(q.c1, qs.c2);
  EXPECT_DOUBLE_EQ(q.c2, qs.c1);
  EXPECT_EQ(s.swapped_components(), kReference);
}

TEST(Isotherm, AccessorsFollowStorageOrder)
{
  EXPECT_EQ(kReference.a(0, 0), 9.54);
  EXPECT_EQ(kReference.b(0, 0), 0.91);
  EXPECT_EQ(kReference.a(1, 0), 9.53);
  EXPECT_EQ(kReference.b(1, 0), 1.00);
  EXPECT_EQ(kReference.a(0, 1), 2.74);
  EXPECT_EQ(kReference.b(0, 1), 0.43);
  EXPECT_EQ(kReference.a(1, 1), 1.80);
  EXPECT_EQ(kReference.b(1, 1), 0.08);
}

TEST(Isotherm, RejectsInvalidParametersAndConcentrations)
{
  EXPECT_THROW(IsothermParams(std::array<double, 8>{-1, 0, 0, 0, 0, 0, 0, 0}), ValidationError);
  EXPECT_THROW(IsothermParams(std::array<double, 8>{std::numeric_limits<double>::quiet_NaN(), 0, 0, 0, 0, 0, 0, 0}),
               ValidationError);
  const std::vector<double> seven(7, 1.0);
  EXPECT_THROW(IsothermParams(std::span<const double>(seven)), ValidationError);
  EXPECT_THROW(isotherm_eval(kReference, {-1.0, 0.0}), ValidationError);
}

TEST(Isotherm, TinyUndershootIsClampedToZero)
{
  const Concentration2 q = isotherm_eval(kReference, {-0.5 * kUndershootTolerance, 0.0});
  EXPECT_EQ(q.c1, 0.0);
}

} // namespace
