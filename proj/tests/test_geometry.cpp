#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jjchain/geometry.hpp"
#include "test_util.hpp"

using namespace jjchain;
using testutil::rel;

namespace {
constexpr double um = 1e-6;
constexpr double nm = 1e-9;
constexpr double deg = M_PI / 180.0;
}  // namespace

TEST(AreaInductance, Values) {
  EXPECT_LT(rel(area_to_inductance(0.7 * um * um), 5.714e-9), 1e-4);
  EXPECT_LT(rel(area_to_inductance(0.7 * um * um), 5.7e-9), 0.01);
  EXPECT_LT(rel(area_to_inductance(1.0 * um * um), 4e-9), 1e-15);
  EXPECT_LT(rel(area_to_inductance(2.0 * um * um), 2e-9), 1e-15);
  for (double a : {0.1, 0.6, 0.75, 3.0}) {
    EXPECT_LT(rel(area_to_inductance(a * um * um) * a * um * um, 4e-21), 1e-15);
  }
  EXPECT_LT(rel(area_to_inductance(1.0 * um * um, 5e-21), 5e-9), 1e-15);
  EXPECT_THROW(area_to_inductance(0.0), Error);
  EXPECT_THROW(area_to_inductance(1e-12, -1.0), Error);
}

TEST(Pyramid, Validation) {
  EXPECT_THROW(PyramidStack(0.0, 20 * nm, 9, default_clog_angle), Error);
  EXPECT_THROW(PyramidStack(um, 0.0, 9, default_clog_angle), Error);
  EXPECT_THROW(PyramidStack(um, 20 * nm, 0, default_clog_angle), Error);
  EXPECT_THROW(PyramidStack(um, 20 * nm, 9, M_PI / 2), Error);
  try {
    PyramidStack(0.1 * um, 100 * nm, 9, 30 * deg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvertedPyramid);
  }
}

TEST(Pyramid, FlatWallsKeepBaseArea) {
  const PyramidStack s(um, 20 * nm, 9, 0.0);
  for (int k = 0; k < 9; ++k) EXPECT_EQ(layer_area(s, k), um * um);
  const auto r = inhomogeneity_report(s);
  EXPECT_EQ(r.spread, 0.0);
  EXPECT_LT(rel(r.total_l, 9 * area_to_inductance(um * um)), 1e-14);
}

TEST(Pyramid, AreasDecrease) {
  const PyramidStack s(um, 20 * nm, 9, default_clog_angle);
  EXPECT_EQ(layer_area(s, 0), um * um);
  for (int k = 1; k < 9; ++k) EXPECT_LT(layer_area(s, k), layer_area(s, k - 1));
  EXPECT_THROW(layer_area(s, 9), Error);
  EXPECT_THROW(layer_area(s, -1), Error);
}

TEST(Pyramid, ReductionIdentityRandom) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double l = (0.2 + 2 * u(rng)) * um;
    const double theta = (1 + 40 * u(rng)) * deg;
    const double tn = std::tan(theta);
    const double d = 0.45 * l / tn * u(rng) + 1 * nm;
    ASSERT_LT(d * tn, l / 2);
    const double hand = 4 * l * d * tn - 4 * d * d * tn * tn;
    EXPECT_LT(rel(area_reduction(l, d, theta), hand), 1e-12);
    const PyramidStack s(l, d, 2, theta);
    EXPECT_LT(rel(layer_area(s, 0) - layer_area(s, 1), hand), 1e-12);
  }
}

TEST(Pyramid, PerLayerMatchesReductionAtHeight) {
  const PyramidStack s(um, 20 * nm, 9, default_clog_angle);
  for (int k = 1; k < 9; ++k) {
    const double side = um - 2 * k * 20 * nm * std::tan(default_clog_angle);
    EXPECT_LT(rel(layer_area(s, k), side * side), 1e-14);
    EXPECT_LT(rel(um * um - layer_area(s, k), area_reduction(um, k * 20 * nm, default_clog_angle)),
              1e-12);
  }
}

TEST(Pyramid, StatedReductionDisagreesWithFormula) {
  // Quoted 0.18 um^2 vs 0.157 um^2 from the formula at 180 nm height.
  const double da = area_reduction(um, 180 * nm, default_clog_angle);
  EXPECT_NEAR(da / (um * um), 0.157, 0.001);
  EXPECT_GT(std::abs(da - 0.18 * um * um) / (0.18 * um * um), 0.10);
  // The alternative angle and the 160 nm top both move further away.
  EXPECT_LT(area_reduction(um, 180 * nm, alternative_clog_angle), da);
  EXPECT_LT(area_reduction(um, 160 * nm, default_clog_angle), da);
}

TEST(Inhomogeneity, TwoLayerHandCheck) {
  const PyramidStack s(um, 20 * nm, 2, default_clog_angle);
  const double a0 = um * um;
  const double side1 = um - 40 * nm * std::tan(default_clog_angle);
  const double a1 = side1 * side1;
  const auto r = inhomogeneity_report(s);
  EXPECT_LT(rel(r.total_l, 4e-21 * (1 / a0 + 1 / a1)), 1e-14);
  const double l0 = 4e-21 / a0, l1 = 4e-21 / a1;
  EXPECT_LT(rel(r.spread, (l1 - l0) / ((l0 + l1) / 2)), 1e-12);
}

TEST(Inhomogeneity, TotalAtLeastUniformStack) {
  for (double theta : {0.0, 1 * deg, default_clog_angle, 20 * deg}) {
    const PyramidStack s(um, 20 * nm, 9, theta);
    const auto r = inhomogeneity_report(s);
    const double uniform = 9 * area_to_inductance(layer_area(s, 0));
    if (theta == 0.0) {
      EXPECT_LT(rel(r.total_l, uniform), 1e-14);
    } else {
      EXPECT_GT(r.total_l, uniform);
    }
    ASSERT_EQ(r.layers.areas.size(), 9u);
    for (int k = 0; k < 9; ++k) {
      EXPECT_DOUBLE_EQ(r.layers.inductances[k], area_to_inductance(r.layers.areas[k]));
    }
  }
}
