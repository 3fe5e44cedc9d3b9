#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aoa/geometry.hpp"

namespace aoa {
namespace {

TEST(WrapAngle, MapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(2.0 * kPi + 0.25), 0.25, 1e-12);
  EXPECT_NEAR(wrap_angle(-2.0 * kPi - 0.25), -0.25, 1e-12);
}

TEST(WrapAngle, RandomInputsStayInRange) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng);
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    const double k = (a - w) / (2.0 * kPi);
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
}

TEST(Bearing, QuadrantCases) {
  EXPECT_DOUBLE_EQ(bearing({0, 0}, {1000, 1000}), kPi / 4);
  EXPECT_DOUBLE_EQ(bearing({0, 0}, {-1000, 0}), kPi);
  EXPECT_DOUBLE_EQ(bearing({2000, 1000}, {2000, 5000}), kPi / 2);
  EXPECT_DOUBLE_EQ(bearing({0, 0}, {0, -1}), -kPi / 2);
  EXPECT_DOUBLE_EQ(bearing({0, 0}, {-1, -1}), -3 * kPi / 4);
}

TEST(Bearing, NegativeZeroWestStillPi) {
  EXPECT_DOUBLE_EQ(bearing({0, 0.0}, {-5, -0.0}), kPi);
}

TEST(Bearing, CoincidentPointsThrow) {
  try {
    bearing({3, 4}, {3, 4});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateGeometry);
  }
}

TEST(Region, ShrinkAndContain) {
  const Region r;
  EXPECT_DOUBLE_EQ(r.width(), 200000.0);
  const Region s = r.shrunk(80000.0);
  EXPECT_EQ(s, Region::centered(20000.0));
  EXPECT_TRUE(s.contains({20000.0, -20000.0}));
  EXPECT_FALSE(s.contains({20000.1, 0.0}));
  EXPECT_THROW(r.shrunk(100000.0), Error);
}

TEST(Units, DegreeRadianRoundTrip) {
  EXPECT_DOUBLE_EQ(deg_to_rad(180.0), kPi);
  EXPECT_DOUBLE_EQ(rad_to_deg(kPi / 2), 90.0);
}

}  // namespace
}  // namespace aoa
