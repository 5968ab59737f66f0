#include "flapkin/errors.hpp"
#include "flapkin/gait.hpp"
#include "flapkin/target.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace flapkin {
namespace {

// Extended-precision evaluation of the gait formulas.
long double shoulder_oracle(long double phi) { return 35.0L * std::sin(phi) - 10.0L; }
long double elbow_oracle(long double phi) {
  const long double a = phi + 2.0L * 3.14159265358979323846264338327950288L / 3.0L;
  return -0.5L * std::atan(-0.5L * std::sin(a) / (1.0L + 0.5L * std::cos(a))) * 45.0L + 120.0L;
}

TEST(Target, MatchesExtendedPrecision) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, kTwoPi);
  for (int i = 0; i < 2000; ++i) {
    const double phi = U(rng);
    EXPECT_NEAR(target_shoulder(phi), static_cast<double>(shoulder_oracle(phi)), 1e-12);
    EXPECT_NEAR(target_elbow(phi), static_cast<double>(elbow_oracle(phi)), 1e-12);
  }
}

TEST(Target, ElbowAtZero) {
  // Inner ratio is -1/sqrt(3): atan gives -pi/6, so 120 + 3.75 pi.
  EXPECT_NEAR(target_elbow(0.0), 131.78097245096172, 1e-12);
}

TEST(Target, QuarterPhases) {
  const TargetGait g = sample_targets(4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g.theta_s[0], -10.0, 1e-12);
  EXPECT_NEAR(g.theta_s[1], 25.0, 1e-12);
  EXPECT_NEAR(g.theta_s[2], -10.0, 1e-12);
  EXPECT_NEAR(g.theta_s[3], -45.0, 1e-12);
}

TEST(Target, GridExtremes) {
  const TargetGait g = sample_targets(360);
  const auto [smin, smax] = std::minmax_element(g.theta_s.begin(), g.theta_s.end());
  EXPECT_EQ(*smax, 25.0);
  EXPECT_EQ(smax - g.theta_s.begin(), 90);
  EXPECT_EQ(*smin, -45.0);
  const auto [emin, emax] = std::minmax_element(g.theta_e.begin(), g.theta_e.end());
  EXPECT_NEAR(*emin, 108.21902754903828, 1e-9);
  EXPECT_NEAR(*emax, 131.78097245096172, 1e-9);
  EXPECT_EQ(emin - g.theta_e.begin(), 120);
}

TEST(Target, Periodic) {
  for (double phi : {0.0, 0.4, 2.5, 6.0}) {
    EXPECT_NEAR(target_shoulder(phi), target_shoulder(phi + kTwoPi), 1e-12);
    EXPECT_NEAR(target_elbow(phi), target_elbow(phi - kTwoPi), 1e-12);
    EXPECT_EQ(target_elbow(phi + kTwoPi), target_elbow(wrap_two_pi(phi + kTwoPi)));
  }
}

TEST(Target, SameGridAsSweep) { EXPECT_EQ(sample_targets(360).phases, phase_grid(360)); }

TEST(Target, FastExtensionInsideDownstroke) {
  // The elbow closes to its minimum (wing spread) within the downstroke and
  // gets there in a third of the cycle; reopening takes the other two thirds.
  const int n = 3600;
  const TargetGait g = sample_targets(n);
  const auto lo = std::min_element(g.theta_e.begin(), g.theta_e.end()) - g.theta_e.begin();
  const auto hi = std::max_element(g.theta_e.begin(), g.theta_e.end()) - g.theta_e.begin();
  EXPECT_GT(g.phases[lo], kPi / 2.0);
  EXPECT_LT(g.phases[lo], 3.0 * kPi / 2.0);
  const long fall = (lo - hi + n) % n;
  const long rise = (hi - lo + n) % n;
  EXPECT_EQ(fall, n / 3);
  EXPECT_LT(fall, rise);
}

TEST(Target, InvalidCount) {
  try {
    sample_targets(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

}  // namespace
}  // namespace flapkin
