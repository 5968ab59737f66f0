#include "flapkin/errors.hpp"
#include "flapkin/gait.hpp"
#include "flapkin/solver.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace flapkin {
namespace {

using test::fourbar_mechanism;
using test::load_data;

double gap(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

TEST(PhaseGrid, Uniform) {
  const auto g = phase_grid(8);
  ASSERT_EQ(g.size(), 8u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_DOUBLE_EQ(g[2], kPi / 2.0);
}

TEST(Sweep, RejectsCoarseGrid) {
  try {
    sweep_gait(fourbar_mechanism({5, 2, 6, 4}), 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Sweep, ParallelogramRockerFollowsCrank) {
  // A parallelogram swaps circuits at its two change points (0.5 and 180.5
  // degrees here), so no single branch flag covers the cycle. Each grid phase
  // is solved on both circuits and the parallel pose must be one of them.
  const double gamma = deg_to_rad(0.5);
  const Mechanism open = fourbar_mechanism({10, 4, 10, 4, gamma, Branch::Open});
  const Mechanism crossed = fourbar_mechanism({10, 4, 10, 4, gamma, Branch::Crossed});
  int on_open = 0, on_crossed = 0;
  for (double phi : phase_grid(360)) {
    const double a = solve_configuration(open, phi).angles[0];
    const double b = solve_configuration(crossed, phi).angles[0];
    const bool pa = gap(a, phi) <= 1e-9, pb = gap(b, phi) <= 1e-9;
    EXPECT_NE(pa, pb) << rad_to_deg(phi);
    on_open += pa;
    on_crossed += pb;
  }
  EXPECT_EQ(on_open, 180);
  EXPECT_EQ(on_crossed, 180);
}

TEST(Sweep, CoarseSamplesMatchFine) {
  const Mechanism m = load_data("reference_armwing.json");
  const GaitTrajectory c = sweep_gait(m, 8), f = sweep_gait(m, 360);
  for (int k = 0; k < 8; ++k) {
    EXPECT_LE(gap(c.theta_s[k], f.theta_s[45 * k]), 1e-9);
    EXPECT_LE(gap(c.theta_e[k], f.theta_e[45 * k]), 1e-9);
  }
}

TEST(Sweep, ContinuationEqualsIndependent) {
  const Mechanism m = load_data("reference_armwing.json");
  SweepOptions ind;
  ind.mode = SweepMode::Independent;
  ind.threads = 2;
  const GaitTrajectory a = sweep_gait(m, 360), b = sweep_gait(m, 360, ind);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_LE(gap(a.theta_s[k], b.theta_s[k]), 1e-9);
    EXPECT_LE((a.wingtip[k] - b.wingtip[k]).norm(), 1e-8);
  }
}

TEST(Sweep, NoBranchJumpsOnCrankRocker) {
  const Mechanism m = fourbar_mechanism({5, 2, 6, 4});
  const GaitTrajectory t = sweep_gait(m, 360);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto& a = t.samples[k].joint_angles;
    const auto& b = t.samples[(k + 1) % t.size()].joint_angles;
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_LT(gap(a[j], b[j]), deg_to_rad(15.0));
  }
}

TEST(Sweep, EverySampleCertified) {
  const Mechanism m = load_data("reference_armwing.json");
  const GaitTrajectory t = sweep_gait(m, 360);
  for (const auto& q : t.samples) EXPECT_LE(loop_closure_norm(m, q), 1e-9);
}

TEST(Sweep, SeriesByName) {
  const Mechanism m = fourbar_mechanism({5, 2, 6, 4});
  const GaitTrajectory t = sweep_gait(m, 36);
  const auto coupler = angle_series(m, t, "coupler");
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_LE(gap(coupler[k], solve_fourbar({5, 2, 6, 4}, t.phases[k]).coupler), 1e-9);
  }
  EXPECT_TRUE(t.theta_e.empty());
  try {
    angle_series(m, t, "elbow");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Sweep, WidestSpanInDownstroke) {
  const Mechanism m = load_data("reference_armwing.json");
  const GaitTrajectory t = sweep_gait(m, 360);
  std::size_t best = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t.wingtip[k].x() > t.wingtip[best].x()) best = k;
  }
  RecordProperty("widest_deg", static_cast<int>(best));
  EXPECT_GT(t.phases[best], kPi / 2.0);
  EXPECT_LT(t.phases[best], 3.0 * kPi / 2.0);
}

}  // namespace
}  // namespace flapkin
