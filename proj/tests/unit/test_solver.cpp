#include "flapkin/errors.hpp"
#include "flapkin/gait.hpp"
#include "flapkin/solver.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace flapkin {
namespace {

using test::fourbar_mechanism;
using test::load_data;

double gap(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

// Largest joint gap recomputed from the spec's own numbers, not from the
// mechanism's compiled tables.
double spec_joint_gap(const Mechanism& m, const Configuration& q) {
  const LinkageSpec s = m.spec();
  auto world = [&](const PointRef& r) -> Vec2 {
    if (r.body == "ground") {
      for (const auto& p : s.pivots)
        if (p.id == r.point) return {p.x, p.y};
    }
    for (std::size_t i = 0; i < s.links.size(); ++i) {
      const auto& l = s.links[i];
      if (l.id != r.body) continue;
      Vec2 local(0, 0);
      if (r.point == "tip") local = {l.length, 0};
      for (const auto& np : l.points)
        if (np.name == r.point) local = {np.u, np.v};
      const double c = std::cos(q.poses[i].angle), sn = std::sin(q.poses[i].angle);
      return q.poses[i].origin + Vec2(c * local.x() - sn * local.y(), sn * local.x() + c * local.y());
    }
    ADD_FAILURE() << "bad ref";
    return {0, 0};
  };
  double worst = 0.0;
  for (const auto& j : s.joints) worst = std::max(worst, (world(j.a) - world(j.b)).cwiseAbs().maxCoeff());
  return worst;
}

TEST(Solver, MatchesClosedFormOnFourBars) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int made = 0;
  while (made < 6) {
    FourBar fb{3 + 5 * U(rng), 0.5 + U(rng), 2 + 6 * U(rng), 2 + 6 * U(rng), U(rng) - 0.5,
               made % 2 ? Branch::Crossed : Branch::Open};
    if (grashof_classify(fb) != GrashofClass::CrankRocker) continue;
    ++made;
    const Mechanism m = fourbar_mechanism(fb);
    const int rocker = m.link_index("rocker"), coupler = m.link_index("coupler");
    for (int k = 0; k < 360; ++k) {
      const double phi = kTwoPi * k / 360.0;
      const auto q = solve_configuration(m, phi);
      const auto a = solve_fourbar(fb, phi);
      EXPECT_LE(gap(q.poses[rocker].angle, a.rocker), 1e-9);
      EXPECT_LE(gap(q.poses[coupler].angle, a.coupler), 1e-9);
    }
  }
}

TEST(Solver, ArmwingAtZeroCertified) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto q = solve_configuration(m, 0.0);
  EXPECT_LE(q.residual_norm, 1e-9);
  EXPECT_LE(spec_joint_gap(m, q), 1e-9);
  EXPECT_LE(loop_closure_norm(m, q), 1e-9);
}

TEST(Solver, NewtonFromPerturbedGuess) {
  const Mechanism m = load_data("reference_armwing.json");
  auto guess = solve_configuration(m, 0.0);
  const auto exact = solve_configuration(m, 0.05);
  const auto q = solve_configuration(m, 0.05, guess);
  EXPECT_GT(q.iterations, 0);
  EXPECT_LE(q.residual_norm, 1e-9);
  for (std::size_t i = 0; i < q.angles.size(); ++i) EXPECT_LE(gap(q.angles[i], exact.angles[i]), 1e-9);
}

TEST(Solver, WrongCircuitGuessIsBranchSwitch) {
  const FourBar open{5, 2, 6, 4};
  FourBar crossed = open;
  crossed.branch = Branch::Crossed;
  const auto guess = solve_configuration(fourbar_mechanism(crossed), 1.0);
  try {
    solve_configuration(fourbar_mechanism(open), 1.0, guess);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BranchSwitch);
  }
}

TEST(Solver, LongCrankPinsCannotAssemble) {
  LinkageSpec s = load_data("reference_armwing.json").spec();
  for (auto& l : s.links) {
    if (l.id != "crank") continue;
    for (auto& p : l.points) {
      p.u *= 10.0;
      p.v *= 10.0;
    }
  }
  const Mechanism m = Mechanism::validate(s);
  int failures = 0;
  for (int k = 0; k < 360; ++k) {
    try {
      assemble(m, kTwoPi * k / 360.0);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotAssemblable);
      ++failures;
    }
  }
  EXPECT_GT(failures, 0);
  try {
    sweep_gait(m, 360);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAssemblable);
    EXPECT_TRUE(e.phase().has_value());
  }
}

TEST(Solver, GearCouplingImposedExactly) {
  const Mechanism t = gear_coupled_twin(load_data("reference_armwing.json"));
  const int crank = t.link_index("crank"), lcrank = t.link_index("L_crank");
  for (int k = 0; k < 12; ++k) {
    const double phi = kTwoPi * k / 12.0;
    const auto q = solve_configuration(t, phi);
    EXPECT_NEAR(q.poses[lcrank].angle, kPi - q.poses[crank].angle, 1e-14);
  }
}

TEST(Solver, TransmissionAngleOfRightTriangle) {
  // At crank angle where coupler and rocker meet at 90 degrees.
  const Mechanism m = fourbar_mechanism({5, 2, 6, 4});
  const auto q = solve_configuration(m, 0.0);
  // Pin (2,0), pivot (5,0): 3^2 = 36 + 16 - 48 cos(mu).
  EXPECT_NEAR(min_transmission_angle(m, q), std::acos(43.0 / 48.0), 1e-12);
}

}  // namespace
}  // namespace flapkin
