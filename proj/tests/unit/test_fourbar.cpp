#include "flapkin/errors.hpp"
#include "flapkin/fourbar.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace flapkin {
namespace {

// Brute force: scan the rocker angle for sign changes of |Q - P| - coupler and
// bisect, then keep the root on the requested side. Shares no code with
// solve_fourbar.
double bisection_rocker(const FourBar& fb, double crank_angle) {
  const long double gx = fb.ground * std::cos(fb.ground_angle), gy = fb.ground * std::sin(fb.ground_angle);
  const long double px = fb.crank * std::cos(crank_angle), py = fb.crank * std::sin(crank_angle);
  auto f = [&](long double t) {
    const long double qx = gx + fb.rocker * std::cos(t), qy = gy + fb.rocker * std::sin(t);
    return std::hypot(qx - px, qy - py) - static_cast<long double>(fb.coupler);
  };
  const int n = 4096;
  const long double h = 2.0L * 3.14159265358979323846264338327950288L / n;
  std::vector<long double> roots;
  for (int k = 0; k < n; ++k) {
    long double a = k * h, b = (k + 1) * h;
    long double fa = f(a), fb2 = f(b);
    if ((fa < 0) == (fb2 < 0)) continue;
    for (int it = 0; it < 200 && b - a > 1e-18L; ++it) {
      const long double m = 0.5L * (a + b);
      const long double fm = f(m);
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5L * (a + b));
  }
  for (long double t : roots) {
    const long double qx = gx + fb.rocker * std::cos(t), qy = gy + fb.rocker * std::sin(t);
    const long double c = (gx - px) * (qy - py) - (gy - py) * (qx - px);
    if ((c >= 0) == (fb.branch == Branch::Open)) return static_cast<double>(t);
  }
  ADD_FAILURE() << "no root on the requested side";
  return 0.0;
}

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

TEST(Grashof, Classification) {
  EXPECT_EQ(grashof_classify({5, 2, 6, 4}), GrashofClass::CrankRocker);
  EXPECT_EQ(grashof_classify({1, 2, 3, 4}), GrashofClass::ChangePoint);
  EXPECT_EQ(grashof_classify({2, 5, 4, 6}), GrashofClass::DoubleCrank);
  EXPECT_EQ(grashof_classify({5, 4, 2, 6}), GrashofClass::DoubleRocker);
  EXPECT_EQ(grashof_classify({10, 2, 3, 4}), GrashofClass::NonGrashof);
}

TEST(FourBar, ParallelogramIdentity) {
  const FourBar fb{10, 4, 10, 4};
  const auto a = solve_fourbar(fb, deg_to_rad(37.0));
  EXPECT_NEAR(a.rocker, deg_to_rad(37.0), 1e-12);
  EXPECT_NEAR(angle_gap(a.coupler, 0.0), 0.0, 1e-12);
}

TEST(FourBar, ReferenceCaseOpenBranch) {
  const FourBar fb{5, 2, 6, 4};
  const auto a = solve_fourbar(fb, kPi / 2.0);
  // Law of cosines in long double: crank pin (0,2), rocker pivot (5,0).
  const long double d = std::sqrt(29.0L);
  const long double base = std::atan2(2.0L, -5.0L);  // pivot -> pin
  const long double beta = std::acos((16.0L + 29.0L - 36.0L) / (2.0L * 4.0L * d));
  const double oracle = static_cast<double>(base - beta);
  EXPECT_NEAR(angle_gap(a.rocker, oracle), 0.0, 1e-12);
  EXPECT_NEAR(rad_to_deg(a.rocker), 80.2569128292, 1e-9);
  EXPECT_NEAR(angle_gap(a.rocker, bisection_rocker(fb, kPi / 2.0)), 0.0, 1e-9);
}

TEST(FourBar, NotAssemblableWhenTooShort) {
  try {
    solve_fourbar({10, 1, 3, 4}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAssemblable);
  }
}

TEST(FourBar, CollinearIsSingular) {
  // Coupler and rocker stretch into one line at crank angle 0.
  try {
    solve_fourbar({5, 1, 3, 1}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularConfiguration);
  }
}

TEST(FourBar, LoopResidualTiny) {
  const FourBar fb{5, 2, 6, 4, 0.3, Branch::Crossed};
  for (int k = 0; k < 360; ++k) {
    const double t = deg_to_rad(k);
    const auto a = solve_fourbar(fb, t);
    const Vec2 r = fourbar_loop_residual(fb, t, a);
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FourBar, MatchesBisectionOnRandomCrankRockers) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int made = 0;
  while (made < 5) {
    FourBar fb{3 + 5 * U(rng), 0.5 + U(rng), 2 + 6 * U(rng), 2 + 6 * U(rng), (U(rng) - 0.5), U(rng) < 0.5 ? Branch::Open : Branch::Crossed};
    if (grashof_classify(fb) != GrashofClass::CrankRocker) continue;
    const double s = fb.crank, l = std::max({fb.ground, fb.coupler, fb.rocker});
    if (s + l > fb.ground + fb.coupler + fb.rocker - l - 0.2) continue;
    ++made;
    for (int k = 0; k < 360; k += 7) {
      const double t = deg_to_rad(k);
      EXPECT_LE(angle_gap(solve_fourbar(fb, t).rocker, bisection_rocker(fb, t)), 1e-9);
    }
  }
}

}  // namespace
}  // namespace flapkin
