#include "flapkin/fourbar.hpp"

#include "flapkin/errors.hpp"

#include <algorithm>
#include <array>

namespace flapkin {

std::string_view to_string(GrashofClass c) noexcept {
  switch (c) {
    case GrashofClass::CrankRocker: return "crank-rocker";
    case GrashofClass::DoubleCrank: return "double-crank";
    case GrashofClass::DoubleRocker: return "double-rocker";
    case GrashofClass::RockerCrank: return "rocker-crank";
    case GrashofClass::ChangePoint: return "change-point";
    case GrashofClass::NonGrashof: return "non-Grashof";
  }
  return "unknown";
}

GrashofClass grashof_classify(const FourBar& fb) {
  if (!(fb.ground > 0.0 && fb.crank > 0.0 && fb.coupler > 0.0 && fb.rocker > 0.0)) {
    throw Error(ErrorCode::NonPositiveLength, "four-bar lengths must be positive");
  }
  // Order matters for ties: the crank wins a tie for shortest, then ground.
  const std::array<double, 4> len{fb.crank, fb.ground, fb.coupler, fb.rocker};
  const auto shortest = static_cast<std::size_t>(std::min_element(len.begin(), len.end()) - len.begin());
  const double s = len[shortest];
  const double l = *std::max_element(len.begin(), len.end());
  const double sum = len[0] + len[1] + len[2] + len[3];
  const double sl = s + l;
  const double pq = sum - sl;
  const double tol = 1e-12 * sum;

  if (std::abs(sl - pq) <= tol) return GrashofClass::ChangePoint;
  if (sl > pq) return GrashofClass::NonGrashof;
  switch (shortest) {
    case 0: return GrashofClass::CrankRocker;
    case 1: return GrashofClass::DoubleCrank;
    case 2: return GrashofClass::DoubleRocker;
    default: return GrashofClass::RockerCrank;
  }
}

FourBarAngles solve_fourbar(const FourBar& fb, double crank_angle) {
  if (!(fb.ground > 0.0 && fb.crank > 0.0 && fb.coupler > 0.0 && fb.rocker > 0.0)) {
    throw Error(ErrorCode::NonPositiveLength, "four-bar lengths must be positive");
  }
  const Vec2 pin = fb.crank * Vec2(std::cos(crank_angle), std::sin(crank_angle));
  const Vec2 pivot = fb.ground * Vec2(std::cos(fb.ground_angle), std::sin(fb.ground_angle));
  const DyadSolution dyad = solve_dyad(pin, fb.coupler, pivot, fb.rocker, branch_side(fb.branch));
  if (dyad.status == DyadStatus::NotAssemblable) {
    throw Error(ErrorCode::NotAssemblable, "coupler and rocker cannot reach each other", crank_angle);
  }
  if (dyad.status == DyadStatus::Singular) {
    throw Error(ErrorCode::SingularConfiguration, "coupler and rocker are collinear", crank_angle);
  }
  const Vec2 to_pin = dyad.apex - pin;
  const Vec2 to_pivot = dyad.apex - pivot;
  return {std::atan2(to_pin.y(), to_pin.x()), std::atan2(to_pivot.y(), to_pivot.x())};
}

Vec2 fourbar_loop_residual(const FourBar& fb, double crank_angle, const FourBarAngles& a) noexcept {
  auto e = [](double t) { return Vec2(std::cos(t), std::sin(t)); };
  return fb.crank * e(crank_angle) + fb.coupler * e(a.coupler) - fb.rocker * e(a.rocker) -
         fb.ground * e(fb.ground_angle);
}

}  // namespace flapkin
