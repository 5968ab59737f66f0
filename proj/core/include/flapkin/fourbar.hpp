#pragma once

#include "flapkin/geometry.hpp"

#include <string_view>

namespace flapkin {

/// Assembly circuit of a four-bar. `Open` places the coupler/rocker joint on
/// the left of the directed line from the crank pin to the rocker pivot.
enum class Branch { Open, Crossed };

inline Side branch_side(Branch b) noexcept { return b == Branch::Open ? Side::Left : Side::Right; }

/// Single four-bar: crank pivot at the origin, rocker pivot at
/// `ground` * (cos ground_angle, sin ground_angle). Lengths in mm.
struct FourBar {
  double ground = 0.0;
  double crank = 0.0;
  double coupler = 0.0;
  double rocker = 0.0;
  double ground_angle = 0.0;
  Branch branch = Branch::Open;
};

enum class GrashofClass { CrankRocker, DoubleCrank, DoubleRocker, RockerCrank, ChangePoint, NonGrashof };

std::string_view to_string(GrashofClass c) noexcept;

/// Grashof classification with the crank as the driven link.
GrashofClass grashof_classify(const FourBar& fb);

struct FourBarAngles {
  double coupler = 0.0;  ///< absolute coupler angle, radians
  double rocker = 0.0;   ///< absolute rocker angle, radians
};

/// Closed-form loop closure at absolute crank angle `crank_angle` (radians).
/// Throws NotAssemblable or SingularConfiguration.
FourBarAngles solve_fourbar(const FourBar& fb, double crank_angle);

/// Vector loop residual crank + coupler - rocker - ground (mm).
Vec2 fourbar_loop_residual(const FourBar& fb, double crank_angle, const FourBarAngles& angles) noexcept;

}  // namespace flapkin
