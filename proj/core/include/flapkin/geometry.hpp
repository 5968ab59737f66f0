#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace flapkin {

using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / kPi); }

/// Wraps to (-pi, pi].
inline double wrap_pi(double angle) noexcept {
  double a = std::remainder(angle, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

/// Wraps to [0, 2pi).
inline double wrap_two_pi(double angle) noexcept {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

inline double cross(const Vec2& a, const Vec2& b) noexcept { return a.x() * b.y() - a.y() * b.x(); }

inline Vec2 rotate(const Vec2& p, double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

/// Planar rigid-body pose: world = origin + R(angle) * local.
struct Pose2 {
  Vec2 origin = Vec2::Zero();
  double angle = 0.0;

  Vec2 to_world(const Vec2& local) const noexcept { return origin + rotate(local, angle); }
};

/// Side of the directed line from `from` to `to` (+1 left, -1 right).
enum class Side : int { Right = -1, Left = 1 };

inline Side flip(Side s) noexcept { return s == Side::Left ? Side::Right : Side::Left; }

enum class DyadStatus { Ok, NotAssemblable, Singular };

/// Circle-circle intersection used to close a two-link (RRR) dyad: the apex
/// lies at `arm1` from `p1` and `arm2` from `p2`, on the requested side of
/// the directed line p1 -> p2.
struct DyadSolution {
  DyadStatus status = DyadStatus::NotAssemblable;
  Vec2 apex = Vec2::Zero();
  /// Assemblability margin in mm; <= 0 when the triangle inequality holds.
  double margin = 0.0;
  /// Acute angle between the two arms at the apex, radians in [0, pi/2].
  double transmission = 0.0;
};

/// Collinearity tolerance for the two arms at the apex (radians).
inline constexpr double kSingularAngle = 1e-9;

DyadSolution solve_dyad(const Vec2& p1, double arm1, const Vec2& p2, double arm2, Side side) noexcept;

/// Side of `apex` relative to the directed line p1 -> p2.
inline Side side_of(const Vec2& p1, const Vec2& p2, const Vec2& apex) noexcept {
  return cross(p2 - p1, apex - p1) >= 0.0 ? Side::Left : Side::Right;
}

}  // namespace flapkin
