#include "flapkin/geometry.hpp"

#include <algorithm>

namespace flapkin {

DyadSolution solve_dyad(const Vec2& p1, double arm1, const Vec2& p2, double arm2, Side side) noexcept {
  DyadSolution out;
  const Vec2 d = p2 - p1;
  const double dist = d.norm();
  out.margin = std::max(dist - (arm1 + arm2), std::abs(arm1 - arm2) - dist);

  const double scale = arm1 + arm2 + dist;
  const double eps = 1e-12 * scale;
  if (dist <= eps || out.margin > eps) {
    out.status = DyadStatus::NotAssemblable;
    return out;
  }

  // Heron-style product keeps the apex height accurate near the limits.
  const double prod = (arm1 + arm2 + dist) * (-arm1 + arm2 + dist) * (arm1 - arm2 + dist) * (arm1 + arm2 - dist);
  const double height = std::sqrt(std::max(prod, 0.0)) / (2.0 * dist);
  const double along = (arm1 * arm1 - arm2 * arm2 + dist * dist) / (2.0 * dist);
  const Vec2 unit = d / dist;
  const Vec2 normal(-unit.y(), unit.x());
  out.apex = p1 + along * unit + static_cast<double>(static_cast<int>(side)) * height * normal;

  const Vec2 u = p1 - out.apex;
  const Vec2 v = p2 - out.apex;
  const double mu = std::atan2(std::abs(cross(u, v)), u.dot(v));
  out.transmission = std::min(mu, kPi - mu);
  out.status = out.transmission < kSingularAngle ? DyadStatus::Singular : DyadStatus::Ok;
  return out;
}

}  // namespace flapkin
