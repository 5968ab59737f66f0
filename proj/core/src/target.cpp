#include "flapkin/target.hpp"

#include "flapkin/errors.hpp"
#include "flapkin/gait.hpp"

#include <cmath>

namespace flapkin {

double target_shoulder(double phi, const GaitConstants& c) noexcept {
  return c.shoulder_amplitude * std::sin(wrap_two_pi(phi)) + c.shoulder_offset;
}

double target_elbow(double phi, const GaitConstants& c) noexcept {
  const double a = wrap_two_pi(phi) + c.elbow_phase;
  // 1 + k cos(a) >= 1 - k > 0 for |k| < 1, so plain atan is safe.
  const double inner = std::atan(-c.elbow_skew * std::sin(a) / (1.0 + c.elbow_skew * std::cos(a)));
  return c.elbow_weight * inner * c.elbow_gain + c.elbow_offset;
}

TargetGait sample_targets(int n, const GaitConstants& c) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "target sample count must be positive");
  TargetGait t;
  t.constants = c;
  t.phases = phase_grid(n);
  for (double phi : t.phases) {
    t.theta_s.push_back(target_shoulder(phi, c));
    t.theta_e.push_back(target_elbow(phi, c));
  }
  return t;
}

}  // namespace flapkin
