#pragma once

#include "flapkin/geometry.hpp"

#include <vector>

namespace flapkin {

/// Constants of the desired wingbeat. Angles in degrees; the elbow gain is
/// degrees per radian of the inner arctangent.
struct GaitConstants {
  double shoulder_amplitude = 35.0;
  double shoulder_offset = -10.0;
  double elbow_weight = -0.5;
  double elbow_skew = 0.5;
  double elbow_phase = 2.0 * kPi / 3.0;  ///< radians
  double elbow_gain = 45.0;
  double elbow_offset = 120.0;
};

/// Desired shoulder angle (degrees) at crank phase `phi` (radians).
double target_shoulder(double phi, const GaitConstants& c = {}) noexcept;

/// Desired elbow angle (degrees): a skewed sinusoid, fast extension and
/// slow flexion.
double target_elbow(double phi, const GaitConstants& c = {}) noexcept;

struct TargetGait {
  GaitConstants constants;
  std::vector<double> phases;    ///< radians, 2 pi k / N
  std::vector<double> theta_s;   ///< degrees
  std::vector<double> theta_e;   ///< degrees

  std::size_t size() const noexcept { return phases.size(); }
};

/// Samples both targets on the same grid sweep_gait uses. Throws
/// InvalidArgument for N < 1.
TargetGait sample_targets(int n, const GaitConstants& c = {});

}  // namespace flapkin
