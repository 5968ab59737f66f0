#pragma once

namespace flapkin {

/// Angle carried through a gear pair: ratio * input + offset (radians).
/// External meshes use a negative ratio. Throws ZeroRatio.
double gear_couple(double input, double ratio, double offset);

/// Affine composition of two couplings applied in order (first, then second).
struct GearMap {
  double ratio = 1.0;
  double offset = 0.0;

  double operator()(double input) const { return ratio * input + offset; }
};

GearMap compose(const GearMap& first, const GearMap& second) noexcept;

}  // namespace flapkin
