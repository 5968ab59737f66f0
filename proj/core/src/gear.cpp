#include "flapkin/gear.hpp"

#include "flapkin/errors.hpp"

namespace flapkin {

double gear_couple(double input, double ratio, double offset) {
  if (ratio == 0.0) throw Error(ErrorCode::ZeroRatio, "gear ratio must be nonzero");
  return ratio * input + offset;
}

GearMap compose(const GearMap& first, const GearMap& second) noexcept {
  return {second.ratio * first.ratio, second.ratio * first.offset + second.offset};
}

}  // namespace flapkin
