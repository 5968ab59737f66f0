#pragma once

#include "flapkin/errors.hpp"
#include "flapkin/gait.hpp"
#include "flapkin/mechanism.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flapkin {

struct SensitivityOptions {
  SweepOptions sweep;
  int threads = 1;
};

/// One perturbed sweep. On failure `trajectory` is empty and the error code
/// and phase of the first failing sample are kept.
struct ScaleOutcome {
  double scale = 1.0;
  std::optional<GaitTrajectory> trajectory;
  std::optional<ErrorCode> error;
  std::optional<double> failed_phase;  ///< radians
  double deviation = 0.0;              ///< max wingtip distance from nominal, mm
};

struct SensitivityResult {
  std::string parameter;
  double nominal = 0.0;
  std::vector<ScaleOutcome> outcomes;  ///< in the order of the requested scales
  /// Max wingtip deviation per 1% change, central-differenced over the
  /// nearest scales on either side of 1 (mm per %). +inf if one failed.
  double score = 0.0;
};

/// Sweeps the mechanism with `param` set to scale * nominal for each scale.
/// The scales must include 1. Throws UnknownParameter / InvalidArgument.
SensitivityResult sensitivity_sweep(const Mechanism& mech, const std::string& param, const std::vector<double>& scales,
                                    int n, const SensitivityOptions& opts = {});

struct RankEntry {
  std::string parameter;
  double score = 0.0;
};

/// Scores every parameter of the mechanism at scales 1 -/+ delta, sorted by
/// descending score then name. Throws InvalidArgument unless 0 < delta <= 0.1.
std::vector<RankEntry> sensitivity_rank(const Mechanism& mech, double delta, int n, const SensitivityOptions& opts = {});

/// Scales lo, lo + step, ..., hi (inclusive within rounding), 1 inserted if
/// missing.
std::vector<double> scale_range(double lo, double hi, double step);

}  // namespace flapkin
