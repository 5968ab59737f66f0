#pragma once

#include "flapkin/solver.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace flapkin {

// Output names the gait series are read from.
inline constexpr std::string_view kShoulderOutput = "shoulder";
inline constexpr std::string_view kElbowOutput = "elbow";
inline constexpr std::string_view kElbowPoint = "elbow";
inline constexpr std::string_view kWingtipPoint = "wingtip";

inline constexpr int kMinSweepSamples = 8;

enum class SweepMode {
  /// Each sample starts Newton from the previous one (sequential).
  Continuation,
  /// Each sample is assembled analytically on its declared branch; samples
  /// are independent and may run in parallel.
  Independent,
};

struct SweepOptions {
  SweepMode mode = SweepMode::Continuation;
  SolveOptions solve;
  /// Continuation only: re-solve at 2pi and require it to land on sample 0.
  bool check_closure = true;
  double closure_tolerance = 1e-6;  ///< rad
  int threads = 1;                  ///< Independent mode only
};

/// phi_k = 2 pi k / N, k = 0..N-1.
std::vector<double> phase_grid(int n);

struct GaitTrajectory {
  std::vector<double> phases;  ///< radians
  std::vector<Configuration> samples;

  // Derived series (radians / mm). Empty when the mechanism has no output
  // of that name.
  std::vector<double> theta_s;
  std::vector<double> theta_e;
  std::vector<Vec2> elbow;
  std::vector<Vec2> wingtip;

  std::size_t size() const noexcept { return phases.size(); }
};

/// Throws InvalidArgument for N < 8 and propagates solver errors with the
/// failing phase attached.
GaitTrajectory sweep_gait(const Mechanism& mech, int n, const SweepOptions& opts = {});

/// Angle output series by name (radians); throws InvalidArgument if absent.
std::vector<double> angle_series(const Mechanism& mech, const GaitTrajectory& traj, std::string_view name);
std::vector<Vec2> point_series(const Mechanism& mech, const GaitTrajectory& traj, std::string_view name);

}  // namespace flapkin
