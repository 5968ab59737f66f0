#pragma once

#include "flapkin/mechanism.hpp"

#include <optional>
#include <vector>

namespace flapkin {

/// Solved pose of every body at one crank phase.
struct Configuration {
  double phase = 0.0;              ///< radians
  std::vector<Pose2> poses;        ///< per link, ground links included
  std::vector<double> joint_angles;  ///< per joint: wrap(angle(b) - angle(a)), radians
  std::vector<double> angles;      ///< per angle output, radians
  std::vector<Vec2> points;        ///< per point output, mm
  double residual_norm = 0.0;      ///< max |joint gap| component, mm
  int iterations = 0;
};

struct SolveOptions {
  double tolerance = 1e-9;  ///< mm
  int max_iterations = 50;
  /// Reject solutions whose dyads sit on the other circuit.
  bool check_branch = true;
};

/// Link angles imposed by the driver and the gear chain at phase `phi`
/// (NaN for free and ground links).
std::vector<double> imposed_angles(const Mechanism& mech, double phi);

/// Analytic dyad-by-dyad assembly (home poses for links outside the plan),
/// polished by Newton. Throws NotAssemblable / SingularConfiguration with
/// the phase attached.
Configuration assemble(const Mechanism& mech, double phi, const SolveOptions& opts = {});

struct AssemblyDiagnostics {
  std::vector<double> margin;        ///< per dyad, mm (<= 0 closes); NaN past a failure
  std::vector<double> transmission;  ///< per dyad, radians; NaN where not closed
  int failed_dyad = -1;
};

/// Non-throwing assembly for optimization loops. Fills `diag` when given.
std::optional<Configuration> try_assemble(const Mechanism& mech, double phi, AssemblyDiagnostics* diag = nullptr,
                                          const SolveOptions& opts = {});

/// Newton solve at `phi`. Without a guess the analytic assembly is used.
/// Throws NoConvergence, SingularJacobian, NotAssemblable, BranchSwitch.
Configuration solve_configuration(const Mechanism& mech, double phi, const SolveOptions& opts = {});
Configuration solve_configuration(const Mechanism& mech, double phi, const Configuration& guess,
                                  const SolveOptions& opts = {});

/// World position of a joint side given the body poses.
Vec2 world_point(const Mechanism& mech, const std::vector<Pose2>& poses, const BodyPoint& bp);

/// Independent certificate: walks every loop summing link vectors built from
/// link angles and local geometry only. Returns the largest closure gap
/// component in mm.
double loop_closure_norm(const Mechanism& mech, const Configuration& cfg);

/// Smallest dyad transmission angle (radians) in a solved configuration.
double min_transmission_angle(const Mechanism& mech, const Configuration& cfg);

}  // namespace flapkin
