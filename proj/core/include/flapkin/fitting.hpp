#pragma once

#include "flapkin/gait.hpp"
#include "flapkin/mechanism.hpp"
#include "flapkin/target.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flapkin {

/// Which angle series a fit compares against its target.
enum class FitStage { Humerus, Radius, All };

std::string_view to_string(FitStage s) noexcept;

/// Ordered design parameters with bounds and stage tags, in the order the
/// mechanism file lists them.
struct DesignVector {
  std::vector<std::string> names;
  std::vector<int> index;  ///< into Mechanism::parameters()
  std::vector<double> values;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Stage> stages;

  std::size_t size() const noexcept { return names.size(); }
};

DesignVector design_vector(const Mechanism& mech);
Mechanism apply_design(const Mechanism& mech, const DesignVector& q);

struct ResidualVector {
  std::vector<double> y;  ///< degrees
  int n = 0;              ///< samples per series
};

/// (y^T y) / len(y). Throws EmptyResidual.
double cost(const std::vector<double>& y);
double cost(const ResidualVector& r);

enum class FailureMode {
  Strict,   ///< solver failures propagate
  Penalty,  ///< failed samples contribute a fixed residual
};

struct ResidualOptions {
  FailureMode failure = FailureMode::Strict;
  double penalty = 1e3;  ///< degrees
};

/// Tracking error of a swept trajectory against targets on the same grid.
/// Throws GridMismatch.
ResidualVector residuals(const GaitTrajectory& traj, const TargetGait& targets, FitStage stage);

/// Sweeps the mechanism on the target grid and compares. Strict mode uses a
/// continuation sweep; penalty mode assembles each sample independently.
ResidualVector residuals(const Mechanism& mech, const TargetGait& targets, FitStage stage,
                         const ResidualOptions& opts = {});

struct ConstraintOptions {
  int samples = 360;
  double min_transmission_deg = 10.0;
  double symmetry_band = 1e-7;  ///< mm, half-width of equality bands
  double penalty = 1e6;         ///< value for entries that cannot be evaluated
};

/// Constraint vector f_c (feasible iff every entry <= 0) with entry names.
struct ConstraintValues {
  std::vector<std::string> names;
  std::vector<double> values;

  double max_violation() const noexcept;
};

ConstraintValues evaluate_constraints(const Mechanism& mech, const ConstraintOptions& opts = {});

/// Residuals and constraints from one pass over the grid (what the
/// optimizer calls).
struct Evaluation {
  std::vector<double> y;
  ConstraintValues constraints;
  int failed_samples = 0;
};

Evaluation evaluate_design(const Mechanism& mech, const TargetGait& targets, FitStage stage,
                           const ConstraintOptions& copts = {}, double penalty = 1e3);

enum class StartMode {
  Box,       ///< uniform in [lower, upper]
  Relative,  ///< nominal * (1 + U(-spread, spread)), clipped to the box
};

enum class StageOrder { HumerusFirst, RadiusFirst };

struct OptimizeOptions {
  int multistarts = 10;  ///< including the nominal start
  std::uint64_t seed = 0;
  StartMode start_mode = StartMode::Box;
  double spread = 0.2;
  bool include_nominal = true;
  int max_outer = 12;
  int max_inner = 60;
  int max_evaluations = 200000;  ///< per start
  double fd_step = 1e-6;         ///< relative
  double feasibility_tol = 1e-6;
  double converged_cost = 1e-12;
  int threads = 1;
  ConstraintOptions constraints;
  double penalty = 1e3;
  StageOrder order = StageOrder::HumerusFirst;
};

struct StartResult {
  int index = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double violation = 0.0;
  bool feasible = false;
  int iterations = 0;
  int evaluations = 0;
};

struct FitReport {
  std::string stage;
  double initial_cost = 0.0;  ///< deg^2, at the nominal design
  double final_cost = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int winner = -1;  ///< multistart index of the returned design
  double max_violation = 0.0;
  bool budget_exhausted = false;
  std::vector<double> incumbent_history;  ///< winner's feasible cost per outer iteration
  std::vector<StartResult> starts;
  DesignVector design;  ///< solved, all entries
  ConstraintValues constraints;
  std::vector<FitReport> stages;
  std::vector<std::string> warnings;
};

/// Fits the parameters tagged for `stage` (both tags for All) to the
/// matching target series. Throws NoFeasibleStart.
FitReport optimize_stage(const Mechanism& mech, const TargetGait& targets, FitStage stage,
                         const OptimizeOptions& opts = {});

/// Humerus stage against the shoulder target, then radius stage against the
/// elbow target with the humerus parameters frozen.
FitReport optimize_armwing(const Mechanism& mech, const TargetGait& targets, const OptimizeOptions& opts = {});

}  // namespace flapkin
