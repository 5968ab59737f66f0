#include "flapkin/fitting.hpp"

#include "flapkin/errors.hpp"
#include "flapkin/optimizer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <thread>

namespace flapkin {

std::string_view to_string(FitStage s) noexcept {
  switch (s) {
    case FitStage::Humerus: return "humerus";
    case FitStage::Radius: return "radius";
    case FitStage::All: return "all";
  }
  return "all";
}

DesignVector design_vector(const Mechanism& mech) {
  DesignVector q;
  for (const ParameterSpec& p : mech.design_parameters()) {
    q.names.push_back(p.name);
    q.index.push_back(mech.parameter_index(p.name));
    q.values.push_back(mech.parameter(p.name));
    q.lower.push_back(p.lower);
    q.upper.push_back(p.upper);
    q.stages.push_back(p.stage);
  }
  return q;
}

Mechanism apply_design(const Mechanism& mech, const DesignVector& q) {
  std::vector<std::pair<int, double>> updates;
  for (std::size_t i = 0; i < q.size(); ++i) updates.emplace_back(q.index[i], q.values[i]);
  return mech.with_parameters(updates);
}

double cost(const std::vector<double>& y) {
  if (y.empty()) throw Error(ErrorCode::EmptyResidual, "residual vector is empty");
  double s = 0.0;
  for (double v : y) s += v * v;
  return s / static_cast<double>(y.size());
}

double cost(const ResidualVector& r) { return cost(r.y); }

double ConstraintValues::max_violation() const noexcept {
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, v);
  return worst;
}

namespace {

double angle_error_deg(double actual_rad, double target_deg) {
  return std::remainder(rad_to_deg(actual_rad) - target_deg, 360.0);
}

void check_grid(const std::vector<double>& phases, const TargetGait& targets) {
  if (phases.size() != targets.phases.size() || phases != targets.phases) {
    throw Error(ErrorCode::GridMismatch, fmt::format("trajectory has {} samples but targets have {}", phases.size(),
                                                     targets.phases.size()));
  }
}

bool uses_shoulder(FitStage s) { return s != FitStage::Radius; }
bool uses_elbow(FitStage s) { return s != FitStage::Humerus; }

int require_output(const Mechanism& mech, std::string_view name) {
  const int idx = mech.angle_output_index(name);
  if (idx < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("mechanism has no '{}' angle output", name));
  return idx;
}

bool on_crank(const Mechanism& mech, const BodyPoint& bp) {
  return !bp.is_pivot() && !mech.links()[bp.link].ground && mech.links()[bp.link].source != AngleSource::Free;
}

bool on_ground(const Mechanism& mech, const BodyPoint& bp) {
  return bp.is_pivot() || mech.links()[bp.link].ground;
}

Vec2 fixed_point(const Mechanism& mech, const BodyPoint& bp) {
  if (bp.is_pivot()) return mech.pivot_position(bp.pivot);
  const LinkInfo& l = mech.links()[bp.link];
  return Pose2{mech.pivot_position(l.mount_pivot), l.mount_angle}.to_world(mech.local_point(bp.link, bp.point));
}

// Ground-side position of the pin that carries a driven link.
Vec2 crank_pivot(const Mechanism& mech, int link, int& pin_point) {
  const JointInfo& j = mech.joints()[mech.links()[link].ground_joint];
  const bool a_is_link = !j.a.is_pivot() && j.a.link == link;
  pin_point = a_is_link ? j.a.point : j.b.point;
  return fixed_point(mech, a_is_link ? j.b : j.a);
}

struct Pass {
  std::vector<double> y;
  ConstraintValues constraints;
  int failed = 0;
};

// One sweep of independent assemblies collecting residuals and constraint
// values together.
Pass run_pass(const Mechanism& mech, const std::vector<double>& phases, const TargetGait* targets, FitStage stage,
              const ConstraintOptions& copts, double penalty) {
  Pass out;
  const auto& dyads = mech.dyads();
  const std::size_t nd = dyads.size();
  const int n = static_cast<int>(phases.size());
  int s_idx = -1;
  int e_idx = -1;
  if (targets) {
    if (uses_shoulder(stage)) s_idx = require_output(mech, kShoulderOutput);
    if (uses_elbow(stage)) e_idx = require_output(mech, kElbowOutput);
  }
  std::vector<double> ys, ye;
  if (s_idx >= 0) ys.assign(n, penalty);
  if (e_idx >= 0) ye.assign(n, penalty);

  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> margin(nd, kNone);
  std::vector<double> min_mu(nd, std::numeric_limits<double>::infinity());
  std::optional<Configuration> first;
  AssemblyDiagnostics diag;
  for (int k = 0; k < n; ++k) {
    std::optional<Configuration> cfg = try_assemble(mech, phases[k], &diag);
    for (std::size_t i = 0; i < nd; ++i) {
      if (!std::isnan(diag.margin[i])) margin[i] = std::max(margin[i], diag.margin[i]);
      if (!std::isnan(diag.transmission[i])) min_mu[i] = std::min(min_mu[i], diag.transmission[i]);
    }
    if (!cfg) {
      ++out.failed;
      continue;
    }
    if (k == 0) first = cfg;
    if (s_idx >= 0) ys[k] = angle_error_deg(cfg->angles[s_idx], targets->theta_s[k]);
    if (e_idx >= 0) ye[k] = angle_error_deg(cfg->angles[e_idx], targets->theta_e[k]);
  }
  out.y = std::move(ys);
  out.y.insert(out.y.end(), ye.begin(), ye.end());

  ConstraintValues& c = out.constraints;
  auto add = [&](std::string name, double v) {
    c.names.push_back(std::move(name));
    c.values.push_back(std::isfinite(v) ? v : copts.penalty);
  };
  for (std::size_t i = 0; i < nd; ++i) {
    const DyadStep& d = dyads[i];
    const std::string& id = mech.joints()[d.apex_joint].id;
    add("assembly:" + id, margin[i] == kNone ? copts.penalty : margin[i]);
    add("transmission:" + id, copts.min_transmission_deg - rad_to_deg(min_mu[i]));

    // Full rotation of a crank-fed dyad: the crank pin to ground-point
    // distance sweeps [|g - a|, g + a] and must stay within [|b - c|, b + c].
    const bool crank_first = on_crank(mech, d.known1) && on_ground(mech, d.known2);
    const bool crank_second = on_crank(mech, d.known2) && on_ground(mech, d.known1);
    if (!crank_first && !crank_second) continue;
    const BodyPoint& cp = crank_first ? d.known1 : d.known2;
    const BodyPoint& gp = crank_first ? d.known2 : d.known1;
    int pin_point = -1;
    const Vec2 pivot = crank_pivot(mech, cp.link, pin_point);
    const double a = (mech.local_point(cp.link, cp.point) - mech.local_point(cp.link, pin_point)).norm();
    const double g = (fixed_point(mech, gp) - pivot).norm();
    const double arm1 =
        (mech.local_point(d.link1, d.link1_apex_point) - mech.local_point(d.link1, d.link1_attach_point)).norm();
    const double arm2 =
        (mech.local_point(d.link2, d.link2_apex_point) - mech.local_point(d.link2, d.link2_attach_point)).norm();
    const double b = crank_first ? arm1 : arm2;
    const double cc = crank_first ? arm2 : arm1;
    add("rotation_outer:" + id, (g + a) - (b + cc));
    add("rotation_inner:" + id, std::abs(b - cc) - std::abs(g - a));
  }

  for (const SymmetryInfo& s : mech.symmetry()) {
    double x = std::numeric_limits<double>::quiet_NaN();
    if (s.kind == SymmetrySpec::Kind::Centered) {
      x = mech.pivot_position(s.point.pivot).x();
    } else {
      if (!first || phases.empty() || phases[0] != 0.0) first = try_assemble(mech, 0.0);
      if (first) x = world_point(mech, first->poses, s.point).x();
    }
    const std::string tag = s.kind == SymmetrySpec::Kind::Centered ? "centered:" : "aligned_y:";
    add(tag + s.target + "+", x - copts.symmetry_band);
    add(tag + s.target + "-", -x - copts.symmetry_band);
  }
  return out;
}

}  // namespace

ResidualVector residuals(const GaitTrajectory& traj, const TargetGait& targets, FitStage stage) {
  check_grid(traj.phases, targets);
  ResidualVector r;
  r.n = static_cast<int>(traj.size());
  if (uses_shoulder(stage)) {
    if (traj.theta_s.size() != traj.size()) throw Error(ErrorCode::InvalidArgument, "trajectory has no shoulder series");
    for (std::size_t k = 0; k < traj.size(); ++k) r.y.push_back(angle_error_deg(traj.theta_s[k], targets.theta_s[k]));
  }
  if (uses_elbow(stage)) {
    if (traj.theta_e.size() != traj.size()) throw Error(ErrorCode::InvalidArgument, "trajectory has no elbow series");
    for (std::size_t k = 0; k < traj.size(); ++k) r.y.push_back(angle_error_deg(traj.theta_e[k], targets.theta_e[k]));
  }
  return r;
}

ResidualVector residuals(const Mechanism& mech, const TargetGait& targets, FitStage stage,
                         const ResidualOptions& opts) {
  const int n = static_cast<int>(targets.size());
  if (opts.failure == FailureMode::Strict) return residuals(sweep_gait(mech, n), targets, stage);
  check_grid(phase_grid(n), targets);
  Pass p = run_pass(mech, targets.phases, &targets, stage, ConstraintOptions{}, opts.penalty);
  return {std::move(p.y), n};
}

ConstraintValues evaluate_constraints(const Mechanism& mech, const ConstraintOptions& opts) {
  return run_pass(mech, phase_grid(opts.samples), nullptr, FitStage::All, opts, 0.0).constraints;
}

Evaluation evaluate_design(const Mechanism& mech, const TargetGait& targets, FitStage stage,
                           const ConstraintOptions& copts, double penalty) {
  Pass p = run_pass(mech, targets.phases, &targets, stage, copts, penalty);
  return {std::move(p.y), std::move(p.constraints), p.failed};
}

namespace {

bool in_stage(Stage tag, FitStage stage) {
  switch (stage) {
    case FitStage::Humerus: return tag == Stage::Humerus;
    case FitStage::Radius: return tag == Stage::Radius;
    case FitStage::All: return tag != Stage::Fixed;
  }
  return false;
}

struct StageProblem {
  const Mechanism& mech;
  const TargetGait& targets;
  FitStage stage;
  const OptimizeOptions& opts;
  std::vector<int> free;  // positions within the design vector
  DesignVector q;
  std::size_t residual_size = 0;
  std::size_t constraint_size = 0;

  Mechanism with(const Eigen::VectorXd& x) const {
    std::vector<std::pair<int, double>> updates;
    for (std::size_t i = 0; i < free.size(); ++i) updates.emplace_back(q.index[free[i]], x[static_cast<Eigen::Index>(i)]);
    return mech.with_parameters(updates);
  }

  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& c) const {
    std::optional<Evaluation> ev;
    try {
      ev = evaluate_design(with(x), targets, stage, opts.constraints, opts.penalty);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonPositiveLength) throw;
    }
    y.resize(static_cast<Eigen::Index>(residual_size));
    c.resize(static_cast<Eigen::Index>(constraint_size));
    if (!ev) {
      y.setConstant(opts.penalty);
      c.setConstant(opts.constraints.penalty);
      return;
    }
    y = Eigen::Map<const Eigen::VectorXd>(ev->y.data(), static_cast<Eigen::Index>(ev->y.size()));
    c = Eigen::Map<const Eigen::VectorXd>(ev->constraints.values.data(),
                                          static_cast<Eigen::Index>(ev->constraints.values.size()));
  }
};

Eigen::VectorXd start_point(const StageProblem& sp, const Eigen::VectorXd& nominal, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, int index) {
  if (index == 0 && sp.opts.include_nominal) return nominal;
  std::seed_seq seq{static_cast<std::uint32_t>(sp.opts.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(sp.opts.seed >> 32), static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(nominal.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = unit(rng);
    if (sp.opts.start_mode == StartMode::Box) {
      x[i] = lo[i] + u * (hi[i] - lo[i]);
    } else {
      x[i] = std::clamp(nominal[i] * (1.0 + sp.opts.spread * (2.0 * u - 1.0)), lo[i], hi[i]);
    }
  }
  return x;
}

}  // namespace

FitReport optimize_stage(const Mechanism& mech, const TargetGait& targets, FitStage stage,
                         const OptimizeOptions& opts) {
  StageProblem sp{mech, targets, stage, opts, {}, design_vector(mech)};
  for (std::size_t i = 0; i < sp.q.size(); ++i) {
    if (in_stage(sp.q.stages[i], stage)) sp.free.push_back(static_cast<int>(i));
  }
  if (sp.free.empty()) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("no design parameters tagged for the {} stage", to_string(stage)));
  }
  const auto nf = static_cast<Eigen::Index>(sp.free.size());
  Eigen::VectorXd lo(nf), hi(nf), nominal(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    const int k = sp.free[i];
    lo[i] = sp.q.lower[k];
    hi[i] = sp.q.upper[k];
    nominal[i] = std::clamp(sp.q.values[k], lo[i], hi[i]);
  }

  const Evaluation base = evaluate_design(sp.with(nominal), targets, stage, opts.constraints, opts.penalty);
  sp.residual_size = base.y.size();
  sp.constraint_size = base.constraints.values.size();

  FitReport report;
  report.stage = std::string(to_string(stage));
  report.initial_cost = cost(base.y);

  BoxProblem problem{lo, hi, [&sp](const Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& c) {
                       sp.evaluate(x, y, c);
                     }};
  AugLagOptions al;
  al.max_outer = opts.max_outer;
  al.max_inner = opts.max_inner;
  al.max_evaluations = opts.max_evaluations;
  al.fd_step = opts.fd_step;
  al.feasibility_tol = opts.feasibility_tol;
  al.converged_cost = opts.converged_cost;

  // Nothing to do when the nominal design already tracks the target.
  const bool done = opts.include_nominal && report.initial_cost <= opts.converged_cost &&
                    base.constraints.max_violation() <= opts.feasibility_tol;
  const int starts = done ? 1 : std::max(opts.multistarts, 1);

  std::vector<AugLagResult> results(starts);
  auto run = [&](int i) { results[i] = minimize_augmented_lagrangian(problem, start_point(sp, nominal, lo, hi, i), al); };
  const int threads = std::clamp(opts.threads, 1, starts);
  if (threads == 1) {
    for (int i = 0; i < starts; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int i = t; i < starts; i += threads) run(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (int i = 0; i < starts; ++i) {
    const AugLagResult& r = results[i];
    StartResult s;
    s.index = i;
    s.initial_cost = r.history.empty() ? 0.0 : r.history.front();
    s.final_cost = r.cost;
    s.violation = r.violation;
    s.feasible = r.feasible;
    s.iterations = r.iterations;
    s.evaluations = r.evaluations;
    report.starts.push_back(s);
    report.evaluations += r.evaluations;
    report.budget_exhausted = report.budget_exhausted || r.budget_exhausted;
    if (r.feasible && (report.winner < 0 || r.cost < results[report.winner].cost)) report.winner = i;
  }
  if (report.winner < 0) {
    throw Error(ErrorCode::NoFeasibleStart,
                fmt::format("none of {} starts reached a feasible design ({} stage)", starts, to_string(stage)));
  }
  const AugLagResult& best = results[report.winner];
  report.final_cost = best.cost;
  report.iterations = best.iterations;
  report.max_violation = best.violation;
  report.incumbent_history = best.history;
  report.design = sp.q;
  for (Eigen::Index i = 0; i < nf; ++i) report.design.values[sp.free[i]] = best.x[i];
  report.constraints = evaluate_design(sp.with(best.x), targets, stage, opts.constraints, opts.penalty).constraints;
  return report;
}

FitReport optimize_armwing(const Mechanism& mech, const TargetGait& targets, const OptimizeOptions& opts) {
  FitReport report;
  report.stage = "staged";
  const Evaluation start = evaluate_design(mech, targets, FitStage::All, opts.constraints, opts.penalty);
  report.initial_cost = cost(start.y);

  const bool humerus_first = opts.order == StageOrder::HumerusFirst;
  if (!humerus_first) {
    report.warnings.push_back(
        "radius stage fitted before the humerus stage; the elbow fit is computed against a humerus that moves "
        "afterwards");
  }
  const FitStage order[2] = {humerus_first ? FitStage::Humerus : FitStage::Radius,
                             humerus_first ? FitStage::Radius : FitStage::Humerus};
  Mechanism current = mech;
  for (FitStage s : order) {
    try {
      FitReport sub = optimize_stage(current, targets, s, opts);
      current = apply_design(current, sub.design);
      report.iterations += sub.iterations;
      report.evaluations += sub.evaluations;
      report.budget_exhausted = report.budget_exhausted || sub.budget_exhausted;
      report.stages.push_back(std::move(sub));
    } catch (const Error& e) {
      throw e.with_context(fmt::format("{} stage", to_string(s)));
    }
  }
  const FitReport& last = report.stages.back();
  const Evaluation fin = evaluate_design(current, targets, FitStage::All, opts.constraints, opts.penalty);
  report.final_cost = cost(fin.y);
  report.winner = last.winner;
  report.design = last.design;
  report.constraints = fin.constraints;
  report.max_violation = fin.constraints.max_violation();
  report.incumbent_history = last.incumbent_history;
  return report;
}

}  // namespace flapkin
