#include "flapkin/gait.hpp"

#include "flapkin/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <exception>
#include <optional>
#include <thread>

namespace flapkin {

std::vector<double> phase_grid(int n) {
  std::vector<double> phi(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) phi[k] = kTwoPi * k / n;
  return phi;
}

namespace {

bool recoverable(ErrorCode c) {
  return c == ErrorCode::NoConvergence || c == ErrorCode::SingularJacobian || c == ErrorCode::BranchSwitch;
}

Configuration continue_from(const Mechanism& mech, double phi, const Configuration& prev, const SolveOptions& opts) {
  try {
    return solve_configuration(mech, phi, prev, opts);
  } catch (const Error& e) {
    if (!recoverable(e.code())) throw;
  }
  return assemble(mech, phi, opts);
}

void independent(const Mechanism& mech, GaitTrajectory& traj, const SweepOptions& opts) {
  const int n = static_cast<int>(traj.phases.size());
  const int threads = std::clamp(opts.threads, 1, n);
  if (threads == 1) {
    for (int k = 0; k < n; ++k) traj.samples[k] = assemble(mech, traj.phases[k], opts.solve);
    return;
  }
  std::vector<std::optional<Error>> errors(n);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int k = t; k < n; k += threads) {
        try {
          traj.samples[k] = assemble(mech, traj.phases[k], opts.solve);
        } catch (const Error& e) {
          errors[k] = e;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) throw *e;
  }
}

}  // namespace

GaitTrajectory sweep_gait(const Mechanism& mech, int n, const SweepOptions& opts) {
  if (n < kMinSweepSamples) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("sweep needs at least {} samples, got {}", kMinSweepSamples, n));
  }
  GaitTrajectory traj;
  traj.phases = phase_grid(n);
  traj.samples.resize(n);

  if (opts.mode == SweepMode::Independent) {
    independent(mech, traj, opts);
  } else {
    traj.samples[0] = assemble(mech, traj.phases[0], opts.solve);
    for (int k = 1; k < n; ++k) {
      traj.samples[k] = continue_from(mech, traj.phases[k], traj.samples[k - 1], opts.solve);
    }
    if (opts.check_closure) {
      const Configuration wrap = continue_from(mech, kTwoPi, traj.samples[n - 1], opts.solve);
      double worst = 0.0;
      for (std::size_t j = 0; j < wrap.joint_angles.size(); ++j) {
        worst = std::max(worst, std::abs(wrap_pi(wrap.joint_angles[j] - traj.samples[0].joint_angles[j])));
      }
      if (worst > opts.closure_tolerance) {
        throw Error(ErrorCode::BranchSwitch,
                    fmt::format("sweep does not close over one cycle (joint angle gap {:.3g} rad)", worst), kTwoPi);
      }
    }
  }

  const int s = mech.angle_output_index(kShoulderOutput);
  const int e = mech.angle_output_index(kElbowOutput);
  const int pe = mech.point_output_index(kElbowPoint);
  const int pt = mech.point_output_index(kWingtipPoint);
  for (const Configuration& c : traj.samples) {
    if (s >= 0) traj.theta_s.push_back(c.angles[s]);
    if (e >= 0) traj.theta_e.push_back(c.angles[e]);
    if (pe >= 0) traj.elbow.push_back(c.points[pe]);
    if (pt >= 0) traj.wingtip.push_back(c.points[pt]);
  }
  return traj;
}

std::vector<double> angle_series(const Mechanism& mech, const GaitTrajectory& traj, std::string_view name) {
  const int idx = mech.angle_output_index(name);
  if (idx < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("no angle output named '{}'", name));
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& c : traj.samples) out.push_back(c.angles[idx]);
  return out;
}

std::vector<Vec2> point_series(const Mechanism& mech, const GaitTrajectory& traj, std::string_view name) {
  const int idx = mech.point_output_index(name);
  if (idx < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("no point output named '{}'", name));
  std::vector<Vec2> out;
  out.reserve(traj.size());
  for (const auto& c : traj.samples) out.push_back(c.points[idx]);
  return out;
}

}  // namespace flapkin
