#include "flapkin/solver.hpp"

#include "flapkin/errors.hpp"
#include "flapkin/gear.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace flapkin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Pose2 ground_pose(const Mechanism& mech, int link) {
  const LinkInfo& l = mech.links()[link];
  return {mech.pivot_position(l.mount_pivot), l.mount_angle};
}

// Poses of ground links and of links whose angle is imposed. Free links are
// left at the identity.
std::vector<Pose2> fixed_poses(const Mechanism& mech, double phi) {
  const auto& links = mech.links();
  std::vector<Pose2> poses(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].ground) poses[i] = ground_pose(mech, static_cast<int>(i));
  }
  const std::vector<double> theta = imposed_angles(mech, phi);
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].ground || links[i].source == AngleSource::Free) continue;
    const JointInfo& pin = mech.joints()[links[i].ground_joint];
    const bool link_is_a = !pin.a.is_pivot() && pin.a.link == static_cast<int>(i);
    const BodyPoint& mine = link_is_a ? pin.a : pin.b;
    const BodyPoint& other = link_is_a ? pin.b : pin.a;
    const Vec2 anchor = world_point(mech, poses, other);
    poses[i].angle = theta[i];
    poses[i].origin = anchor - rotate(mech.local_point(static_cast<int>(i), mine.point), theta[i]);
  }
  return poses;
}

double body_angle(const std::vector<Pose2>& poses, const BodyPoint& bp) {
  return bp.is_pivot() ? 0.0 : poses[bp.link].angle;
}

class Newton {
 public:
  Newton(const Mechanism& mech, std::vector<Pose2> poses) : mech_(mech), poses_(std::move(poses)) {
    n_ = mech.unknown_count();
    m_ = 2 * static_cast<int>(mech.residual_joints().size());
  }

  Configuration run(double phi, const SolveOptions& opts) {
    Eigen::VectorXd x = pack();
    Eigen::VectorXd r = residual(x);
    int it = 0;
    for (;; ++it) {
      const double norm = m_ ? r.cwiseAbs().maxCoeff() : 0.0;
      if (!std::isfinite(norm)) throw Error(ErrorCode::NoConvergence, "residual is not finite", phi);
      if (norm <= opts.tolerance) {
        if (it > 0) polish(x, r);
        break;
      }
      if (it >= opts.max_iterations) {
        throw Error(ErrorCode::NoConvergence,
                    fmt::format("no convergence after {} iterations (residual {:.3g} mm)", it, norm), phi);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian(x));
      lu.setThreshold(1e-11);
      if (lu.rank() < n_) throw Error(ErrorCode::SingularJacobian, "loop-closure Jacobian lost rank", phi);
      const Eigen::VectorXd dx = lu.solve(-r);
      const double base = r.squaredNorm();
      double alpha = 1.0;
      Eigen::VectorXd trial = x + dx;
      Eigen::VectorXd rt = residual(trial);
      for (int h = 0; h < 12 && !(rt.squaredNorm() < base); ++h) {
        alpha *= 0.5;
        trial = x + alpha * dx;
        rt = residual(trial);
      }
      x = trial;
      r = rt;
    }
    unpack(x);
    Configuration cfg;
    cfg.phase = phi;
    cfg.poses = poses_;
    cfg.residual_norm = m_ ? r.cwiseAbs().maxCoeff() : 0.0;
    cfg.iterations = it;
    return cfg;
  }

 private:
  // One more full step once inside the tolerance after iterating: a
  // converged Newton step squares the error, taking angles from ~1e-9 down
  // to rounding. Analytic placements are already there and skip it.
  void polish(Eigen::VectorXd& x, Eigen::VectorXd& r) {
    if (m_ == 0 || r.cwiseAbs().maxCoeff() == 0.0) return;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian(x));
    lu.setThreshold(1e-11);
    if (lu.rank() < n_) return;
    const Eigen::VectorXd trial = x - lu.solve(r);
    const Eigen::VectorXd rt = residual(trial);
    if (rt.squaredNorm() < r.squaredNorm()) {
      x = trial;
      r = rt;
    }
  }

  Eigen::VectorXd pack() const {
    Eigen::VectorXd x(n_);
    const auto& links = mech_.links();
    for (std::size_t i = 0; i < links.size(); ++i) {
      const int o = links[i].unknown_offset;
      if (o < 0) continue;
      x[o] = poses_[i].origin.x();
      x[o + 1] = poses_[i].origin.y();
      x[o + 2] = poses_[i].angle;
    }
    return x;
  }

  void unpack(const Eigen::VectorXd& x) {
    const auto& links = mech_.links();
    for (std::size_t i = 0; i < links.size(); ++i) {
      const int o = links[i].unknown_offset;
      if (o < 0) continue;
      poses_[i].origin = Vec2(x[o], x[o + 1]);
      poses_[i].angle = x[o + 2];
    }
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) {
    unpack(x);
    Eigen::VectorXd r(m_);
    const auto& rj = mech_.residual_joints();
    for (std::size_t k = 0; k < rj.size(); ++k) {
      const JointInfo& j = mech_.joints()[rj[k]];
      r.segment<2>(2 * k) = world_point(mech_, poses_, j.a) - world_point(mech_, poses_, j.b);
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) {
    unpack(x);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m_, n_);
    const auto& rj = mech_.residual_joints();
    auto add = [&](int row, const BodyPoint& bp, double sign) {
      if (bp.is_pivot()) return;
      const int o = mech_.links()[bp.link].unknown_offset;
      if (o < 0) return;
      const Vec2 w = rotate(mech_.local_point(bp.link, bp.point), poses_[bp.link].angle);
      J(row, o) += sign;
      J(row + 1, o + 1) += sign;
      J(row, o + 2) += -sign * w.y();
      J(row + 1, o + 2) += sign * w.x();
    };
    for (std::size_t k = 0; k < rj.size(); ++k) {
      const JointInfo& j = mech_.joints()[rj[k]];
      add(static_cast<int>(2 * k), j.a, 1.0);
      add(static_cast<int>(2 * k), j.b, -1.0);
    }
    return J;
  }

  const Mechanism& mech_;
  std::vector<Pose2> poses_;
  int n_ = 0;
  int m_ = 0;
};

void check_dyads(const Mechanism& mech, const std::vector<Pose2>& poses, double phi) {
  for (const DyadStep& d : mech.dyads()) {
    const Vec2 a1 = world_point(mech, poses, d.known1);
    const Vec2 a2 = world_point(mech, poses, d.known2);
    const Vec2 apex = world_point(mech, poses, mech.joints()[d.apex_joint].a);
    const Vec2 u = a1 - apex;
    const Vec2 v = a2 - apex;
    const double mu = std::atan2(std::abs(cross(u, v)), u.dot(v));
    if (std::min(mu, kPi - mu) < kSingularAngle) {
      throw Error(ErrorCode::SingularConfiguration,
                  "links meeting at joint '" + mech.joints()[d.apex_joint].id + "' are collinear", phi);
    }
    if (side_of(a1, a2, apex) != d.side) {
      throw Error(ErrorCode::BranchSwitch,
                  "joint '" + mech.joints()[d.apex_joint].id + "' moved to the other assembly branch", phi);
    }
  }
}

Configuration finish(const Mechanism& mech, Configuration cfg) {
  const auto& poses = cfg.poses;
  cfg.joint_angles.clear();
  for (const JointInfo& j : mech.joints()) {
    cfg.joint_angles.push_back(wrap_pi(body_angle(poses, j.b) - body_angle(poses, j.a)));
  }
  cfg.angles.clear();
  for (const AngleOutputInfo& ao : mech.angle_outputs()) {
    const double t = poses[ao.link].angle;
    double raw;
    if (ao.reference >= 0) {
      raw = wrap_pi(t - poses[ao.reference].angle);
      if (ao.mirrored) raw = -raw;
    } else {
      raw = wrap_pi(ao.mirrored ? kPi - t : t);
    }
    cfg.angles.push_back(ao.offset + ao.sign * raw);
  }
  cfg.points.clear();
  for (const PointOutputInfo& po : mech.point_outputs()) cfg.points.push_back(world_point(mech, poses, po.point));
  return cfg;
}

Configuration polish(const Mechanism& mech, double phi, std::vector<Pose2> poses, const SolveOptions& opts) {
  Configuration cfg = Newton(mech, std::move(poses)).run(phi, opts);
  if (opts.check_branch) check_dyads(mech, cfg.poses, phi);
  return finish(mech, std::move(cfg));
}

}  // namespace

Vec2 world_point(const Mechanism& mech, const std::vector<Pose2>& poses, const BodyPoint& bp) {
  if (bp.is_pivot()) return mech.pivot_position(bp.pivot);
  return poses[bp.link].to_world(mech.local_point(bp.link, bp.point));
}

std::vector<double> imposed_angles(const Mechanism& mech, double phi) {
  std::vector<double> theta(mech.links().size(), kNaN);
  const DriverInfo& d = mech.driver();
  theta[d.link] = d.direction * phi + d.offset;
  for (const GearInfo& g : mech.gears()) theta[g.link_out] = gear_couple(theta[g.link_in], g.ratio, g.offset);
  return theta;
}

namespace {

// Places every dyad analytically. Returns false at the first dyad that
// cannot be closed (diagnostics, if given, record margins up to it).
bool place_dyads(const Mechanism& mech, std::vector<Pose2>& poses, double phi, AssemblyDiagnostics* diag,
                 bool raise) {
  const auto& dyads = mech.dyads();
  if (diag) {
    diag->margin.assign(dyads.size(), kNaN);
    diag->transmission.assign(dyads.size(), kNaN);
    diag->failed_dyad = -1;
  }
  for (std::size_t i = 0; i < dyads.size(); ++i) {
    const DyadStep& d = dyads[i];
    const Vec2 p1 = world_point(mech, poses, d.known1);
    const Vec2 p2 = world_point(mech, poses, d.known2);
    const Vec2 arm1 = mech.local_point(d.link1, d.link1_apex_point) - mech.local_point(d.link1, d.link1_attach_point);
    const Vec2 arm2 = mech.local_point(d.link2, d.link2_apex_point) - mech.local_point(d.link2, d.link2_attach_point);
    const DyadSolution s = solve_dyad(p1, arm1.norm(), p2, arm2.norm(), d.side);
    if (diag) {
      diag->margin[i] = s.margin;
      diag->transmission[i] = s.status == DyadStatus::NotAssemblable ? kNaN : s.transmission;
    }
    if (s.status != DyadStatus::Ok) {
      if (diag) diag->failed_dyad = static_cast<int>(i);
      if (!raise) return false;
      const std::string& apex_id = mech.joints()[d.apex_joint].id;
      if (s.status == DyadStatus::NotAssemblable) {
        throw Error(ErrorCode::NotAssemblable, "links meeting at joint '" + apex_id + "' cannot reach each other",
                    phi);
      }
      throw Error(ErrorCode::SingularConfiguration, "links meeting at joint '" + apex_id + "' are collinear", phi);
    }
    auto place = [&](int link, const Vec2& attach_world, const Vec2& arm, int attach_point) {
      const Vec2 w = s.apex - attach_world;
      const double angle = std::atan2(w.y(), w.x()) - std::atan2(arm.y(), arm.x());
      poses[link].angle = angle;
      poses[link].origin = attach_world - rotate(mech.local_point(link, attach_point), angle);
    };
    place(d.link1, p1, arm1, d.link1_attach_point);
    place(d.link2, p2, arm2, d.link2_attach_point);
  }
  // Links outside the analytic plan start from their home pose.
  const auto& home = mech.home_poses();
  std::vector<bool> placed(mech.links().size(), false);
  for (const DyadStep& d : dyads) placed[d.link1] = placed[d.link2] = true;
  for (std::size_t i = 0; i < mech.links().size(); ++i) {
    if (mech.links()[i].unknown_offset >= 0 && !placed[i] && home[i]) poses[i] = *home[i];
  }
  return true;
}

}  // namespace

Configuration assemble(const Mechanism& mech, double phi, const SolveOptions& opts) {
  std::vector<Pose2> poses = fixed_poses(mech, phi);
  place_dyads(mech, poses, phi, nullptr, true);
  return polish(mech, phi, std::move(poses), opts);
}

std::optional<Configuration> try_assemble(const Mechanism& mech, double phi, AssemblyDiagnostics* diag,
                                          const SolveOptions& opts) {
  std::vector<Pose2> poses = fixed_poses(mech, phi);
  if (!place_dyads(mech, poses, phi, diag, false)) return std::nullopt;
  try {
    return polish(mech, phi, std::move(poses), opts);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Configuration solve_configuration(const Mechanism& mech, double phi, const SolveOptions& opts) {
  return assemble(mech, phi, opts);
}

Configuration solve_configuration(const Mechanism& mech, double phi, const Configuration& guess,
                                  const SolveOptions& opts) {
  std::vector<Pose2> poses = fixed_poses(mech, phi);
  if (guess.poses.size() != poses.size()) {
    throw Error(ErrorCode::InvalidArgument, "guess does not belong to this mechanism");
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (mech.links()[i].unknown_offset >= 0) poses[i] = guess.poses[i];
  }
  return polish(mech, phi, std::move(poses), opts);
}

double loop_closure_norm(const Mechanism& mech, const Configuration& cfg) {
  const auto& links = mech.links();
  const auto& joints = mech.joints();
  auto ground_side = [&](const JointInfo& j) -> const BodyPoint& {
    return (j.a.is_pivot() || links[j.a.link].ground) ? j.a : j.b;
  };
  auto fixed_position = [&](const BodyPoint& bp) -> Vec2 {
    if (bp.is_pivot()) return mech.pivot_position(bp.pivot);
    return ground_pose(mech, bp.link).to_world(mech.local_point(bp.link, bp.point));
  };
  auto point_on = [&](const JointInfo& j, int link) {
    return (!j.a.is_pivot() && j.a.link == link) ? j.a.point : j.b.point;
  };
  double worst = 0.0;
  for (const Loop& loop : mech.loops()) {
    Vec2 sum = Vec2::Zero();
    const std::size_t k = loop.joints.size();
    for (std::size_t i = 0; i < k; ++i) {
      const JointInfo& from = joints[loop.joints[i]];
      const JointInfo& to = joints[loop.joints[(i + 1) % k]];
      const int body = loop.bodies[i];
      if (body < 0) {
        sum += fixed_position(ground_side(to)) - fixed_position(ground_side(from));
      } else {
        const Vec2 d = mech.local_point(body, point_on(to, body)) - mech.local_point(body, point_on(from, body));
        sum += rotate(d, cfg.poses[body].angle);
      }
    }
    worst = std::max(worst, sum.cwiseAbs().maxCoeff());
  }
  return worst;
}

double min_transmission_angle(const Mechanism& mech, const Configuration& cfg) {
  double best = kPi / 2.0;
  for (const DyadStep& d : mech.dyads()) {
    const Vec2 apex = world_point(mech, cfg.poses, mech.joints()[d.apex_joint].a);
    const Vec2 u = world_point(mech, cfg.poses, d.known1) - apex;
    const Vec2 v = world_point(mech, cfg.poses, d.known2) - apex;
    const double mu = std::atan2(std::abs(cross(u, v)), u.dot(v));
    best = std::min(best, std::min(mu, kPi - mu));
  }
  return best;
}

}  // namespace flapkin
