#include "flapkin/mechanism.hpp"

#include "flapkin/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

namespace flapkin {

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Humerus: return "humerus";
    case Stage::Radius: return "radius";
    case Stage::Fixed: return "fixed";
  }
  return "fixed";
}

std::optional<Stage> parse_stage(std::string_view s) noexcept {
  if (s == "humerus") return Stage::Humerus;
  if (s == "radius") return Stage::Radius;
  if (s == "fixed") return Stage::Fixed;
  return std::nullopt;
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

template <typename T>
int find_by_id(const std::vector<T>& items, std::string_view id) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::string describe(const PointRef& ref) { return fmt::format("{}.{}", ref.body, ref.point); }

}  // namespace

Mechanism validate_mechanism(const LinkageSpec& spec) { return Mechanism::validate(spec); }

Mechanism Mechanism::validate(const LinkageSpec& spec) {
  Mechanism m;
  m.spec_ = spec;
  m.compile();
  return m;
}

void Mechanism::compile() {
  const LinkageSpec& s = spec_;
  if (s.format_version != 1) {
    fail(ErrorCode::VersionError, fmt::format("unsupported format_version {}", s.format_version));
  }

  // Pivots.
  std::set<std::string, std::less<>> seen;
  for (const auto& p : s.pivots) {
    if (p.id.empty() || !seen.insert(p.id).second) {
      fail(ErrorCode::SchemaError, fmt::format("pivots: duplicate or empty id '{}'", p.id));
    }
  }

  // Links and the parameter map.
  params_.clear();
  param_index_.clear();
  links_.clear();
  auto add_param = [this](std::string name, double value) {
    const int idx = static_cast<int>(params_.size());
    param_index_.emplace(name, idx);
    params_.push_back({std::move(name), value});
    return idx;
  };
  seen.clear();
  for (std::size_t li = 0; li < s.links.size(); ++li) {
    const LinkSpec& ls = s.links[li];
    if (ls.id.empty() || ls.id == kGround || !seen.insert(ls.id).second) {
      fail(ErrorCode::SchemaError, fmt::format("links[{}]: duplicate, empty or reserved id '{}'", li, ls.id));
    }
    if (!(ls.length > 0.0)) {
      fail(ErrorCode::NonPositiveLength, fmt::format("links[{}].length: link '{}' has length {}", li, ls.id, ls.length));
    }
    LinkInfo info;
    info.id = ls.id;
    info.length_param = add_param(ls.id + ".length", ls.length);
    info.points.push_back({"base", -1, -1});
    info.points.push_back({"tip", -1, -1});
    std::set<std::string, std::less<>> names{"base", "tip"};
    for (const auto& np : ls.points) {
      if (np.name.empty() || !names.insert(np.name).second) {
        fail(ErrorCode::SchemaError, fmt::format("links[{}].points: duplicate or reserved name '{}'", li, np.name));
      }
      PointSlot slot{np.name, -1, -1};
      slot.u_param = add_param(fmt::format("{}.{}.u", ls.id, np.name), np.u);
      slot.v_param = add_param(fmt::format("{}.{}.v", ls.id, np.name), np.v);
      info.points.push_back(std::move(slot));
    }
    if (ls.ground) {
      info.ground = true;
      info.mount_pivot = find_by_id(s.pivots, ls.ground->pivot);
      if (info.mount_pivot < 0) {
        fail(ErrorCode::SchemaError, fmt::format("links[{}].ground.pivot: unknown pivot '{}'", li, ls.ground->pivot));
      }
      info.mount_angle = deg_to_rad(ls.ground->angle_deg);
    }
    links_.push_back(std::move(info));
  }

  auto resolve = [&](const PointRef& ref, const std::string& where) {
    BodyPoint bp;
    if (ref.body == kGround) {
      bp.pivot = find_by_id(s.pivots, ref.point);
      if (bp.pivot < 0) fail(ErrorCode::SchemaError, fmt::format("{}: unknown ground pivot '{}'", where, ref.point));
      return bp;
    }
    bp.link = link_index(ref.body);
    if (bp.link < 0) fail(ErrorCode::SchemaError, fmt::format("{}: unknown link '{}'", where, ref.body));
    const auto& pts = links_[bp.link].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].name == ref.point) bp.point = static_cast<int>(i);
    }
    if (bp.point < 0) fail(ErrorCode::SchemaError, fmt::format("{}: unknown point '{}'", where, describe(ref)));
    return bp;
  };
  auto is_ground = [this](const BodyPoint& bp) { return bp.is_pivot() || links_[bp.link].ground; };

  // Joints.
  joints_.clear();
  seen.clear();
  for (std::size_t ji = 0; ji < s.joints.size(); ++ji) {
    const JointSpec& js = s.joints[ji];
    if (js.id.empty() || !seen.insert(js.id).second) {
      fail(ErrorCode::SchemaError, fmt::format("joints[{}]: duplicate or empty id '{}'", ji, js.id));
    }
    JointInfo info{js.id, resolve(js.a, fmt::format("joints[{}].a", ji)), resolve(js.b, fmt::format("joints[{}].b", ji))};
    if (is_ground(info.a) && is_ground(info.b)) {
      fail(ErrorCode::InvalidSpec, fmt::format("joints[{}]: joint '{}' connects ground to ground", ji, js.id));
    }
    if (!info.a.is_pivot() && !info.b.is_pivot() && info.a.link == info.b.link) {
      fail(ErrorCode::InvalidSpec, fmt::format("joints[{}]: joint '{}' connects a link to itself", ji, js.id));
    }
    joints_.push_back(std::move(info));
  }

  // Returns the moving link pinned to ground by joint j, or -1.
  auto pinned_link = [&](int j) {
    const JointInfo& ji = joints_[j];
    if (is_ground(ji.a) && !is_ground(ji.b)) return ji.b.link;
    if (is_ground(ji.b) && !is_ground(ji.a)) return ji.a.link;
    return -1;
  };

  // Driver.
  if (!s.driver) fail(ErrorCode::MissingDriver, "mechanism has no crank driver");
  driver_ = {};
  driver_.joint = joint_index(s.driver->joint);
  if (driver_.joint < 0) fail(ErrorCode::MissingDriver, fmt::format("driver joint '{}' does not exist", s.driver->joint));
  driver_.link = pinned_link(driver_.joint);
  if (driver_.link < 0) {
    fail(ErrorCode::InvalidSpec, fmt::format("driver joint '{}' must pin a moving link to ground", s.driver->joint));
  }
  if (s.driver->direction == 0.0) fail(ErrorCode::InvalidSpec, "driver.direction must be nonzero");
  driver_.direction = s.driver->direction;
  driver_.offset = deg_to_rad(s.driver->offset_deg);
  links_[driver_.link].source = AngleSource::Driver;
  links_[driver_.link].ground_joint = driver_.joint;

  // Gears, in chain order starting from the driver.
  gears_.clear();
  for (std::size_t gi = 0; gi < s.gears.size(); ++gi) {
    const GearSpec& gs = s.gears[gi];
    if (gs.ratio == 0.0) throw Error(ErrorCode::ZeroRatio, fmt::format("gears[{}]: ratio must be nonzero", gi));
    GearInfo g{gs.id, joint_index(gs.joint_in), joint_index(gs.joint_out), -1, -1, gs.ratio, deg_to_rad(gs.offset_deg)};
    if (g.joint_in < 0 || g.joint_out < 0) {
      fail(ErrorCode::SchemaError, fmt::format("gears[{}]: unknown joint", gi));
    }
    g.link_in = pinned_link(g.joint_in);
    g.link_out = pinned_link(g.joint_out);
    if (g.link_in < 0 || g.link_out < 0) {
      fail(ErrorCode::InvalidSpec, fmt::format("gears[{}]: gear joints must pin moving links to ground", gi));
    }
    if (links_[g.link_in].source == AngleSource::Free) {
      fail(ErrorCode::InvalidSpec,
           fmt::format("gears[{}]: input '{}' is neither the driver nor an earlier gear output", gi, gs.joint_in));
    }
    if (links_[g.link_out].source != AngleSource::Free) {
      fail(ErrorCode::InvalidSpec, fmt::format("gears[{}]: output '{}' is already driven", gi, gs.joint_out));
    }
    links_[g.link_out].source = AngleSource::Gear;
    links_[g.link_out].ground_joint = g.joint_out;
    gears_.push_back(std::move(g));
  }

  // Unknown layout and residual joints.
  unknowns_ = 0;
  for (auto& l : links_) {
    if (!l.ground && l.source == AngleSource::Free) {
      l.unknown_offset = unknowns_;
      unknowns_ += 3;
    }
  }
  residual_joints_.clear();
  for (int j = 0; j < static_cast<int>(joints_.size()); ++j) {
    const int pl = pinned_link(j);
    if (pl >= 0 && links_[pl].source != AngleSource::Free && links_[pl].ground_joint == j) continue;
    residual_joints_.push_back(j);
  }

  // Loops: fundamental cycles of the body graph (node 0 = ground).
  const int nodes = static_cast<int>(links_.size()) + 1;
  auto node_of = [&](const BodyPoint& bp) { return is_ground(bp) ? 0 : bp.link + 1; };
  std::vector<std::vector<std::pair<int, int>>> adj(nodes);
  for (int j = 0; j < static_cast<int>(joints_.size()); ++j) {
    const int u = node_of(joints_[j].a);
    const int v = node_of(joints_[j].b);
    adj[u].push_back({j, v});
    adj[v].push_back({j, u});
  }
  std::vector<int> parent(nodes, -1), parent_joint(nodes, -1), depth(nodes, -1);
  std::vector<bool> tree_edge(joints_.size(), false);
  std::deque<int> queue{0};
  depth[0] = 0;
  while (!queue.empty()) {
    const int n = queue.front();
    queue.pop_front();
    for (auto [j, other] : adj[n]) {
      if (depth[other] >= 0) continue;
      depth[other] = depth[n] + 1;
      parent[other] = n;
      parent_joint[other] = j;
      tree_edge[j] = true;
      queue.push_back(other);
    }
  }
  for (int li = 0; li < static_cast<int>(links_.size()); ++li) {
    if (!links_[li].ground && depth[li + 1] < 0) {
      fail(ErrorCode::OpenChain, fmt::format("link '{}' is not connected to the ground", links_[li].id));
    }
  }
  loops_.clear();
  std::vector<bool> on_loop(nodes, false);
  for (int j = 0; j < static_cast<int>(joints_.size()); ++j) {
    if (tree_edge[j]) continue;
    int u = node_of(joints_[j].a);
    int v = node_of(joints_[j].b);
    std::vector<int> up_u{u}, up_v{v};
    std::vector<int> ju, jv;
    while (u != v) {
      if (depth[u] >= depth[v]) {
        ju.push_back(parent_joint[u]);
        u = parent[u];
        up_u.push_back(u);
      } else {
        jv.push_back(parent_joint[v]);
        v = parent[v];
        up_v.push_back(v);
      }
    }
    // Node sequence lca -> ... -> a-side, closing joint, b-side -> ... -> lca.
    Loop loop;
    std::vector<int> seq_nodes(up_u.rbegin(), up_u.rend());
    std::vector<int> seq_joints(ju.rbegin(), ju.rend());
    seq_joints.push_back(j);
    for (std::size_t k = 0; k + 1 < up_v.size(); ++k) seq_nodes.push_back(up_v[k]);
    for (int jj : jv) seq_joints.push_back(jj);
    loop.joints = seq_joints;
    for (std::size_t k = 0; k < seq_joints.size(); ++k) {
      const int n = seq_nodes[(k + 1) % seq_nodes.size()];
      loop.bodies.push_back(n == 0 ? -1 : n - 1);
      on_loop[n] = true;
    }
    loops_.push_back(std::move(loop));
  }
  if (loops_.empty()) fail(ErrorCode::OpenChain, "joint graph has no closed loop");
  if (!on_loop[driver_.link + 1]) {
    fail(ErrorCode::OpenChain, fmt::format("driven link '{}' is not part of a closed loop", links_[driver_.link].id));
  }
  for (int li = 0; li < static_cast<int>(links_.size()); ++li) {
    const auto& l = links_[li];
    if (!l.ground && l.source == AngleSource::Free && !on_loop[li + 1]) {
      fail(ErrorCode::OpenChain, fmt::format("link '{}' is not part of a closed loop", l.id));
    }
  }

  if (unknowns_ != 2 * static_cast<int>(residual_joints_.size())) {
    fail(ErrorCode::MobilityMismatch,
         fmt::format("{} unknowns vs {} joint equations; the chain must have exactly one degree of freedom",
                     unknowns_, 2 * residual_joints_.size()));
  }

  // Reachability from the driver through link-link joints and gears.
  std::vector<bool> reach(links_.size(), false);
  {
    std::deque<int> q{driver_.link};
    reach[driver_.link] = true;
    while (!q.empty()) {
      const int l = q.front();
      q.pop_front();
      auto visit = [&](int other) {
        if (other >= 0 && !links_[other].ground && !reach[other]) {
          reach[other] = true;
          q.push_back(other);
        }
      };
      for (const auto& ji : joints_) {
        if (ji.a.is_pivot() || ji.b.is_pivot()) continue;
        if (ji.a.link == l) visit(ji.b.link);
        if (ji.b.link == l) visit(ji.a.link);
      }
      for (const auto& g : gears_) {
        if (g.link_in == l) visit(g.link_out);
        if (g.link_out == l) visit(g.link_in);
      }
    }
  }
  auto reachable_link = [&](int l) { return l >= 0 && !links_[l].ground && reach[l]; };

  angle_outputs_.clear();
  for (std::size_t i = 0; i < s.angle_outputs.size(); ++i) {
    const auto& ao = s.angle_outputs[i];
    AngleOutputInfo info{ao.name, link_index(ao.link), -1, ao.sign, deg_to_rad(ao.offset_deg), ao.mirrored};
    if (!reachable_link(info.link)) {
      fail(ErrorCode::DanglingOutput,
           fmt::format("angle_outputs[{}]: '{}' is not driven (link '{}')", i, ao.name, ao.link));
    }
    if (!ao.reference.empty()) {
      info.reference = link_index(ao.reference);
      if (info.reference < 0) {
        fail(ErrorCode::DanglingOutput, fmt::format("angle_outputs[{}]: unknown reference '{}'", i, ao.reference));
      }
    }
    if (ao.sign != 1.0 && ao.sign != -1.0) {
      fail(ErrorCode::SchemaError, fmt::format("angle_outputs[{}].sign must be +1 or -1", i));
    }
    angle_outputs_.push_back(std::move(info));
  }
  point_outputs_.clear();
  for (std::size_t i = 0; i < s.point_outputs.size(); ++i) {
    const auto& po = s.point_outputs[i];
    PointOutputInfo info{po.name, resolve(po.point, fmt::format("point_outputs[{}]", i))};
    if (info.point.is_pivot() || !reachable_link(info.point.link)) {
      fail(ErrorCode::DanglingOutput, fmt::format("point_outputs[{}]: '{}' is not driven", i, po.name));
    }
    point_outputs_.push_back(std::move(info));
  }

  // Analytic assembly plan.
  dyads_.clear();
  std::vector<bool> known(links_.size(), false);
  for (std::size_t li = 0; li < links_.size(); ++li) {
    known[li] = links_[li].ground || links_[li].source != AngleSource::Free;
  }
  auto side_known = [&](const BodyPoint& bp) { return bp.is_pivot() || known[bp.link]; };
  auto attachment = [&](int link, int exclude) -> std::pair<int, bool> {
    for (int j = 0; j < static_cast<int>(joints_.size()); ++j) {
      if (j == exclude) continue;
      const auto& ji = joints_[j];
      if (!ji.a.is_pivot() && ji.a.link == link && side_known(ji.b)) return {j, true};
      if (!ji.b.is_pivot() && ji.b.link == link && side_known(ji.a)) return {j, false};
    }
    return {-1, false};
  };
  auto point_on = [&](int j, int link) {
    const auto& ji = joints_[j];
    return (!ji.a.is_pivot() && ji.a.link == link) ? ji.a.point : ji.b.point;
  };
  auto other_side = [&](int j, int link) {
    const auto& ji = joints_[j];
    return (!ji.a.is_pivot() && ji.a.link == link) ? ji.b : ji.a;
  };
  std::set<std::string> apexes;
  for (bool progress = true; progress;) {
    progress = false;
    for (int j = 0; j < static_cast<int>(joints_.size()); ++j) {
      const auto& ji = joints_[j];
      if (ji.a.is_pivot() || ji.b.is_pivot()) continue;
      const int l1 = ji.a.link;
      const int l2 = ji.b.link;
      if (links_[l1].ground || links_[l2].ground || known[l1] || known[l2]) continue;
      const auto [j1, unused1] = attachment(l1, j);
      const auto [j2, unused2] = attachment(l2, j);
      if (j1 < 0 || j2 < 0) continue;
      DyadStep step;
      step.apex_joint = j;
      const bool swap = j2 < j1;
      const int first = swap ? l2 : l1;
      const int second = swap ? l1 : l2;
      const int ja = swap ? j2 : j1;
      const int jb = swap ? j1 : j2;
      step.link1 = first;
      step.link2 = second;
      step.attach_joint1 = ja;
      step.attach_joint2 = jb;
      step.known1 = other_side(ja, first);
      step.known2 = other_side(jb, second);
      step.link1_attach_point = point_on(ja, first);
      step.link1_apex_point = point_on(j, first);
      step.link2_attach_point = point_on(jb, second);
      step.link2_apex_point = point_on(j, second);
      const auto br = std::find_if(s.branches.begin(), s.branches.end(),
                                   [&](const BranchSpec& b) { return b.joint == ji.id; });
      if (br == s.branches.end()) {
        fail(ErrorCode::SchemaError, fmt::format("branches: no branch given for dyad apex joint '{}'", ji.id));
      }
      step.side = branch_side(br->branch);
      apexes.insert(ji.id);
      dyads_.push_back(step);
      known[l1] = known[l2] = true;
      progress = true;
    }
  }
  for (const auto& b : s.branches) {
    if (!apexes.count(b.joint)) {
      fail(ErrorCode::InvalidSpec, fmt::format("branches: joint '{}' is not the apex of an assembly dyad", b.joint));
    }
  }

  home_.assign(links_.size(), std::nullopt);
  for (std::size_t i = 0; i < s.home.size(); ++i) {
    const int li = link_index(s.home[i].link);
    if (li < 0) fail(ErrorCode::SchemaError, fmt::format("home[{}]: unknown link '{}'", i, s.home[i].link));
    home_[li] = Pose2{Vec2(s.home[i].x, s.home[i].y), deg_to_rad(s.home[i].angle_deg)};
  }
  for (std::size_t li = 0; li < links_.size(); ++li) {
    if (!known[li] && !home_[li]) {
      fail(ErrorCode::InvalidSpec,
           fmt::format("link '{}' cannot be assembled analytically and has no home pose", links_[li].id));
    }
  }

  for (std::size_t i = 0; i < s.parameters.size(); ++i) {
    const auto& p = s.parameters[i];
    if (!has_parameter(p.name)) {
      fail(ErrorCode::SchemaError, fmt::format("parameters[{}].name: unknown parameter '{}'", i, p.name));
    }
    if (!(p.lower <= p.upper)) {
      fail(ErrorCode::SchemaError, fmt::format("parameters[{}]: lower bound exceeds upper bound", i));
    }
  }

  symmetry_.clear();
  for (std::size_t i = 0; i < s.symmetry.size(); ++i) {
    const auto& sy = s.symmetry[i];
    SymmetryInfo info{sy.kind, sy.target, {}};
    if (sy.kind == SymmetrySpec::Kind::Centered) {
      info.point.pivot = find_by_id(s.pivots, sy.target);
      if (info.point.pivot < 0) {
        fail(ErrorCode::SchemaError, fmt::format("symmetry[{}]: unknown pivot '{}'", i, sy.target));
      }
    } else {
      const auto dot = sy.target.find('.');
      if (dot == std::string::npos) {
        fail(ErrorCode::SchemaError, fmt::format("symmetry[{}]: target must be link.point", i));
      }
      info.point = resolve({sy.target.substr(0, dot), sy.target.substr(dot + 1)}, fmt::format("symmetry[{}]", i));
    }
    symmetry_.push_back(std::move(info));
  }
}

LinkageSpec Mechanism::spec() const {
  LinkageSpec out = spec_;
  for (std::size_t li = 0; li < links_.size(); ++li) {
    const LinkInfo& info = links_[li];
    LinkSpec& ls = out.links[li];
    ls.length = params_[info.length_param].value;
    for (std::size_t k = 0; k < ls.points.size(); ++k) {
      ls.points[k].u = params_[info.points[k + 2].u_param].value;
      ls.points[k].v = params_[info.points[k + 2].v_param].value;
    }
  }
  return out;
}

void Mechanism::sync_spec_from_params() { spec_ = spec(); }

std::map<std::string, double> Mechanism::parameter_map() const {
  std::map<std::string, double> out;
  for (const auto& p : params_) out.emplace(p.name, p.value);
  return out;
}

bool Mechanism::has_parameter(std::string_view name) const noexcept {
  return param_index_.find(name) != param_index_.end();
}

int Mechanism::parameter_index(std::string_view name) const {
  const auto it = param_index_.find(name);
  if (it == param_index_.end()) throw Error(ErrorCode::UnknownParameter, fmt::format("unknown parameter '{}'", name));
  return it->second;
}

double Mechanism::parameter(std::string_view name) const { return params_[parameter_index(name)].value; }

Mechanism Mechanism::with_parameter(std::string_view name, double value) const {
  return with_parameters({{parameter_index(name), value}});
}

Mechanism Mechanism::with_parameters(const std::vector<std::pair<int, double>>& updates) const {
  Mechanism out = *this;
  for (const auto& [idx, value] : updates) {
    if (idx < 0 || idx >= static_cast<int>(params_.size())) {
      throw Error(ErrorCode::UnknownParameter, fmt::format("parameter index {} out of range", idx));
    }
    out.params_[idx].value = value;
  }
  for (const auto& l : out.links_) {
    const double len = out.params_[l.length_param].value;
    if (!(len > 0.0)) {
      throw Error(ErrorCode::NonPositiveLength, fmt::format("link '{}' has length {}", l.id, len));
    }
  }
  out.sync_spec_from_params();
  return out;
}

int Mechanism::link_index(std::string_view id) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int Mechanism::joint_index(std::string_view id) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int Mechanism::angle_output_index(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < angle_outputs_.size(); ++i) {
    if (angle_outputs_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Mechanism::point_output_index(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < point_outputs_.size(); ++i) {
    if (point_outputs_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

Vec2 Mechanism::local_point(int link, int point) const noexcept {
  const LinkInfo& l = links_[link];
  if (point == kBasePoint) return Vec2::Zero();
  if (point == kTipPoint) return Vec2(params_[l.length_param].value, 0.0);
  const PointSlot& slot = l.points[point];
  return Vec2(params_[slot.u_param].value, params_[slot.v_param].value);
}

Vec2 Mechanism::pivot_position(int pivot) const noexcept {
  const auto& p = spec_.pivots[pivot];
  return Vec2(p.x, p.y);
}

}  // namespace flapkin
