#include "flapkin/errors.hpp"
#include "flapkin/mechanism.hpp"

#include <utility>

namespace flapkin {

namespace {

// A pose (x, y, a) reflects to (-x, y, 180 - a); a local point (u, v) then
// lands on the reflected world point when v changes sign.
double mirror_angle_deg(double a) { return 180.0 - a; }

// 0.0 - x keeps +0 for zero, unlike unary minus.
double neg(double x) { return 0.0 - x; }

Branch flip(Branch b) { return b == Branch::Open ? Branch::Crossed : Branch::Open; }

bool is_v_parameter(const std::string& name) {
  return name.size() > 2 && name.compare(name.size() - 2, 2, ".v") == 0;
}

}  // namespace

LinkageSpec mirror_spec(const LinkageSpec& spec) {
  LinkageSpec out = spec;
  for (auto& p : out.pivots) p.x = neg(p.x);
  for (auto& l : out.links) {
    for (auto& pt : l.points) pt.v = neg(pt.v);
    if (l.ground) l.ground->angle_deg = mirror_angle_deg(l.ground->angle_deg);
  }
  if (out.driver) {
    out.driver->direction = -out.driver->direction;
    out.driver->offset_deg = mirror_angle_deg(out.driver->offset_deg);
  }
  // out = r*in + o becomes out' = r*in' + 180(1 - r) - o.
  for (auto& g : out.gears) g.offset_deg = 180.0 * (1.0 - g.ratio) - g.offset_deg;
  for (auto& ao : out.angle_outputs) ao.mirrored = !ao.mirrored;
  for (auto& b : out.branches) b.branch = flip(b.branch);
  for (auto& p : out.parameters) {
    if (is_v_parameter(p.name)) p = {p.name, neg(p.upper), neg(p.lower), p.stage};
  }
  for (auto& h : out.home) {
    h.x = neg(h.x);
    h.angle_deg = mirror_angle_deg(h.angle_deg);
  }
  return out;
}

Mechanism mirror_mechanism(const Mechanism& mech) { return Mechanism::validate(mirror_spec(mech.spec())); }

Mechanism gear_coupled_twin(const Mechanism& mech) {
  const LinkageSpec right = mech.spec();
  const LinkageSpec left = mirror_spec(right);
  const std::string pre = "L_";
  auto ref = [&](PointRef r) {
    if (r.body == kGround) {
      r.point = pre + r.point;
    } else {
      r.body = pre + r.body;
    }
    return r;
  };

  LinkageSpec twin = right;
  twin.name = right.name + " (both wings)";
  for (auto p : left.pivots) {
    p.id = pre + p.id;
    twin.pivots.push_back(std::move(p));
  }
  for (auto l : left.links) {
    l.id = pre + l.id;
    if (l.ground) l.ground->pivot = pre + l.ground->pivot;
    twin.links.push_back(std::move(l));
  }
  for (auto j : left.joints) {
    j.id = pre + j.id;
    j.a = ref(j.a);
    j.b = ref(j.b);
    twin.joints.push_back(std::move(j));
  }
  // The mirrored crank angle is 180 - theta, i.e. an external mesh with the
  // original crank.
  twin.gears.push_back({pre + "drive", right.driver->joint, pre + right.driver->joint, -1.0, 180.0});
  for (auto g : left.gears) {
    g.id = pre + g.id;
    g.joint_in = pre + g.joint_in;
    g.joint_out = pre + g.joint_out;
    twin.gears.push_back(std::move(g));
  }
  for (auto ao : left.angle_outputs) {
    ao.name = pre + ao.name;
    ao.link = pre + ao.link;
    if (!ao.reference.empty()) ao.reference = pre + ao.reference;
    twin.angle_outputs.push_back(std::move(ao));
  }
  for (auto po : left.point_outputs) {
    po.name = pre + po.name;
    po.point = ref(po.point);
    twin.point_outputs.push_back(std::move(po));
  }
  for (auto b : left.branches) {
    b.joint = pre + b.joint;
    twin.branches.push_back(std::move(b));
  }
  for (auto h : left.home) {
    h.link = pre + h.link;
    twin.home.push_back(std::move(h));
  }
  return Mechanism::validate(twin);
}

}  // namespace flapkin
