#include "flapkin/mechanism_io.hpp"

#include "flapkin/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace flapkin {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write to '{}' failed", path.string()));
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, fmt::format("{}: {}", path, msg));
}

void only_keys(const json& obj, std::initializer_list<std::string_view> keys, const std::string& path) {
  if (!obj.is_object()) schema(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto k : keys) known = known || it.key() == k;
    if (!known) schema(path + "." + it.key(), "unknown field");
  }
}

const json& need(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) schema(path + "." + key, "missing required field");
  return obj[key];
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  return j.get<double>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) schema(path, "expected a string");
  return j.get<std::string>();
}

std::string ident(const json& j, const std::string& path) {
  std::string s = text(j, path);
  if (s.empty() || s.find('.') != std::string::npos) schema(path, "identifier must be non-empty and contain no '.'");
  return s;
}

const json& array(const json& obj, const char* key, const std::string& path) {
  static const json empty = json::array();
  if (!obj.contains(key)) return empty;
  const json& j = obj[key];
  if (!j.is_array()) schema(path + "." + key, "expected an array");
  return j;
}

PointRef point_ref(const json& j, const std::string& path) {
  const std::string s = text(j, path);
  const auto dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size()) schema(path, "expected 'body.point'");
  return {s.substr(0, dot), s.substr(dot + 1)};
}

std::string at(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

LinkageSpec parse_mechanism(std::string_view src) {
  json doc;
  try {
    doc = json::parse(src.begin(), src.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(src, e.byte);
    throw Error(ErrorCode::SyntaxError, fmt::format("line {}, column {}: invalid JSON", line, col));
  }
  if (!doc.is_object()) schema("$", "expected an object");
  if (!doc.contains("format_version")) throw Error(ErrorCode::VersionError, "missing format_version");
  if (!doc["format_version"].is_number_integer() || doc["format_version"].get<int>() != 1) {
    throw Error(ErrorCode::VersionError, fmt::format("unsupported format_version {}", doc["format_version"].dump()));
  }
  only_keys(doc,
            {"format_version", "name", "description", "pivots", "links", "joints", "driver", "gears", "outputs",
             "branches", "parameters", "symmetry", "home"},
            "$");

  LinkageSpec s;
  s.format_version = 1;
  if (doc.contains("name")) s.name = text(doc["name"], "name");
  if (doc.contains("description")) s.description = text(doc["description"], "description");

  const json& pivots = array(doc, "pivots", "");
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    const std::string p = at("pivots", i);
    only_keys(pivots[i], {"id", "x", "y"}, p);
    s.pivots.push_back({ident(need(pivots[i], "id", p), p + ".id"), number(need(pivots[i], "x", p), p + ".x"),
                        number(need(pivots[i], "y", p), p + ".y")});
  }

  const json& links = array(doc, "links", "");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string p = at("links", i);
    const json& l = links[i];
    only_keys(l, {"id", "length", "points", "ground"}, p);
    LinkSpec ls;
    ls.id = ident(need(l, "id", p), p + ".id");
    ls.length = number(need(l, "length", p), p + ".length");
    if (!(ls.length > 0.0)) schema(p + ".length", fmt::format("link length must be positive (got {})", ls.length));
    const json& pts = array(l, "points", p);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::string pp = at(p + ".points", k);
      only_keys(pts[k], {"name", "u", "v"}, pp);
      ls.points.push_back({ident(need(pts[k], "name", pp), pp + ".name"), number(need(pts[k], "u", pp), pp + ".u"),
                           number(need(pts[k], "v", pp), pp + ".v")});
    }
    if (l.contains("ground")) {
      const std::string gp = p + ".ground";
      only_keys(l["ground"], {"pivot", "angle_deg"}, gp);
      GroundMount g;
      g.pivot = ident(need(l["ground"], "pivot", gp), gp + ".pivot");
      if (l["ground"].contains("angle_deg")) g.angle_deg = number(l["ground"]["angle_deg"], gp + ".angle_deg");
      ls.ground = g;
    }
    s.links.push_back(std::move(ls));
  }

  const json& joints = array(doc, "joints", "");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string p = at("joints", i);
    only_keys(joints[i], {"id", "a", "b"}, p);
    s.joints.push_back({ident(need(joints[i], "id", p), p + ".id"), point_ref(need(joints[i], "a", p), p + ".a"),
                        point_ref(need(joints[i], "b", p), p + ".b")});
  }

  if (doc.contains("driver")) {
    const json& d = doc["driver"];
    only_keys(d, {"joint", "direction", "offset_deg"}, "driver");
    DriverSpec ds;
    ds.joint = ident(need(d, "joint", "driver"), "driver.joint");
    if (d.contains("direction")) ds.direction = number(d["direction"], "driver.direction");
    if (d.contains("offset_deg")) ds.offset_deg = number(d["offset_deg"], "driver.offset_deg");
    s.driver = ds;
  }

  const json& gears = array(doc, "gears", "");
  for (std::size_t i = 0; i < gears.size(); ++i) {
    const std::string p = at("gears", i);
    const json& g = gears[i];
    only_keys(g, {"id", "in", "out", "ratio", "offset_deg"}, p);
    GearSpec gs;
    gs.id = ident(need(g, "id", p), p + ".id");
    gs.joint_in = ident(need(g, "in", p), p + ".in");
    gs.joint_out = ident(need(g, "out", p), p + ".out");
    gs.ratio = number(need(g, "ratio", p), p + ".ratio");
    if (g.contains("offset_deg")) gs.offset_deg = number(g["offset_deg"], p + ".offset_deg");
    s.gears.push_back(std::move(gs));
  }

  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    only_keys(o, {"angles", "points"}, "outputs");
    const json& angles = array(o, "angles", "outputs");
    for (std::size_t i = 0; i < angles.size(); ++i) {
      const std::string p = at("outputs.angles", i);
      const json& a = angles[i];
      only_keys(a, {"name", "link", "reference", "sign", "offset_deg", "mirrored"}, p);
      AngleOutputSpec ao;
      ao.name = ident(need(a, "name", p), p + ".name");
      ao.link = ident(need(a, "link", p), p + ".link");
      if (a.contains("reference")) ao.reference = ident(a["reference"], p + ".reference");
      if (a.contains("sign")) ao.sign = number(a["sign"], p + ".sign");
      if (a.contains("offset_deg")) ao.offset_deg = number(a["offset_deg"], p + ".offset_deg");
      if (a.contains("mirrored")) {
        if (!a["mirrored"].is_boolean()) schema(p + ".mirrored", "expected true or false");
        ao.mirrored = a["mirrored"].get<bool>();
      }
      s.angle_outputs.push_back(std::move(ao));
    }
    const json& points = array(o, "points", "outputs");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string p = at("outputs.points", i);
      only_keys(points[i], {"name", "point"}, p);
      s.point_outputs.push_back(
          {ident(need(points[i], "name", p), p + ".name"), point_ref(need(points[i], "point", p), p + ".point")});
    }
  }

  const json& branches = array(doc, "branches", "");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string p = at("branches", i);
    only_keys(branches[i], {"joint", "branch"}, p);
    const std::string b = text(need(branches[i], "branch", p), p + ".branch");
    if (b != "open" && b != "crossed") schema(p + ".branch", "expected 'open' or 'crossed'");
    s.branches.push_back({ident(need(branches[i], "joint", p), p + ".joint"), b == "open" ? Branch::Open : Branch::Crossed});
  }

  const json& params = array(doc, "parameters", "");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string p = at("parameters", i);
    const json& q = params[i];
    only_keys(q, {"name", "min", "max", "stage"}, p);
    ParameterSpec ps;
    ps.name = text(need(q, "name", p), p + ".name");
    ps.lower = number(need(q, "min", p), p + ".min");
    ps.upper = number(need(q, "max", p), p + ".max");
    const std::string st = text(need(q, "stage", p), p + ".stage");
    const auto stage = parse_stage(st);
    if (!stage) schema(p + ".stage", "expected 'humerus', 'radius' or 'fixed'");
    ps.stage = *stage;
    s.parameters.push_back(std::move(ps));
  }

  const json& sym = array(doc, "symmetry", "");
  for (std::size_t i = 0; i < sym.size(); ++i) {
    const std::string p = at("symmetry", i);
    only_keys(sym[i], {"kind", "target"}, p);
    const std::string kind = text(need(sym[i], "kind", p), p + ".kind");
    SymmetrySpec ss;
    if (kind == "centered") {
      ss.kind = SymmetrySpec::Kind::Centered;
    } else if (kind == "aligned_y") {
      ss.kind = SymmetrySpec::Kind::AlignedY;
    } else {
      schema(p + ".kind", "expected 'centered' or 'aligned_y'");
    }
    ss.target = text(need(sym[i], "target", p), p + ".target");
    s.symmetry.push_back(std::move(ss));
  }

  const json& home = array(doc, "home", "");
  for (std::size_t i = 0; i < home.size(); ++i) {
    const std::string p = at("home", i);
    only_keys(home[i], {"link", "x", "y", "angle_deg"}, p);
    s.home.push_back({ident(need(home[i], "link", p), p + ".link"), number(need(home[i], "x", p), p + ".x"),
                      number(need(home[i], "y", p), p + ".y"),
                      number(need(home[i], "angle_deg", p), p + ".angle_deg")});
  }
  return s;
}

LinkageSpec parse_mechanism_file(const std::filesystem::path& path) {
  const std::string src = read_text_file(path);
  try {
    return parse_mechanism(src);
  } catch (const Error& e) {
    throw e.with_context(path.filename().string());
  }
}

namespace {

std::string ref(const PointRef& r) { return r.body + "." + r.point; }

}  // namespace

std::string format_mechanism(const LinkageSpec& s) {
  ojson doc;
  doc["format_version"] = 1;
  doc["name"] = s.name;
  doc["description"] = s.description;
  doc["pivots"] = ojson::array();
  for (const auto& p : s.pivots) doc["pivots"].push_back({{"id", p.id}, {"x", p.x}, {"y", p.y}});
  doc["links"] = ojson::array();
  for (const auto& l : s.links) {
    ojson j;
    j["id"] = l.id;
    j["length"] = l.length;
    j["points"] = ojson::array();
    for (const auto& pt : l.points) j["points"].push_back({{"name", pt.name}, {"u", pt.u}, {"v", pt.v}});
    if (l.ground) j["ground"] = {{"pivot", l.ground->pivot}, {"angle_deg", l.ground->angle_deg}};
    doc["links"].push_back(std::move(j));
  }
  doc["joints"] = ojson::array();
  for (const auto& j : s.joints) doc["joints"].push_back({{"id", j.id}, {"a", ref(j.a)}, {"b", ref(j.b)}});
  if (s.driver) {
    doc["driver"] = {
        {"joint", s.driver->joint}, {"direction", s.driver->direction}, {"offset_deg", s.driver->offset_deg}};
  }
  doc["gears"] = ojson::array();
  for (const auto& g : s.gears) {
    doc["gears"].push_back(
        {{"id", g.id}, {"in", g.joint_in}, {"out", g.joint_out}, {"ratio", g.ratio}, {"offset_deg", g.offset_deg}});
  }
  ojson outputs;
  outputs["angles"] = ojson::array();
  for (const auto& a : s.angle_outputs) {
    ojson j;
    j["name"] = a.name;
    j["link"] = a.link;
    if (!a.reference.empty()) j["reference"] = a.reference;
    j["sign"] = a.sign;
    j["offset_deg"] = a.offset_deg;
    j["mirrored"] = a.mirrored;
    outputs["angles"].push_back(std::move(j));
  }
  outputs["points"] = ojson::array();
  for (const auto& p : s.point_outputs) outputs["points"].push_back({{"name", p.name}, {"point", ref(p.point)}});
  doc["outputs"] = std::move(outputs);
  doc["branches"] = ojson::array();
  for (const auto& b : s.branches) {
    doc["branches"].push_back({{"joint", b.joint}, {"branch", b.branch == Branch::Open ? "open" : "crossed"}});
  }
  doc["parameters"] = ojson::array();
  for (const auto& p : s.parameters) {
    doc["parameters"].push_back(
        {{"name", p.name}, {"min", p.lower}, {"max", p.upper}, {"stage", std::string(to_string(p.stage))}});
  }
  doc["symmetry"] = ojson::array();
  for (const auto& y : s.symmetry) {
    doc["symmetry"].push_back(
        {{"kind", y.kind == SymmetrySpec::Kind::Centered ? "centered" : "aligned_y"}, {"target", y.target}});
  }
  doc["home"] = ojson::array();
  for (const auto& h : s.home) {
    doc["home"].push_back({{"link", h.link}, {"x", h.x}, {"y", h.y}, {"angle_deg", h.angle_deg}});
  }
  return doc.dump(2) + "\n";
}

void write_mechanism_file(const LinkageSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, format_mechanism(spec));
}

}  // namespace flapkin
