#include "flapkin/errors.hpp"
#include "flapkin/gait.hpp"
#include "flapkin/mechanism_io.hpp"
#include "flapkin/svg.hpp"
#include "flapkin/trajectory_io.hpp"

#include "golden.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace flapkin {
namespace {

namespace fs = std::filesystem;
using test::data_path;
using test::load_data;

Error error_of(std::string_view src) {
  try {
    parse_mechanism(src);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "parsed";
  return Error(ErrorCode::IoError, "");
}

std::string demo_with(const std::string& from, const std::string& to) {
  std::string s = read_text_file(data_path("fourbar_demo.json"));
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos);
  return s.replace(at, from.size(), to);
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto at = s.find(what); at != std::string::npos; at = s.find(what, at + 1)) ++n;
  return n;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("flapkin_test_" + name); }

TEST(MechanismFile, DemoParses) {
  const LinkageSpec s = parse_mechanism_file(data_path("fourbar_demo.json"));
  EXPECT_EQ(s.links.size(), 4u);
  EXPECT_EQ(s.joints.size(), 4u);
  EXPECT_EQ(s.driver->joint, "drive");
}

TEST(MechanismFile, NegativeLengthNamesField) {
  const Error e = error_of(demo_with("\"length\": 6.0", "\"length\": -6.0"));
  EXPECT_EQ(e.code(), ErrorCode::SchemaError);
  EXPECT_NE(std::string(e.what()).find("links[2].length"), std::string::npos) << e.what();
}

TEST(MechanismFile, SyntaxErrorHasLineAndColumn) {
  const Error e = error_of("{\n  \"format_version\": 1,\n  \"links\": [,]\n}");
  EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
}

TEST(MechanismFile, VersionAndUnknownKeys) {
  EXPECT_EQ(error_of(demo_with("\"format_version\": 1", "\"format_version\": 2")).code(), ErrorCode::VersionError);
  const Error e = error_of(demo_with("\"driver\": {", "\"driver\": { \"speed\": 3,"));
  EXPECT_EQ(e.code(), ErrorCode::SchemaError);
  EXPECT_NE(std::string(e.what()).find("driver.speed"), std::string::npos) << e.what();
}

TEST(MechanismFile, MissingFileIsIoError) {
  try {
    parse_mechanism_file(data_path("no_such_file.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(MechanismFile, RoundTrip) {
  for (const char* name : {"fourbar_demo.json", "reference_armwing.json"}) {
    const LinkageSpec s = parse_mechanism_file(data_path(name));
    const std::string once = format_mechanism(s);
    EXPECT_EQ(parse_mechanism(once), s) << name;
    EXPECT_EQ(format_mechanism(parse_mechanism(once)), once) << name;
    EXPECT_EQ(Mechanism::validate(parse_mechanism(once)).parameter_map(), load_data(name).parameter_map());
  }
}

TEST(MechanismFile, TwinGolden) {
  const Mechanism twin = gear_coupled_twin(load_data("fourbar_demo.json"));
  test::expect_golden("fourbar_twin.json", format_mechanism(twin.spec()));
}

TEST(TrajectoryCsv, FourRows) {
  // Every other sample of the coarsest allowed sweep.
  const GaitTrajectory full = sweep_gait(load_data("fourbar_demo.json"), 8);
  TrajectoryTable t = to_table(full);
  TrajectoryTable q;
  for (std::size_t k = 0; k < t.size(); k += 2) {
    q.phi_deg.push_back(t.phi_deg[k]);
    q.theta_s_deg.push_back(t.theta_s_deg[k]);
    q.theta_e_deg.push_back(t.theta_e_deg[k]);
    q.elbow_x.push_back(t.elbow_x[k]);
    q.elbow_y.push_back(t.elbow_y[k]);
    q.tip_x.push_back(t.tip_x[k]);
    q.tip_y.push_back(t.tip_y[k]);
  }
  const std::string csv = format_trajectory_csv(q);
  EXPECT_EQ(count(csv, "\n"), 5u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kTrajectoryHeader);
  const TrajectoryTable back = parse_trajectory_csv(csv);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(back.theta_s_deg[k], q.theta_s_deg[k], 1e-9);
}

TEST(TrajectoryCsv, ArmwingFileRoundTrip) {
  const GaitTrajectory t = sweep_gait(load_data("reference_armwing.json"), 360);
  const fs::path p = temp_file("armwing.csv");
  write_trajectory_csv(t, p);
  const std::string first = read_text_file(p);
  EXPECT_EQ(count(first, "\n"), 361u);
  const TrajectoryTable back = read_trajectory_csv(p);
  for (int k = 0; k < 360; ++k) {
    EXPECT_EQ(back.phi_deg[k], static_cast<double>(k));
    EXPECT_NEAR(back.theta_s_deg[k], rad_to_deg(t.theta_s[k]), 1e-9);
    EXPECT_NEAR(back.theta_e_deg[k], rad_to_deg(t.theta_e[k]), 1e-9);
  }
  write_trajectory_csv(back, p);
  EXPECT_EQ(read_text_file(p), first);
  fs::remove(p);
}

TEST(TrajectoryCsv, TargetsRoundTrip) {
  const TargetGait g = sample_targets(360);
  const TargetGait back = targets_from_table(parse_trajectory_csv(format_trajectory_csv(to_table(g))));
  EXPECT_EQ(back.phases, g.phases);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(back.theta_e[k], g.theta_e[k], 1e-9);
}

TEST(TrajectoryCsv, BadInput) {
  auto code = [](std::string_view s) {
    try {
      targets_from_table(parse_trajectory_csv(s));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code("phi_deg,theta_s_deg\n0,1\n"), ErrorCode::SchemaError);
  std::string h(kTrajectoryHeader);
  EXPECT_EQ(code(h + "\n0,1,2,3,4,5\n"), ErrorCode::SchemaError);
  EXPECT_EQ(code(h + "\n0,1,2,3,4,5,x\n"), ErrorCode::SyntaxError);
  EXPECT_EQ(code(h + "\n0,1,2,nan,nan,nan,nan\n100,1,2,nan,nan,nan,nan\n"), ErrorCode::GridMismatch);
}

TEST(Svg, SinglePolyline) {
  PlotSpec p;
  p.series.push_back({"a", {0.0, 1.0}, {0.0, 2.0}});
  const std::string svg = render_svg(p);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  const auto at = svg.find("points=\"");
  const auto end = svg.find('"', at + 8);
  EXPECT_EQ(count(svg.substr(at + 8, end - at - 8), ","), 2u);
  EXPECT_EQ(render_svg(p), svg);
}

TEST(Svg, Preconditions) {
  PlotSpec p;
  try {
    render_svg(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  p.series.push_back({"a", {0.0, 1.0}, {0.0, 2.0}});
  p.series.push_back({"b", {0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}});
  try {
    render_svg(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Svg, GaitPlotWithTargets) {
  const GaitTrajectory t = sweep_gait(load_data("reference_armwing.json"), 72);
  const TargetGait g = sample_targets(72);
  const std::string svg = render_svg(gait_angle_plot(t, &g));
  EXPECT_EQ(count(svg, "<polyline"), 4u);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
}

}  // namespace
}  // namespace flapkin
