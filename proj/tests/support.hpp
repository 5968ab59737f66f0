#pragma once

#include "flapkin/mechanism.hpp"
#include "flapkin/mechanism_io.hpp"

#include <cmath>
#include <filesystem>
#include <string>

namespace flapkin::test {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(FLAPKIN_DATA_DIR) / name; }
inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(FLAPKIN_FIXTURE_DIR) / name;
}

inline Mechanism load_data(const std::string& name) { return Mechanism::validate(parse_mechanism_file(data_path(name))); }

// Four-bar with the crank pivot at the origin and the rocker pivot at the tip
// of the ground link. Joint order puts the crank pin before the rocker pivot
// so that Branch::Open means the same thing as in solve_fourbar.
inline LinkageSpec fourbar_spec(const FourBar& fb, double bound_scale = 0.5) {
  LinkageSpec s;
  s.name = "fourbar";
  s.pivots = {{"O", 0.0, 0.0}};
  s.links = {{"frame", fb.ground, {}, GroundMount{"O", rad_to_deg(fb.ground_angle)}},
             {"crank", fb.crank, {}, std::nullopt},
             {"coupler", fb.coupler, {}, std::nullopt},
             {"rocker", fb.rocker, {}, std::nullopt}};
  s.joints = {{"drive", {"ground", "O"}, {"crank", "base"}},
              {"crank_pin", {"crank", "tip"}, {"coupler", "base"}},
              {"rocker_pivot", {"frame", "tip"}, {"rocker", "base"}},
              {"rocker_pin", {"coupler", "tip"}, {"rocker", "tip"}}};
  s.driver = DriverSpec{"drive", 1.0, 0.0};
  s.angle_outputs = {{"shoulder", "rocker", "", 1.0, 0.0, false}, {"coupler", "coupler", "", 1.0, 0.0, false}};
  s.point_outputs = {{"wingtip", {"rocker", "tip"}}};
  s.branches = {{"rocker_pin", fb.branch}};
  auto bounded = [&](const std::string& name, double v, Stage st) {
    return ParameterSpec{name, v * (1.0 - bound_scale), v * (1.0 + bound_scale), st};
  };
  s.parameters = {{"frame.length", fb.ground, fb.ground, Stage::Fixed},
                  bounded("crank.length", fb.crank, Stage::Humerus),
                  bounded("coupler.length", fb.coupler, Stage::Humerus),
                  bounded("rocker.length", fb.rocker, Stage::Humerus)};
  return s;
}

inline Mechanism fourbar_mechanism(const FourBar& fb) { return Mechanism::validate(fourbar_spec(fb)); }

}  // namespace flapkin::test
