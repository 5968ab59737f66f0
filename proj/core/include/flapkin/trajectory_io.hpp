#pragma once

#include "flapkin/gait.hpp"
#include "flapkin/target.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flapkin {

inline constexpr std::string_view kTrajectoryHeader =
    "phi_deg,theta_s_deg,theta_e_deg,elbow_x_mm,elbow_y_mm,tip_x_mm,tip_y_mm";

/// Column data of a trajectory file; absent series are NaN.
struct TrajectoryTable {
  std::vector<double> phi_deg;
  std::vector<double> theta_s_deg;
  std::vector<double> theta_e_deg;
  std::vector<double> elbow_x;
  std::vector<double> elbow_y;
  std::vector<double> tip_x;
  std::vector<double> tip_y;

  std::size_t size() const noexcept { return phi_deg.size(); }
};

TrajectoryTable to_table(const GaitTrajectory& traj);
TrajectoryTable to_table(const TargetGait& targets);

/// Fixed formatting, no timestamps. Throws InvalidArgument on an empty table.
std::string format_trajectory_csv(const TrajectoryTable& table);
void write_trajectory_csv(const GaitTrajectory& traj, const std::filesystem::path& path);
void write_trajectory_csv(const TrajectoryTable& table, const std::filesystem::path& path);

/// Throws SyntaxError / SchemaError / IoError.
TrajectoryTable parse_trajectory_csv(std::string_view csv);
TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

/// Targets from a trajectory file. The phi column must be the uniform grid
/// 360 k / N (GridMismatch otherwise).
TargetGait targets_from_table(const TrajectoryTable& table);

/// Targets equal to a mechanism's own swept angles (degrees).
TargetGait targets_from_trajectory(const GaitTrajectory& traj);

}  // namespace flapkin
