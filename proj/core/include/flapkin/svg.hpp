#pragma once

#include "flapkin/gait.hpp"
#include "flapkin/sensitivity.hpp"
#include "flapkin/target.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flapkin {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#000000";
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
  std::vector<PlotSeries> series;
  int width = 640;
  int height = 480;
  bool equal_aspect = false;  ///< same mm per pixel on both axes (paths)
};

/// Standalone SVG with one polyline per series. Byte-identical output for
/// identical input. Throws InvalidArgument (no series) and GridMismatch
/// (x/y size mismatch or series of different lengths).
std::string render_svg(const PlotSpec& plot);
void write_svg(const PlotSpec& plot, const std::filesystem::path& path);

/// Shoulder and elbow angles against phase, optionally over their targets.
PlotSpec gait_angle_plot(const GaitTrajectory& traj, const TargetGait* targets = nullptr);

/// Wingtip (or elbow) path family of a sensitivity sweep. Scales above 1
/// are drawn in greens, below 1 in reds, the nominal in black.
PlotSpec sensitivity_plot(const SensitivityResult& result, bool elbow = false);

}  // namespace flapkin
