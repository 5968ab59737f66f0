#include "flapkin/trajectory_io.hpp"

#include "flapkin/errors.hpp"
#include "flapkin/mechanism_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <limits>

namespace flapkin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double phi_deg(std::size_t k, std::size_t n) { return 360.0 * static_cast<double>(k) / static_cast<double>(n); }

void put(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
  } else {
    out += fmt::format("{:.12g}", v);
  }
}

}  // namespace

TrajectoryTable to_table(const GaitTrajectory& traj) {
  TrajectoryTable t;
  const std::size_t n = traj.size();
  for (std::size_t k = 0; k < n; ++k) {
    t.phi_deg.push_back(phi_deg(k, n));
    t.theta_s_deg.push_back(traj.theta_s.empty() ? kNaN : rad_to_deg(traj.theta_s[k]));
    t.theta_e_deg.push_back(traj.theta_e.empty() ? kNaN : rad_to_deg(traj.theta_e[k]));
    t.elbow_x.push_back(traj.elbow.empty() ? kNaN : traj.elbow[k].x());
    t.elbow_y.push_back(traj.elbow.empty() ? kNaN : traj.elbow[k].y());
    t.tip_x.push_back(traj.wingtip.empty() ? kNaN : traj.wingtip[k].x());
    t.tip_y.push_back(traj.wingtip.empty() ? kNaN : traj.wingtip[k].y());
  }
  return t;
}

TrajectoryTable to_table(const TargetGait& targets) {
  TrajectoryTable t;
  const std::size_t n = targets.size();
  for (std::size_t k = 0; k < n; ++k) {
    t.phi_deg.push_back(phi_deg(k, n));
    t.theta_s_deg.push_back(targets.theta_s[k]);
    t.theta_e_deg.push_back(targets.theta_e[k]);
    t.elbow_x.push_back(kNaN);
    t.elbow_y.push_back(kNaN);
    t.tip_x.push_back(kNaN);
    t.tip_y.push_back(kNaN);
  }
  return t;
}

std::string format_trajectory_csv(const TrajectoryTable& t) {
  if (t.size() == 0) throw Error(ErrorCode::InvalidArgument, "trajectory is empty");
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double row[7] = {t.phi_deg[k], t.theta_s_deg[k], t.theta_e_deg[k], t.elbow_x[k],
                           t.elbow_y[k], t.tip_x[k],       t.tip_y[k]};
    for (int c = 0; c < 7; ++c) {
      if (c) out += ',';
      put(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const TrajectoryTable& table, const std::filesystem::path& path) {
  write_text_file(path, format_trajectory_csv(table));
}

void write_trajectory_csv(const GaitTrajectory& traj, const std::filesystem::path& path) {
  write_trajectory_csv(to_table(traj), path);
}

TrajectoryTable parse_trajectory_csv(std::string_view csv) {
  TrajectoryTable t;
  std::size_t pos = 0;
  int line_no = 0;
  bool header = false;
  while (pos < csv.size()) {
    std::size_t end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kTrajectoryHeader) throw Error(ErrorCode::SchemaError, "line 1: unexpected trajectory header");
      header = true;
      continue;
    }
    double v[7];
    int col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      if (col >= 7) throw Error(ErrorCode::SchemaError, fmt::format("line {}: more than 7 columns", line_no));
      if (cell == "nan") {
        v[col] = kNaN;
      } else {
        const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v[col]);
        if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) {
          throw Error(ErrorCode::SyntaxError, fmt::format("line {}, column {}: not a number", line_no, col + 1));
        }
      }
      ++col;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (col != 7) throw Error(ErrorCode::SchemaError, fmt::format("line {}: expected 7 columns, got {}", line_no, col));
    t.phi_deg.push_back(v[0]);
    t.theta_s_deg.push_back(v[1]);
    t.theta_e_deg.push_back(v[2]);
    t.elbow_x.push_back(v[3]);
    t.elbow_y.push_back(v[4]);
    t.tip_x.push_back(v[5]);
    t.tip_y.push_back(v[6]);
  }
  if (!header) throw Error(ErrorCode::SchemaError, "missing trajectory header");
  return t;
}

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path) {
  return parse_trajectory_csv(read_text_file(path));
}

TargetGait targets_from_table(const TrajectoryTable& table) {
  const std::size_t n = table.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "target file has no rows");
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(table.phi_deg[k] - phi_deg(k, n)) > 1e-9) {
      throw Error(ErrorCode::GridMismatch, fmt::format("row {}: phi {} is not on the uniform {}-sample grid", k + 1,
                                                       table.phi_deg[k], n));
    }
  }
  TargetGait t;
  t.phases = phase_grid(static_cast<int>(n));
  t.theta_s = table.theta_s_deg;
  t.theta_e = table.theta_e_deg;
  return t;
}

TargetGait targets_from_trajectory(const GaitTrajectory& traj) {
  TargetGait t;
  t.phases = traj.phases;
  for (double v : traj.theta_s) t.theta_s.push_back(rad_to_deg(v));
  for (double v : traj.theta_e) t.theta_e.push_back(rad_to_deg(v));
  if (t.theta_s.empty()) t.theta_s.assign(traj.size(), kNaN);
  if (t.theta_e.empty()) t.theta_e.assign(traj.size(), kNaN);
  return t;
}

}  // namespace flapkin
