#include "flapkin/svg.hpp"

#include "flapkin/errors.hpp"
#include "flapkin/mechanism_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flapkin {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> extent(const std::vector<PlotSeries>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

// Rounds the range outwards to a 1-2-5 tick step; returns the step.
double nice_range(double& lo, double& hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double step = (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
  lo = std::floor(lo / step + 1e-9) * step;
  hi = std::ceil(hi / step - 1e-9) * step;
  return step;
}

std::string tick_label(double v, double step) {
  if (std::abs(v) < step * 1e-9) v = 0.0;
  const int digits = std::max(0, -static_cast<int>(std::floor(std::log10(step) + 1e-9)));
  return fmt::format("{:.{}f}", v, digits);
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  if (plot.series.empty()) throw Error(ErrorCode::InvalidArgument, "plot needs at least one series");
  const std::size_t n = plot.series.front().x.size();
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) {
      throw Error(ErrorCode::GridMismatch, fmt::format("series '{}' has {} x and {} y values", s.label, s.x.size(), s.y.size()));
    }
    if (s.x.size() != n) throw Error(ErrorCode::GridMismatch, fmt::format("series '{}' has a different sample count", s.label));
  }

  auto [x0, x1] = plot.x_range.value_or(extent(plot.series, true));
  auto [y0, y1] = plot.y_range.value_or(extent(plot.series, false));
  const double left = 70.0, right = 20.0 + 150.0, top = 40.0, bottom = 50.0;
  const double pw = plot.width - left - right;
  const double ph = plot.height - top - bottom;
  if (plot.equal_aspect) {
    // Grow the tighter axis so both share one scale.
    const double sx = (x1 - x0) / pw;
    const double sy = (y1 - y0) / ph;
    if (sx > sy) {
      const double pad = (sx * ph - (y1 - y0)) / 2.0;
      y0 -= pad;
      y1 += pad;
    } else {
      const double pad = (sy * pw - (x1 - x0)) / 2.0;
      x0 -= pad;
      x1 += pad;
    }
  }
  const double xstep = nice_range(x0, x1);
  const double ystep = nice_range(y0, y1);
  auto X = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto Y = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };

  std::string o;
  o += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      plot.width, plot.height, plot.width, plot.height);
  o += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", plot.width, plot.height);
  if (!plot.title.empty()) {
    o += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     left + pw / 2.0, escape(plot.title));
  }
  o += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double v = x0; v <= x1 + xstep * 1e-6; v += xstep) {
    o += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", X(v), top, top + ph);
  }
  for (double v = y0; v <= y1 + ystep * 1e-6; v += ystep) {
    o += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", left, Y(v), left + pw);
  }
  o += "</g>\n";
  o += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#000000\"/>\n",
                   left, top, pw, ph);
  o += "<g text-anchor=\"middle\">\n";
  for (double v = x0; v <= x1 + xstep * 1e-6; v += xstep) {
    o += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", X(v), top + ph + 16.0, tick_label(v, xstep));
  }
  o += "</g>\n<g text-anchor=\"end\">\n";
  for (double v = y0; v <= y1 + ystep * 1e-6; v += ystep) {
    o += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left - 6.0, Y(v) + 4.0, tick_label(v, ystep));
  }
  o += "</g>\n";
  if (!plot.x_label.empty()) {
    o += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2.0,
                     static_cast<double>(plot.height) - 12.0, escape(plot.x_label));
  }
  if (!plot.y_label.empty()) {
    o += fmt::format(
        "<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">{1}</text>\n",
        top + ph / 2.0, escape(plot.y_label));
  }

  for (const auto& s : plot.series) {
    o += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"", escape(s.color),
                     s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    bool first = true;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      if (!first) o += ' ';
      o += fmt::format("{:.2f},{:.2f}", X(s.x[k]), Y(s.y[k]));
      first = false;
    }
    o += "\"/>\n";
  }

  // Legend.
  double ly = top + 10.0;
  const double lx = left + pw + 14.0;
  for (const auto& s : plot.series) {
    if (s.label.empty()) continue;
    o += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
                     lx, ly, lx + 20.0, ly, escape(s.color), s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    o += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 26.0, ly + 4.0, escape(s.label));
    ly += 16.0;
  }
  o += "</svg>\n";
  return o;
}

void write_svg(const PlotSpec& plot, const std::filesystem::path& path) { write_text_file(path, render_svg(plot)); }

PlotSpec gait_angle_plot(const GaitTrajectory& traj, const TargetGait* targets) {
  PlotSpec p;
  p.title = "Wing angles over one wingbeat";
  p.x_label = "phase (deg)";
  p.y_label = "angle (deg)";
  std::vector<double> phi;
  for (double v : traj.phases) phi.push_back(rad_to_deg(v));
  auto deg = [](const std::vector<double>& r) {
    std::vector<double> out;
    for (double v : r) out.push_back(rad_to_deg(v));
    return out;
  };
  if (!traj.theta_s.empty()) p.series.push_back({"shoulder", phi, deg(traj.theta_s), "#1f77b4", false});
  if (!traj.theta_e.empty()) p.series.push_back({"elbow", phi, deg(traj.theta_e), "#d62728", false});
  if (targets) {
    if (targets->size() != traj.size()) throw Error(ErrorCode::GridMismatch, "targets and trajectory differ in length");
    p.series.push_back({"shoulder target", phi, targets->theta_s, "#1f77b4", true});
    p.series.push_back({"elbow target", phi, targets->theta_e, "#d62728", true});
  }
  return p;
}

PlotSpec sensitivity_plot(const SensitivityResult& result, bool elbow) {
  PlotSpec p;
  p.title = fmt::format("{} path, {} scaled", elbow ? "Elbow" : "Wingtip", result.parameter);
  p.x_label = "x (mm)";
  p.y_label = "y (mm)";
  p.equal_aspect = true;
  double max_up = 0.0, max_down = 0.0;
  for (const auto& o : result.outcomes) {
    max_up = std::max(max_up, o.scale - 1.0);
    max_down = std::max(max_down, 1.0 - o.scale);
  }
  for (const auto& o : result.outcomes) {
    if (!o.trajectory) continue;
    const auto& pts = elbow ? o.trajectory->elbow : o.trajectory->wingtip;
    PlotSeries s;
    s.label = fmt::format("x{:.3f}", o.scale);
    for (const auto& v : pts) {
      s.x.push_back(v.x());
      s.y.push_back(v.y());
    }
    s.x.push_back(s.x.front());
    s.y.push_back(s.y.front());
    // Larger scales green, smaller red; intensity grows with distance from 1.
    if (o.scale > 1.0) {
      const int shade = static_cast<int>(std::lround(200.0 - 120.0 * (o.scale - 1.0) / max_up));
      s.color = fmt::format("#00{:02x}00", shade);
    } else if (o.scale < 1.0) {
      const int shade = static_cast<int>(std::lround(200.0 + 55.0 * (1.0 - o.scale) / max_down));
      s.color = fmt::format("#{:02x}0000", shade);
    } else {
      s.label += " (nominal)";
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

}  // namespace flapkin
