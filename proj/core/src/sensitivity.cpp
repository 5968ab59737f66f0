#include "flapkin/sensitivity.hpp"

#include "flapkin/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace flapkin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int tip_output(const Mechanism& mech) {
  int idx = mech.point_output_index(kWingtipPoint);
  if (idx < 0 && !mech.point_outputs().empty()) idx = 0;
  if (idx < 0) throw Error(ErrorCode::InvalidArgument, "mechanism has no point output to measure");
  return idx;
}

ScaleOutcome run_scale(const Mechanism& mech, int param, double scale, int n, const SweepOptions& sweep) {
  ScaleOutcome out;
  out.scale = scale;
  try {
    const Mechanism m = scale == 1.0 ? mech : mech.with_parameters({{param, scale * mech.parameters()[param].value}});
    out.trajectory = sweep_gait(m, n, sweep);
  } catch (const Error& e) {
    out.error = e.code();
    out.failed_phase = e.phase();
  }
  return out;
}

double max_distance(const GaitTrajectory& a, const GaitTrajectory& b, int tip) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a.samples[k].points[tip] - b.samples[k].points[tip]).norm());
  }
  return worst;
}

template <typename F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SensitivityResult sensitivity_sweep(const Mechanism& mech, const std::string& param, const std::vector<double>& scales,
                                    int n, const SensitivityOptions& opts) {
  const int idx = mech.parameter_index(param);
  const int tip = tip_output(mech);
  const auto one = std::find(scales.begin(), scales.end(), 1.0);
  if (one == scales.end()) throw Error(ErrorCode::InvalidArgument, "scales must include 1.0");

  SensitivityResult r;
  r.parameter = param;
  r.nominal = mech.parameters()[idx].value;
  r.outcomes.resize(scales.size());
  parallel_for(static_cast<int>(scales.size()), opts.threads,
               [&](int i) { r.outcomes[i] = run_scale(mech, idx, scales[i], n, opts.sweep); });

  const ScaleOutcome& nominal = r.outcomes[static_cast<std::size_t>(one - scales.begin())];
  if (!nominal.trajectory) {
    throw Error(*nominal.error, fmt::format("nominal mechanism does not sweep"), nominal.failed_phase);
  }
  for (auto& o : r.outcomes) o.deviation = o.trajectory ? max_distance(*o.trajectory, *nominal.trajectory, tip) : kInf;

  // Nearest neighbours of 1 on each side.
  const ScaleOutcome* below = nullptr;
  const ScaleOutcome* above = nullptr;
  for (const auto& o : r.outcomes) {
    if (o.scale < 1.0 && (!below || o.scale > below->scale)) below = &o;
    if (o.scale > 1.0 && (!above || o.scale < above->scale)) above = &o;
  }
  if (!below && !above) {
    r.score = 0.0;
    return r;
  }
  const ScaleOutcome& lo = below ? *below : nominal;
  const ScaleOutcome& hi = above ? *above : nominal;
  if (!lo.trajectory || !hi.trajectory) {
    r.score = kInf;
  } else {
    r.score = max_distance(*hi.trajectory, *lo.trajectory, tip) / ((hi.scale - lo.scale) * 100.0);
  }
  return r;
}

std::vector<RankEntry> sensitivity_rank(const Mechanism& mech, double delta, int n, const SensitivityOptions& opts) {
  if (!(delta > 0.0 && delta <= 0.1)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 0.1]");
  const auto& params = mech.parameters();
  std::vector<RankEntry> out(params.size());
  SensitivityOptions inner = opts;
  inner.threads = 1;
  parallel_for(static_cast<int>(params.size()), opts.threads, [&](int i) {
    const SensitivityResult r = sensitivity_sweep(mech, params[i].name, {1.0 - delta, 1.0, 1.0 + delta}, n, inner);
    out[i] = {params[i].name, r.score};
  });
  std::sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.parameter < b.parameter;
  });
  return out;
}

std::vector<double> scale_range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "scale range needs lo <= hi and step > 0");
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= count; ++i) {
    double s = lo + i * step;
    // Snap to the step grid so 1.0 comes out exact.
    s = std::round(s / step) * step;
    if (std::abs(s - 1.0) < 1e-12) s = 1.0;
    out.push_back(s);
  }
  if (std::find(out.begin(), out.end(), 1.0) == out.end()) {
    out.insert(std::upper_bound(out.begin(), out.end(), 1.0), 1.0);
  }
  return out;
}

}  // namespace flapkin
