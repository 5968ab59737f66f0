#include "flapkin/report_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>

namespace flapkin {

namespace {

using ojson = nlohmann::ordered_json;

// JSON has no infinities; they are written as null.
ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson to_json(const FitReport& r) {
  ojson j;
  j["stage"] = r.stage;
  j["initial_cost_deg2"] = num(r.initial_cost);
  j["final_cost_deg2"] = num(r.final_cost);
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["winner"] = r.winner;
  j["max_violation"] = num(r.max_violation);
  j["budget_exhausted"] = r.budget_exhausted;
  j["warnings"] = r.warnings;
  ojson hist = ojson::array();
  for (double v : r.incumbent_history) hist.push_back(num(v));
  j["incumbent_history"] = std::move(hist);
  ojson starts = ojson::array();
  for (const auto& s : r.starts) {
    starts.push_back({{"index", s.index},
                      {"initial_cost_deg2", num(s.initial_cost)},
                      {"final_cost_deg2", num(s.final_cost)},
                      {"violation", num(s.violation)},
                      {"feasible", s.feasible},
                      {"iterations", s.iterations},
                      {"evaluations", s.evaluations}});
  }
  j["starts"] = std::move(starts);
  ojson design = ojson::array();
  for (std::size_t i = 0; i < r.design.size(); ++i) {
    design.push_back({{"name", r.design.names[i]},
                      {"value", r.design.values[i]},
                      {"min", r.design.lower[i]},
                      {"max", r.design.upper[i]},
                      {"stage", std::string(to_string(r.design.stages[i]))}});
  }
  j["design"] = std::move(design);
  ojson cons = ojson::array();
  for (std::size_t i = 0; i < r.constraints.values.size(); ++i) {
    cons.push_back({{"name", r.constraints.names[i]}, {"value", num(r.constraints.values[i])}});
  }
  j["constraints"] = std::move(cons);
  ojson stages = ojson::array();
  for (const auto& s : r.stages) stages.push_back(to_json(s));
  j["stages"] = std::move(stages);
  return j;
}

}  // namespace

std::string format_fit_report(const FitReport& report) { return to_json(report).dump(2) + "\n"; }

std::string format_ranking_csv(const std::vector<RankEntry>& ranking) {
  std::string out = "parameter,score_mm_per_pct\n";
  for (const auto& e : ranking) out += fmt::format("{},{:.9g}\n", e.parameter, e.score);
  return out;
}

std::string format_sensitivity_csv(const SensitivityResult& result) {
  std::string out = "scale,status,failed_phi_deg,max_tip_deviation_mm\n";
  for (const auto& o : result.outcomes) {
    if (o.trajectory) {
      out += fmt::format("{:.12g},ok,,{:.9g}\n", o.scale, o.deviation);
    } else {
      out += fmt::format("{:.12g},{},{},\n", o.scale, to_string(*o.error),
                         o.failed_phase ? fmt::format("{:.9g}", rad_to_deg(*o.failed_phase)) : std::string());
    }
  }
  return out;
}

}  // namespace flapkin
