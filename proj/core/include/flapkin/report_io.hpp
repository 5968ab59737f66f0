#pragma once

#include "flapkin/fitting.hpp"
#include "flapkin/sensitivity.hpp"

#include <string>
#include <vector>

namespace flapkin {

/// Deterministic JSON rendering of a fit report (nested stages included).
std::string format_fit_report(const FitReport& report);

/// "parameter,score" rows, highest first.
std::string format_ranking_csv(const std::vector<RankEntry>& ranking);

/// Per-scale deviation table of one sensitivity sweep.
std::string format_sensitivity_csv(const SensitivityResult& result);

}  // namespace flapkin
