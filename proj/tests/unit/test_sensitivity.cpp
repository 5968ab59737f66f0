#include "flapkin/errors.hpp"
#include "flapkin/report_io.hpp"
#include "flapkin/sensitivity.hpp"
#include "flapkin/svg.hpp"

#include "golden.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace flapkin {
namespace {

using test::fourbar_mechanism;
using test::load_data;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no throw";
  return ErrorCode::InvalidArgument;
}

std::set<std::string> top3(const std::vector<RankEntry>& r) {
  std::set<std::string> s;
  for (std::size_t i = 0; i < 3 && i < r.size(); ++i) s.insert(r[i].parameter);
  return s;
}

TEST(Sensitivity, NominalOnlyIsExactlyZero) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto r = sensitivity_sweep(m, "coupler4.length", {1.0}, 72);
  ASSERT_EQ(r.outcomes.size(), 1u);
  ASSERT_TRUE(r.outcomes[0].trajectory);
  EXPECT_EQ(r.outcomes[0].deviation, 0.0);
  EXPECT_EQ(r.score, 0.0);
}

TEST(Sensitivity, DeviationMatchesTrajectories) {
  const Mechanism m = fourbar_mechanism({5, 2, 6, 4});
  const auto r = sensitivity_sweep(m, "coupler.length", {0.98, 1.0, 1.02}, 90);
  ASSERT_EQ(r.outcomes.size(), 3u);
  const auto& nom = *r.outcomes[1].trajectory;
  for (const auto& o : r.outcomes) {
    ASSERT_TRUE(o.trajectory);
    double worst = 0.0;
    for (std::size_t k = 0; k < nom.size(); ++k) worst = std::max(worst, (o.trajectory->wingtip[k] - nom.wingtip[k]).norm());
    EXPECT_DOUBLE_EQ(o.deviation, worst);
  }
  // central difference: the two perturbed paths against each other, over 4%
  double across = 0.0;
  for (std::size_t k = 0; k < nom.size(); ++k)
    across = std::max(across, (r.outcomes[2].trajectory->wingtip[k] - r.outcomes[0].trajectory->wingtip[k]).norm());
  EXPECT_NEAR(r.score, across / 4.0, 1e-12);
  EXPECT_GT(r.score, 0.0);
}

TEST(Sensitivity, FailedScaleKeepsPhase) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto r = sensitivity_sweep(m, "coupler2.length", {1.0, 1.05}, 360);
  ASSERT_FALSE(r.outcomes[1].trajectory);
  ASSERT_TRUE(r.outcomes[1].error);
  EXPECT_EQ(*r.outcomes[1].error, ErrorCode::NotAssemblable);
  ASSERT_TRUE(r.outcomes[1].failed_phase);
  EXPECT_TRUE(std::isinf(r.score));
}

TEST(Rank, FourBarCoversEveryParameter) {
  const Mechanism m = fourbar_mechanism({5, 2, 6, 4});
  const auto r = sensitivity_rank(m, 0.02, 72);
  ASSERT_EQ(r.size(), m.design_parameters().size());
  std::set<std::string> names;
  for (const auto& e : r) {
    names.insert(e.parameter);
    EXPECT_GT(e.score, 0.0) << e.parameter;
  }
  EXPECT_EQ(names.size(), r.size());
}

TEST(Rank, DanglingParametersScoreZeroAndSortLast) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto r = sensitivity_rank(m, 0.025, 360);
  ASSERT_EQ(r.size(), m.design_parameters().size());
  const std::vector<std::string> tail = {r[r.size() - 3].parameter, r[r.size() - 2].parameter, r.back().parameter};
  EXPECT_EQ(tail, (std::vector<std::string>{"crank.length", "crank.pin_a.u", "frame.length"}));
  for (std::size_t i = r.size() - 3; i < r.size(); ++i) EXPECT_EQ(r[i].score, 0.0);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GE(r[i - 1].score, r[i].score);
}

TEST(Rank, TopThreeStableAcrossStep) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto a = sensitivity_rank(m, 0.01, 360), b = sensitivity_rank(m, 0.025, 360);
  EXPECT_EQ(top3(a), top3(b));
}

TEST(Rank, HighAndLowSensitivitySplit) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto r = sensitivity_rank(m, 0.025, 360);
  double hi = 0.0, lo = INFINITY;
  for (const auto& e : r) {
    if (e.score > 0.0 && std::isfinite(e.score)) {
      hi = std::max(hi, e.score);
      lo = std::min(lo, e.score);
    }
  }
  EXPECT_GE(hi / lo, 5.0);
}

TEST(Rank, CouplerFamilyWiderThanHandFamily) {
  // coupler2 drives the humerus amplifier, the hand link only the tip offset
  const Mechanism m = load_data("reference_armwing.json");
  const std::vector<double> scales = {0.95, 0.975, 1.0, 1.025};
  const auto wide = sensitivity_sweep(m, "coupler2.length", scales, 360);
  const auto narrow = sensitivity_sweep(m, "hand.length", scales, 360);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] == 1.0) continue;
    EXPECT_GT(wide.outcomes[i].deviation, 5.0 * narrow.outcomes[i].deviation) << scales[i];
  }
}

TEST(Rank, ScoreRoughlyHomogeneousInStep) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto a = sensitivity_rank(m, 0.01, 360), b = sensitivity_rank(m, 0.02, 360);
  int checked = 0;
  for (const auto& e : a) {
    if (!(e.score > 0.0) || !std::isfinite(e.score)) continue;
    const auto it = std::find_if(b.begin(), b.end(), [&](const RankEntry& x) { return x.parameter == e.parameter; });
    ASSERT_NE(it, b.end());
    if (!std::isfinite(it->score)) continue;
    const double ratio = it->score / e.score;
    EXPECT_GE(ratio, 0.5) << e.parameter;
    EXPECT_LE(ratio, 2.0) << e.parameter;
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Rank, GoldenCsv) {
  const Mechanism m = load_data("reference_armwing.json");
  test::expect_golden("armwing_ranking.csv", format_ranking_csv(sensitivity_rank(m, 0.025, 360)));
}

TEST(Sensitivity, GoldenFamilySvg) {
  const Mechanism m = load_data("reference_armwing.json");
  const auto r = sensitivity_sweep(m, "coupler2.length", scale_range(0.95, 1.025, 0.025), 360);
  test::expect_golden("coupler2_family.svg", render_svg(sensitivity_plot(r)));
}

TEST(Sensitivity, ScaleRange) {
  const auto s = scale_range(0.9, 1.1, 0.05);
  EXPECT_EQ(s.size(), 5u);
  EXPECT_EQ(std::count(s.begin(), s.end(), 1.0), 1);
  const auto t = scale_range(1.05, 1.2, 0.05);
  EXPECT_EQ(t.front(), 1.0);
}

TEST(Sensitivity, Errors) {
  const Mechanism m = fourbar_mechanism({5, 2, 6, 4});
  EXPECT_EQ(code_of([&] { sensitivity_sweep(m, "nope.length", {1.0}, 72); }), ErrorCode::UnknownParameter);
  EXPECT_EQ(code_of([&] { sensitivity_sweep(m, "coupler.length", {0.9, 1.1}, 72); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { sensitivity_rank(m, 0.0, 72); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { sensitivity_rank(m, 0.2, 72); }), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace flapkin
