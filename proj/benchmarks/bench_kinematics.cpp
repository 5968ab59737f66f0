#include "flapkin/fitting.hpp"
#include "flapkin/fourbar.hpp"
#include "flapkin/gait.hpp"
#include "flapkin/mechanism_io.hpp"
#include "flapkin/solver.hpp"
#include "flapkin/target.hpp"

#include <benchmark/benchmark.h>

#include <string>

namespace {

using namespace flapkin;

const Mechanism& armwing() {
  static const Mechanism m =
      Mechanism::validate(parse_mechanism_file(std::string(FLAPKIN_DATA_DIR) + "/reference_armwing.json"));
  return m;
}

void BM_SolveFourBar(benchmark::State& st) {
  const FourBar fb{5, 2, 6, 4};
  double phi = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(solve_fourbar(fb, phi));
    phi += 0.01;
  }
}
BENCHMARK(BM_SolveFourBar);

void BM_AssembleArmwing(benchmark::State& st) {
  const Mechanism& m = armwing();
  double phi = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(assemble(m, phi));
    phi += 0.01;
  }
}
BENCHMARK(BM_AssembleArmwing);

void BM_SweepArmwing(benchmark::State& st) {
  const Mechanism& m = armwing();
  SweepOptions o;
  o.mode = st.range(1) ? SweepMode::Independent : SweepMode::Continuation;
  for (auto _ : st) benchmark::DoNotOptimize(sweep_gait(m, static_cast<int>(st.range(0)), o));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_SweepArmwing)->Args({72, 0})->Args({360, 0})->Args({360, 1});

void BM_EvaluateDesign(benchmark::State& st) {
  const Mechanism& m = armwing();
  const TargetGait g = sample_targets(360);
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_design(m, g, FitStage::All));
}
BENCHMARK(BM_EvaluateDesign)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
