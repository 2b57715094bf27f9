// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the solver pipeline. Shapes follow the smaller
// benchmark instances; run with --benchmark_min_time=... to tighten.
#include "ipg/brute_force.hpp"
#include "ipg/kpg.hpp"
#include "ipg/master.hpp"
#include "ipg/nfg.hpp"
#include "ipg/oracle.hpp"
#include "ipg/qipg.hpp"

#include <benchmark/benchmark.h>

using namespace ipg;

namespace {

KpgInstance kpg_instance(int n, int m) { return generate_kpg(n, m, 'C', 0.5, 1234); }

void BM_lift_build(benchmark::State &state) {
  GameInstance g = build_kpg(kpg_instance(2, static_cast<int>(state.range(0))));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_lifted_model(g));
}
BENCHMARK(BM_lift_build)->Arg(25)->Arg(50)->Arg(100);

void BM_milp_master_solve(benchmark::State &state) {
  GameInstance g = build_kpg(kpg_instance(2, static_cast<int>(state.range(0))));
  LiftedModel lift = build_lifted_model(g);
  for (auto _ : state) {
    SolverModel model = lift.instantiate();
    std::vector<Rational> obj(lift.num_cols(), Rational(0));
    for (const auto &[col, c] : lift.welfare_expr().terms)
      obj[col] += c;
    model.set_objective(g.sense(), std::move(obj));
    benchmark::DoNotOptimize(model.solve(-1));
  }
}
BENCHMARK(BM_milp_master_solve)->Arg(25)->Arg(50);

void BM_oracle_separate(benchmark::State &state) {
  GameInstance g = build_kpg(kpg_instance(2, 25));
  LiftedModel lift = build_lifted_model(g);
  SeparationOracle oracle(lift);
  StrategyProfile p{{std::vector<std::int64_t>(25, 0), std::vector<std::int64_t>(25, 0)}};
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle.separate(p));
}
BENCHMARK(BM_oracle_separate);

void BM_select_kpg(benchmark::State &state) {
  KpgInstance inst = kpg_instance(2, static_cast<int>(state.range(0)));
  GameInstance g = build_kpg(inst);
  for (auto _ : state) {
    LiftedModel lift = build_lifted_model(g);
    SolveConfig cfg;
    cfg.strategic_pool = strategic_cuts(inst, lift);
    benchmark::DoNotOptimize(select_best_pne(lift, cfg));
  }
}
BENCHMARK(BM_select_kpg)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_select_nfg_grid(benchmark::State &state) {
  NfgGame nfg = build_nfg(generate_grid(static_cast<int>(state.range(0)), 50));
  for (auto _ : state) {
    LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
    benchmark::DoNotOptimize(select_best_pne(lift));
  }
}
BENCHMARK(BM_select_nfg_grid)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_enumerate_qipg(benchmark::State &state) {
  GameInstance g = build_qipg(generate_qipg(2, 2, 0, 3, false, 55));
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_pnes(g));
}
BENCHMARK(BM_enumerate_qipg)->Unit(benchmark::kMillisecond);

void BM_brute_force(benchmark::State &state) {
  GameInstance g = build_kpg(kpg_instance(2, static_cast<int>(state.range(0))));
  for (auto _ : state)
    benchmark::DoNotOptimize(all_pnes(g));
}
BENCHMARK(BM_brute_force)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
