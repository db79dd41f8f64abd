#include <benchmark/benchmark.h>

#include "cfbeam/baselines.hpp"
#include "cfbeam/consensus.hpp"

using namespace cfbeam;

namespace {

ScenarioConfig default_config(int elems) {
  ScenarioConfig cfg;
  cfg.num_bs = 4;
  cfg.num_irs = 1;
  cfg.num_ue = 4;
  cfg.num_tx = 8;
  cfg.elems_per_irs = elems;
  return cfg;
}

void BM_GenerateScenario(benchmark::State& state) {
  const ScenarioConfig cfg = default_config(static_cast<int>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto pair = generate_scenario(cfg, seed++);
    benchmark::DoNotOptimize(pair.second.direct[0][0]);
  }
}
BENCHMARK(BM_GenerateScenario)->Arg(16)->Arg(64)->Arg(128);

void BM_MmSolve(benchmark::State& state) {
  const ScenarioConfig cfg = default_config(static_cast<int>(state.range(0)));
  const auto [scn, ch] = generate_scenario(cfg, 7);
  const ConsensusGraph g = build_ring(scn.num_bs);
  AdmmOptions opts;
  BeamState st = initial_state(scn, ch, g, opts);
  CrossTerms ct = compute_cross_terms(scn, ch, st);
  st.gamma = update_gamma(ct, scn.noise_power);
  st.xi = update_xi(ct, st.gamma, scn.weights, scn.noise_power);
  const CrossTerms own = own_cross_terms(scn, ch, 0, st.w[0], st.theta[0]);
  const CMat others = (ct.phi - own.phi) + (ct.psi - own.psi);
  const CVec t = consensus_residual(g, st.theta);
  const CVec pen = incidence_adjoint(
      g, 0, t - apply_incidence(g, 0, st.theta[0]) + st.lambda / st.rho);
  const QuadraticForm qf = assemble_quadratic(
      0, scn, ch, st.w[0], st.gamma, st.xi, others, pen, g.degree(0), st.rho);
  for (auto _ : state) {
    CVec theta = solve_theta_b(st.theta[0], qf, opts.mm_iters, opts.mm_tol);
    benchmark::DoNotOptimize(theta);
  }
}
BENCHMARK(BM_MmSolve)->Arg(16)->Arg(64)->Arg(128);

void BM_AdmmVisit(benchmark::State& state) {
  const ScenarioConfig cfg = default_config(static_cast<int>(state.range(0)));
  const auto [scn, ch] = generate_scenario(cfg, 9);
  const ConsensusGraph g = build_ring(scn.num_bs);
  AdmmOptions opts;
  BeamState st = initial_state(scn, ch, g, opts);
  BackhaulMessage msg = initial_message(scn, ch, g, st);
  int visit = 0;
  for (auto _ : state) {
    admm_visit(visit++ % scn.num_bs, scn, ch, g, opts, st, msg);
    benchmark::DoNotOptimize(msg.t);
  }
}
BENCHMARK(BM_AdmmVisit)->Arg(16)->Arg(64);

void BM_CentralizedRound(benchmark::State& state) {
  const ScenarioConfig cfg = default_config(16);
  const auto [scn, ch] = generate_scenario(cfg, 11);
  AdmmOptions opts;
  opts.max_rounds = 1;
  opts.rate_tol = 0.0;
  for (auto _ : state) {
    auto res = solve_centralized(scn, ch, opts);
    benchmark::DoNotOptimize(res.state.w[0][0]);
  }
}
BENCHMARK(BM_CentralizedRound);

}  // namespace

BENCHMARK_MAIN();
