// Command-line front end: Monte-Carlo experiments, single-instance convergence
// traces, parameter sweeps, and a quick self-check of the solver invariants.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "cfbeam/harness.hpp"

namespace {

using namespace cfbeam;

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::uint64_t seed_override, bool has_seed, bool traces) {
  ExperimentConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (has_seed) cfg.master_seed = seed_override;
  const auto rows = run_experiment(cfg, traces);
  write_results(rows, cfg.out_dir);
  std::cout << "wrote " << rows.size() << " result rows to " << cfg.out_dir
            << "/results.csv\n";
  return 0;
}

int cmd_trace(const std::string& config_path, const std::string& out_override,
              std::uint64_t seed_override, bool has_seed) {
  ExperimentConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (has_seed) cfg.master_seed = seed_override;
  std::filesystem::create_directories(cfg.out_dir);

  const std::uint64_t seed = Rng::derive(cfg.master_seed, 0);
  const auto [scn, ch] = generate_scenario(cfg.scenario, seed);
  for (const auto& method : cfg.methods) {
    const std::string path = cfg.out_dir + "/trace_" + method + ".csv";
    if (method == "decentralized" || method == "decentralized-noirs") {
      const ChannelSet use =
          method.ends_with("-noirs") ? without_irs(ch) : ch;
      const auto res = run_decentralized(scn, use, cfg.admm);
      res.trace.write_csv(path);
      std::cout << method << ": " << res.trace.rounds_completed << " rounds, "
                << "final sum-rate "
                << (res.trace.records.empty()
                        ? 0.0
                        : res.trace.records.back().sum_rate_bits)
                << " bits -> " << path << '\n';
    } else if (method == "centralized" || method == "centralized-noirs") {
      const ChannelSet use =
          method.ends_with("-noirs") ? without_irs(ch) : ch;
      const auto res = solve_centralized(scn, use, cfg.admm);
      res.trace.write_csv(path);
      std::cout << method << ": " << res.trace.rounds_completed << " rounds, "
                << "final sum-rate "
                << (res.trace.records.empty()
                        ? 0.0
                        : res.trace.records.back().sum_rate_bits)
                << " bits -> " << path << '\n';
    } else {
      std::cerr << "trace: skipping non-iterative method " << method << '\n';
    }
  }
  return 0;
}

bool check(bool ok, const char* what) {
  std::cout << (ok ? "  ok   " : "  FAIL ") << what << '\n';
  return ok;
}

int cmd_validate(std::uint64_t seed) {
  std::cout << "validate: small-instance solver checks (seed " << seed << ")\n";
  ScenarioConfig cfg;
  cfg.num_bs = 3;
  cfg.num_irs = 1;
  cfg.num_ue = 2;
  cfg.num_tx = 4;
  cfg.elems_per_irs = 4;
  const auto [scn, ch] = generate_scenario(cfg, seed);
  const ConsensusGraph g = build_ring(scn.num_bs);
  AdmmOptions opts;
  opts.max_rounds = 30;

  bool ok = true;
  {
    BeamState st = initial_state(scn, ch, g, opts);
    CrossTerms ct = compute_cross_terms(scn, ch, st);
    st.gamma = update_gamma(ct, scn.noise_power);
    st.xi = update_xi(ct, st.gamma, scn.weights, scn.noise_power);
    double expected = 0.0;
    for (int k = 0; k < scn.num_ue; ++k) {
      expected -= scn.weights(k) * std::log1p(sinr_from_cross(ct, k, scn.noise_power));
    }
    const double f = fp_objective(scn, ct, st.gamma, st.xi);
    ok &= check(std::abs(f - expected) <= 1e-8 * (1.0 + std::abs(expected)),
                "surrogate tightness after gamma/xi updates");
  }
  {
    const auto res = run_decentralized(scn, ch, opts);
    const ConsensusGraph ring = build_ring(scn.num_bs);
    const long long per_round =
        backhaul_symbols(scn.num_bs, scn.num_ue, scn.elems_per_irs, scn.num_irs,
                         ring.num_edges());
    const auto& last = res.trace.records.back();
    ok &= check(last.cum_symbols ==
                    static_cast<long long>(res.trace.rounds_completed) * per_round,
                "backhaul symbol accounting");
    const auto res2 = run_decentralized(scn, ch, opts);
    ok &= check(res2.trace.records.back().sum_rate_bits == last.sum_rate_bits,
                "deterministic replay under fixed seed");
    bool monotone_symbols = true;
    for (size_t i = 1; i < res.trace.records.size(); ++i) {
      monotone_symbols &=
          res.trace.records[i].cum_symbols > res.trace.records[i - 1].cum_symbols;
    }
    ok &= check(monotone_symbols, "monotone cumulative symbol count");
  }
  std::cout << (ok ? "validate: all checks passed\n" : "validate: FAILURES\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized cooperative beamforming simulator for IRS-aided "
               "cell-free networks"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", config_path, "experiment config file");
    if (need_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--seed", seed, "master seed override")
        ->each([&](const std::string&) { has_seed = true; });
  };

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  add_common(run, true);
  bool run_traces = false;
  run->add_flag("--traces", run_traces, "also write per-run trace CSVs");

  auto* trace = app.add_subcommand("trace", "single-instance convergence trace");
  add_common(trace, true);

  auto* sweep = app.add_subcommand("sweep", "parameter sweep with aggregates");
  add_common(sweep, true);

  auto* validate = app.add_subcommand("validate", "run solver self-checks");
  validate->add_option("--seed", seed, "seed for the check instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) {
      return cmd_run(config_path, out_dir, seed, has_seed, run_traces);
    }
    if (app.got_subcommand(trace)) {
      return cmd_trace(config_path, out_dir, seed, has_seed);
    }
    if (app.got_subcommand(sweep)) {
      ExperimentConfig cfg = load_config(config_path);
      if (cfg.sweep_var.empty()) {
        std::cerr << "sweep: config has no sweep variable\n";
        return 2;
      }
      return cmd_run(config_path, out_dir, seed, has_seed, false);
    }
    if (app.got_subcommand(validate)) {
      return cmd_validate(seed ? seed : 7);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
