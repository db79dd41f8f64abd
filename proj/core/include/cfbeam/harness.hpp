#pragma once

#include <map>
#include <optional>
#include <string>

#include "cfbeam/baselines.hpp"

namespace cfbeam {

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<std::string> methods; // decentralized | centralized | mrt | zf
  std::string sweep_var;            // "P_t" | "N_t" | "N" | "K" | ""
  std::vector<double> sweep_values; // empty = single run at the base config
  std::string sweep_var2;           // optional second grid axis
  std::vector<double> sweep_values2;
  int drops = 20;
  std::uint64_t master_seed = 1;
  std::string out_dir = ".";
  AdmmOptions admm;
};

// Plain key=value config file; '#' starts a comment. Recognized keys:
// B, R, K, N, N_t, P_dBm, D, U_bits (count or "continuous"), seed, drops,
// methods, sweep, values, sweep2, values2, out, rho, max_rounds, rate_tol,
// residual_tol.
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::string method;
  double sweep_value = 0.0;
  double sweep_value2 = 0.0;
  int drop = 0;
  double sum_rate_bits = 0.0;
  int rounds = 0;
  long long cum_symbols = 0;
  double wall_clock_s = 0.0;
  std::uint64_t channel_checksum = 0;
};

long long backhaul_symbols(int num_bs, int num_ue, int elems, int num_irs,
                           int num_edges);

// Runs every (sweep value, drop, method) cell on a shared per-drop ChannelSet.
// Drop seeds derive from the master seed by index, so adding drops never
// perturbs earlier ones.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      bool write_traces = false);

// results.csv (deterministic) plus results_timing.csv (wall clock) and
// aggregate.csv (mean and standard error per method and sweep cell).
void write_results(const std::vector<ResultRow>& rows, const std::string& out_dir);

}  // namespace cfbeam
