#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

#include "cfbeam/irs_opt.hpp"

namespace cfbeam {

// Undirected BS graph realizing the consensus operators A_b: edge e = (b, l)
// contributes block row theta_b - theta_l to t = sum_b A_b theta_b.
struct ConsensusGraph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;

  int num_edges() const { return static_cast<int>(edges.size()); }
  int degree(int b) const {
    int d = 0;
    for (const auto& [u, v] : edges) d += (u == b) + (v == b);
    return d;
  }
};

// Ring over B BSs; for B=2 the 2-cycle {(0,1),(1,0)}. B=1 yields an edgeless
// graph (no consensus coupling).
ConsensusGraph build_ring(int num_bs);

// A_b theta_b, stacked by edge block.
CVec apply_incidence(const ConsensusGraph& g, int b, const CVec& theta_b);

// A_b^H y for an edge-stacked vector y.
CVec incidence_adjoint(const ConsensusGraph& g, int b, const CVec& y);

CVec consensus_residual(const ConsensusGraph& g, const std::vector<CVec>& thetas);

// The token passed between consecutive BSs: running residual t plus the two
// K x K cross-term matrices.
struct BackhaulMessage {
  CVec t;
  CMat phi;
  CMat psi;
  long long symbol_count = 0; // symbols in one message: 2K^2 + NR|E|
};

struct ProtocolDesync : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdmmOptions {
  double rho = 1.0;
  int max_rounds = 200;
  double rate_tol = 5e-4;     // relative sum-rate change over one round
  double residual_tol = 1e-3; // normalized consensus residual
  int phase_bits = 0;         // 0 = continuous
  int mm_iters = 20;
  double mm_tol = 1e-6;
};

struct TraceRecord {
  int visit = 0;
  int round = 0;
  int bs = 0;
  double sum_rate_bits = 0.0;
  double lagrangian = 0.0;
  double residual = 0.0;
  double max_phase_disagreement = 0.0;
  long long cum_symbols = 0;
  double wall_clock_s = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  int rounds_completed = 0;
  bool converged = false;

  void write_csv(const std::string& path) const;
};

// Augmented Lagrangian value: surrogate plus the scaled consensus penalty
// (power terms vanish by complementary slackness at the points we evaluate).
double augmented_lagrangian(const Scenario& scn, const ChannelSet& ch,
                            const ConsensusGraph& g, const BeamState& state);

// Deterministic initialization: shared random-phase theta, MRT warm start,
// zero duals.
BeamState initial_state(const Scenario& scn, const ChannelSet& ch,
                        const ConsensusGraph& g, const AdmmOptions& opts);

BackhaulMessage initial_message(const Scenario& scn, const ChannelSet& ch,
                                const ConsensusGraph& g, const BeamState& state);

// One token visit at BS b: strip own contributions, run the closed-form
// gamma/xi/w updates and the MM phase solve, refresh the dual, re-add own
// contributions. Mutates state and msg in place.
void admm_visit(int b, const Scenario& scn, const ChannelSet& ch,
                const ConsensusGraph& g, const AdmmOptions& opts,
                BeamState& state, BackhaulMessage& msg);

void update_lambda(CVec& lambda, double rho, const CVec& residual);

struct DecentralizedResult {
  BeamState state;
  ConvergenceTrace trace;
};

DecentralizedResult run_decentralized(const Scenario& scn, const ChannelSet& ch,
                                      const AdmmOptions& opts);

}  // namespace cfbeam
