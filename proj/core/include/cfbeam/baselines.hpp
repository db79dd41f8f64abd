#pragma once

#include "cfbeam/consensus.hpp"

namespace cfbeam {

// Matched-filter beamformers w_{b,k} = sqrt(P_b/K) hhat / ||hhat|| for a given
// common phase vector. Zero channels get a zero beamformer and their power
// share is re-split among the remaining UEs.
std::vector<std::vector<CVec>> mrt(const Scenario& scn, const ChannelSet& ch,
                                   const CVec& theta);

struct ZfResult {
  std::vector<std::vector<CVec>> w;
  bool rank_deficient = false;
};

// Per-BS zero-forcing with equal power split; requires N_t >= K. Rank-deficient
// local channel matrices fall back to a thresholded pseudo-inverse.
ZfResult local_zf(const Scenario& scn, const ChannelSet& ch, const CVec& theta);

struct CentralizedResult {
  BeamState state; // all theta copies identical
  ConvergenceTrace trace;
};

// Joint FP + MM solver with a single shared phase vector, same block order as
// one decentralized round: gamma, xi, every w_b, then theta.
CentralizedResult solve_centralized(const Scenario& scn, const ChannelSet& ch,
                                    const AdmmOptions& opts);

}  // namespace cfbeam
