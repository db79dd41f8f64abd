#include "cfbeam/baselines.hpp"

#include <Eigen/QR>

namespace cfbeam {

std::vector<std::vector<CVec>> mrt(const Scenario& scn, const ChannelSet& ch,
                                   const CVec& theta) {
  std::vector<std::vector<CVec>> w(scn.num_bs,
                                   std::vector<CVec>(scn.num_ue,
                                                     CVec::Zero(scn.num_tx)));
  for (int b = 0; b < scn.num_bs; ++b) {
    std::vector<CVec> hhat(scn.num_ue);
    int nonzero = 0;
    for (int k = 0; k < scn.num_ue; ++k) {
      hhat[k] = effective_channel(ch.direct[b][k], ch.irs_ue[k], ch.bs_irs[b], theta);
      if (hhat[k].norm() > 0.0) ++nonzero;
    }
    if (nonzero == 0) continue;
    const double share = std::sqrt(scn.power_budget(b) / nonzero);
    for (int k = 0; k < scn.num_ue; ++k) {
      const double nrm = hhat[k].norm();
      if (nrm > 0.0) w[b][k] = share * hhat[k] / nrm;
    }
  }
  return w;
}

ZfResult local_zf(const Scenario& scn, const ChannelSet& ch, const CVec& theta) {
  if (scn.num_tx < scn.num_ue) {
    throw std::invalid_argument("local_zf: needs N_t >= K");
  }
  ZfResult out;
  out.w.assign(scn.num_bs,
               std::vector<CVec>(scn.num_ue, CVec::Zero(scn.num_tx)));
  for (int b = 0; b < scn.num_bs; ++b) {
    CMat h(scn.num_tx, scn.num_ue);
    for (int k = 0; k < scn.num_ue; ++k) {
      h.col(k) = effective_channel(ch.direct[b][k], ch.irs_ue[k], ch.bs_irs[b], theta);
    }
    // columns of pinv(H^H) satisfy hhat_j^H w_k = delta_{jk} at full rank
    Eigen::CompleteOrthogonalDecomposition<CMat> cod(h.adjoint());
    cod.setThreshold(1e-12);
    if (cod.rank() < scn.num_ue) out.rank_deficient = true;
    const CMat dirs = cod.pseudoInverse();
    const double per_ue = scn.power_budget(b) / scn.num_ue;
    for (int k = 0; k < scn.num_ue; ++k) {
      const double nrm = dirs.col(k).norm();
      if (nrm > 0.0) out.w[b][k] = std::sqrt(per_ue) * dirs.col(k) / nrm;
    }
  }
  return out;
}

CentralizedResult solve_centralized(const Scenario& scn, const ChannelSet& ch,
                                    const AdmmOptions& opts) {
  ConsensusGraph no_edges;
  no_edges.num_nodes = scn.num_bs;
  CentralizedResult result;
  result.state = initial_state(scn, ch, no_edges, opts);
  BeamState& state = result.state;
  if (opts.max_rounds == 0) return result;

  const auto t0 = std::chrono::steady_clock::now();
  CrossTerms ct = compute_cross_terms(scn, ch, state);
  double prev_rate = weighted_sum_rate(scn, ct);

  for (int round = 0; round < opts.max_rounds; ++round) {
    state.gamma = update_gamma(ct, scn.noise_power);
    state.xi = update_xi(ct, state.gamma, scn.weights, scn.noise_power);

    for (int b = 0; b < scn.num_bs; ++b) {
      const CrossTerms own_old =
          own_cross_terms(scn, ch, b, state.w[b], state.theta[b]);
      const CMat others = (ct.phi - own_old.phi) + (ct.psi - own_old.psi);
      WUpdate wu =
          update_w_b(b, scn, ch, state.theta[b], state.gamma, state.xi, others);
      state.w[b] = std::move(wu.w);
      state.mu(b) = wu.mu;
      const CrossTerms own_new =
          own_cross_terms(scn, ch, b, state.w[b], state.theta[b]);
      ct.phi += own_new.phi - own_old.phi;
      ct.psi += own_new.psi - own_old.psi;
    }

    if (scn.reflect_dim() > 0) {
      const QuadraticForm qf = assemble_quadratic_centralized(
          scn, ch, state.w, state.gamma, state.xi, ct.phi);
      CVec theta =
          solve_theta_b(state.theta[0], qf, opts.mm_iters, opts.mm_tol);
      if (opts.phase_bits > 0) theta = project_discrete(theta, opts.phase_bits);
      for (auto& copy : state.theta) copy = theta;
      ct = compute_cross_terms(scn, ch, state);
    }

    TraceRecord rec;
    rec.visit = round;
    rec.round = round;
    rec.bs = -1;
    rec.sum_rate_bits = weighted_sum_rate(scn, ct);
    rec.lagrangian = fp_objective(scn, ct, state.gamma, state.xi);
    rec.residual = 0.0;
    rec.max_phase_disagreement = 0.0;
    rec.cum_symbols = 0;
    rec.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.trace.records.push_back(rec);
    result.trace.rounds_completed = round + 1;

    const double rate = rec.sum_rate_bits;
    if (std::abs(rate - prev_rate) <= opts.rate_tol * (1.0 + std::abs(rate))) {
      result.trace.converged = true;
      break;
    }
    prev_rate = rate;
  }
  return result;
}

}  // namespace cfbeam
