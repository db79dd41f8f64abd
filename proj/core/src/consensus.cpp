#include "cfbeam/consensus.hpp"

#include <fstream>

#include "cfbeam/baselines.hpp"

namespace cfbeam {

ConsensusGraph build_ring(int num_bs) {
  if (num_bs < 1) throw std::invalid_argument("build_ring: need at least one BS");
  ConsensusGraph g;
  g.num_nodes = num_bs;
  if (num_bs == 1) return g;
  for (int b = 0; b < num_bs; ++b) g.edges.emplace_back(b, (b + 1) % num_bs);
  return g;
}

CVec apply_incidence(const ConsensusGraph& g, int b, const CVec& theta_b) {
  const int nr = static_cast<int>(theta_b.size());
  CVec out = CVec::Zero(static_cast<Eigen::Index>(nr) * g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    if (g.edges[e].first == b) out.segment(e * nr, nr) += theta_b;
    if (g.edges[e].second == b) out.segment(e * nr, nr) -= theta_b;
  }
  return out;
}

CVec incidence_adjoint(const ConsensusGraph& g, int b, const CVec& y) {
  const int nr = g.num_edges() ? static_cast<int>(y.size()) / g.num_edges() : 0;
  CVec out = CVec::Zero(nr);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (g.edges[e].first == b) out += y.segment(e * nr, nr);
    if (g.edges[e].second == b) out -= y.segment(e * nr, nr);
  }
  return out;
}

CVec consensus_residual(const ConsensusGraph& g, const std::vector<CVec>& thetas) {
  const int nr = thetas.empty() ? 0 : static_cast<int>(thetas[0].size());
  CVec t = CVec::Zero(static_cast<Eigen::Index>(nr) * g.num_edges());
  for (int b = 0; b < g.num_nodes; ++b) t += apply_incidence(g, b, thetas[b]);
  return t;
}

double augmented_lagrangian(const Scenario& scn, const ChannelSet& ch,
                            const ConsensusGraph& g, const BeamState& state) {
  const CrossTerms ct = compute_cross_terms(scn, ch, state);
  double value = fp_objective(scn, ct, state.gamma, state.xi);
  if (g.num_edges() > 0 && state.rho > 0.0) {
    const CVec t = consensus_residual(g, state.theta);
    value += 0.5 * state.rho * (t + state.lambda / state.rho).squaredNorm();
  }
  return value;
}

BeamState initial_state(const Scenario& scn, const ChannelSet& ch,
                        const ConsensusGraph& g, const AdmmOptions& opts) {
  const int nr = scn.reflect_dim();
  BeamState state;
  state.rho = opts.rho;
  state.gamma = RVec::Zero(scn.num_ue);
  state.xi = CVec::Zero(scn.num_ue);
  state.mu = RVec::Zero(scn.num_bs);
  state.lambda = CVec::Zero(static_cast<Eigen::Index>(nr) * g.num_edges());

  Rng rng(Rng::derive(scn.seed, 17));
  CVec theta0(nr);
  for (int i = 0; i < nr; ++i) {
    theta0(i) = std::polar(1.0, 2.0 * M_PI * rng.uniform_half_open());
  }
  if (opts.phase_bits > 0 && nr > 0) theta0 = project_discrete(theta0, opts.phase_bits);
  state.theta.assign(scn.num_bs, theta0);

  state.w = mrt(scn, ch, theta0);
  return state;
}

BackhaulMessage initial_message(const Scenario& scn, const ChannelSet& ch,
                                const ConsensusGraph& g, const BeamState& state) {
  BackhaulMessage msg;
  msg.t = consensus_residual(g, state.theta);
  const CrossTerms ct = compute_cross_terms(scn, ch, state);
  msg.phi = ct.phi;
  msg.psi = ct.psi;
  msg.symbol_count = 2LL * scn.num_ue * scn.num_ue +
                     static_cast<long long>(scn.reflect_dim()) * g.num_edges();
  return msg;
}

void update_lambda(CVec& lambda, double rho, const CVec& residual) {
  lambda += rho * residual;
}

void admm_visit(int b, const Scenario& scn, const ChannelSet& ch,
                const ConsensusGraph& g, const AdmmOptions& opts,
                BeamState& state, BackhaulMessage& msg) {
  const CVec t_check = consensus_residual(g, state.theta);
  if ((t_check - msg.t).norm() > 1e-6 * (1.0 + msg.t.norm())) {
    throw ProtocolDesync("admm_visit: message residual disagrees with local state");
  }

  // strip own contributions from the token
  const CVec t_excl = msg.t - apply_incidence(g, b, state.theta[b]);
  const CrossTerms own_old = own_cross_terms(scn, ch, b, state.w[b], state.theta[b]);
  const CMat phi_bar = msg.phi - own_old.phi;
  const CMat psi_bar = msg.psi - own_old.psi;

  CrossTerms full{msg.phi, msg.psi};
  state.gamma = update_gamma(full, scn.noise_power);
  state.xi = update_xi(full, state.gamma, scn.weights, scn.noise_power);

  const CMat others = phi_bar + psi_bar;
  WUpdate wu = update_w_b(b, scn, ch, state.theta[b], state.gamma, state.xi, others);
  state.w[b] = std::move(wu.w);
  state.mu(b) = wu.mu;

  if (scn.reflect_dim() > 0) {
    const CVec penalty_vec =
        g.num_edges() > 0
            ? incidence_adjoint(g, b, t_excl + state.lambda / opts.rho)
            : CVec::Zero(scn.reflect_dim());
    const QuadraticForm qf =
        assemble_quadratic(b, scn, ch, state.w[b], state.gamma, state.xi, others,
                           penalty_vec, g.degree(b), opts.rho);
    CVec theta_new = solve_theta_b(state.theta[b], qf, opts.mm_iters, opts.mm_tol);
    if (opts.phase_bits > 0) theta_new = project_discrete(theta_new, opts.phase_bits);
    state.theta[b] = theta_new;
  }

  msg.t = t_excl + apply_incidence(g, b, state.theta[b]);

  const CrossTerms own_new = own_cross_terms(scn, ch, b, state.w[b], state.theta[b]);
  msg.phi = phi_bar + own_new.phi;
  msg.psi = psi_bar + own_new.psi;
}

DecentralizedResult run_decentralized(const Scenario& scn, const ChannelSet& ch,
                                      const AdmmOptions& opts) {
  const ConsensusGraph g = build_ring(scn.num_bs);
  DecentralizedResult result;
  result.state = initial_state(scn, ch, g, opts);
  if (opts.max_rounds == 0) return result;

  BackhaulMessage msg = initial_message(scn, ch, g, result.state);
  const auto t0 = std::chrono::steady_clock::now();
  long long cum_symbols = 0;
  int visit = 0;
  double prev_rate = weighted_sum_rate(scn, CrossTerms{msg.phi, msg.psi});
  const double res_scale =
      std::sqrt(std::max<double>(1, scn.reflect_dim() * g.num_edges()));

  for (int round = 0; round < opts.max_rounds; ++round) {
    for (int b = 0; b < scn.num_bs; ++b, ++visit) {
      admm_visit(b, scn, ch, g, opts, result.state, msg);
      cum_symbols += msg.symbol_count;

      TraceRecord rec;
      rec.visit = visit;
      rec.round = round;
      rec.bs = b;
      rec.sum_rate_bits = weighted_sum_rate(scn, CrossTerms{msg.phi, msg.psi});
      rec.lagrangian = augmented_lagrangian(scn, ch, g, result.state);
      rec.residual = msg.t.norm();
      double disagreement = 0.0;
      for (int i = 0; i < scn.num_bs; ++i) {
        for (int j = i + 1; j < scn.num_bs; ++j) {
          const CVec diff = result.state.theta[i] - result.state.theta[j];
          if (diff.size() > 0) {
            disagreement = std::max(disagreement, diff.cwiseAbs().maxCoeff());
          }
        }
      }
      rec.max_phase_disagreement = disagreement;
      rec.cum_symbols = cum_symbols;
      rec.wall_clock_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      result.trace.records.push_back(rec);
    }
    // One dual ascent step per full ring pass; stepping the dual at every
    // visit compounds to a B-times-too-large step per round and oscillates.
    update_lambda(result.state.lambda, opts.rho, msg.t);
    result.trace.rounds_completed = round + 1;

    const double rate = result.trace.records.back().sum_rate_bits;
    const bool rate_ok =
        std::abs(rate - prev_rate) <= opts.rate_tol * (1.0 + std::abs(rate));
    const bool res_ok = msg.t.norm() / res_scale < opts.residual_tol;
    prev_rate = rate;
    if (rate_ok && res_ok) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

void ConvergenceTrace::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("trace: cannot open " + path);
  os.precision(12);
  os << "visit,round,bs,sum_rate_bits,lagrangian,residual,"
        "max_phase_disagreement,cum_symbols\n";
  for (const auto& r : records) {
    os << r.visit << ',' << r.round << ',' << r.bs << ',' << r.sum_rate_bits
       << ',' << r.lagrangian << ',' << r.residual << ','
       << r.max_phase_disagreement << ',' << r.cum_symbols << '\n';
  }
}

}  // namespace cfbeam
