#pragma once

#include <functional>
#include <vector>

#include "cfbeam/channel.hpp"

namespace cfbeam {

// Full optimization state. theta[b] is BS b's local copy of the stacked IRS
// phase vector; lambda is the consensus dual over the edge blocks.
struct BeamState {
  std::vector<std::vector<CVec>> w; // [b][k], length N_t
  std::vector<CVec> theta;          // [b], length NR, unit modulus
  RVec gamma;                       // K
  CVec xi;                          // K
  CVec lambda;                      // NR * |E|
  RVec mu;                          // B
  double rho = 1.0;
};

// phi(k,j) = sum_b h_{b,k}^H w_{b,j}; psi(k,j) = sum_b theta_b^H V_k^H G_b w_{b,j}.
struct CrossTerms {
  CMat phi;
  CMat psi;

  std::complex<double> total(int k, int j) const { return phi(k, j) + psi(k, j); }
};

CrossTerms compute_cross_terms(const Scenario& scn, const ChannelSet& ch,
                               const BeamState& state);

// Per-BS contribution of b to (phi, psi), used by the incremental protocol.
CrossTerms own_cross_terms(const Scenario& scn, const ChannelSet& ch, int b,
                           const std::vector<CVec>& w_b, const CVec& theta_b);

double sinr_from_cross(const CrossTerms& ct, int k, double noise_power);
double sinr(int k, const Scenario& scn, const ChannelSet& ch, const BeamState& state);

// Reported in bits: sum_k omega_k log2(1 + SINR_k).
double weighted_sum_rate(const Scenario& scn, const CrossTerms& ct);
double weighted_sum_rate(const Scenario& scn, const ChannelSet& ch,
                         const BeamState& state);

// FP surrogate (natural log internally). After the gamma and xi closed-form
// updates this equals -sum_k omega_k ln(1 + SINR_k).
double fp_objective(const Scenario& scn, const CrossTerms& ct, const RVec& gamma,
                    const CVec& xi);

RVec update_gamma(const CrossTerms& ct, double noise_power);

CVec update_xi(const CrossTerms& ct, const RVec& gamma, const RVec& omega,
               double noise_power);

struct WUpdate {
  std::vector<CVec> w; // new beamformers of the visited BS
  double mu = 0.0;
};

// Closed-form w-update at BS b from first-order optimality; `others(u,k)` is
// the cross term sum_{l != b} hhat_{l,u}^H w_{l,k} held fixed during the solve.
// Power budget enforced through the bisected dual mu.
WUpdate update_w_b(int b, const Scenario& scn, const ChannelSet& ch,
                   const CVec& theta_b, const RVec& gamma, const CVec& xi,
                   const CMat& others);

// Finds mu >= 0 with power_profile(mu) = target, power_profile strictly
// decreasing. Bracket grown geometrically, then bisected.
double bisect_mu(const std::function<double(double)>& power_profile,
                 double target, double rel_tol = 1e-8, int max_steps = 200);

}  // namespace cfbeam
