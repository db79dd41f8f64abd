#include "cfbeam/fp_core.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

namespace cfbeam {

CrossTerms own_cross_terms(const Scenario& scn, const ChannelSet& ch, int b,
                           const std::vector<CVec>& w_b, const CVec& theta_b) {
  const int k_count = scn.num_ue;
  CrossTerms ct;
  ct.phi = CMat::Zero(k_count, k_count);
  ct.psi = CMat::Zero(k_count, k_count);
  std::vector<CVec> gw(k_count);
  const bool has_irs = scn.reflect_dim() > 0;
  for (int j = 0; j < k_count; ++j) {
    if (has_irs) gw[j] = ch.bs_irs[b] * w_b[j];
  }
  for (int k = 0; k < k_count; ++k) {
    for (int j = 0; j < k_count; ++j) {
      ct.phi(k, j) = ch.direct[b][k].dot(w_b[j]);
      if (has_irs) {
        ct.psi(k, j) = theta_b.dot(ch.irs_ue[k].conjugate().cwiseProduct(gw[j]));
      }
    }
  }
  return ct;
}

CrossTerms compute_cross_terms(const Scenario& scn, const ChannelSet& ch,
                               const BeamState& state) {
  CrossTerms ct;
  ct.phi = CMat::Zero(scn.num_ue, scn.num_ue);
  ct.psi = CMat::Zero(scn.num_ue, scn.num_ue);
  for (int b = 0; b < scn.num_bs; ++b) {
    const CrossTerms own = own_cross_terms(scn, ch, b, state.w[b], state.theta[b]);
    ct.phi += own.phi;
    ct.psi += own.psi;
  }
  return ct;
}

double sinr_from_cross(const CrossTerms& ct, int k, double noise_power) {
  const int k_count = static_cast<int>(ct.phi.rows());
  double interference = 0.0;
  for (int j = 0; j < k_count; ++j) {
    if (j != k) interference += std::norm(ct.total(k, j));
  }
  return std::norm(ct.total(k, k)) / (interference + noise_power);
}

double sinr(int k, const Scenario& scn, const ChannelSet& ch,
            const BeamState& state) {
  return sinr_from_cross(compute_cross_terms(scn, ch, state), k, scn.noise_power);
}

double weighted_sum_rate(const Scenario& scn, const CrossTerms& ct) {
  double rate = 0.0;
  for (int k = 0; k < scn.num_ue; ++k) {
    rate += scn.weights(k) * std::log2(1.0 + sinr_from_cross(ct, k, scn.noise_power));
  }
  return rate;
}

double weighted_sum_rate(const Scenario& scn, const ChannelSet& ch,
                         const BeamState& state) {
  return weighted_sum_rate(scn, compute_cross_terms(scn, ch, state));
}

double fp_objective(const Scenario& scn, const CrossTerms& ct, const RVec& gamma,
                    const CVec& xi) {
  double f = 0.0;
  for (int k = 0; k < scn.num_ue; ++k) {
    double denom = scn.noise_power;
    for (int j = 0; j < scn.num_ue; ++j) denom += std::norm(ct.total(k, j));
    const double wk = scn.weights(k);
    f += std::norm(xi(k)) * denom;
    f -= 2.0 * std::sqrt(wk * (1.0 + gamma(k))) *
         std::real(std::conj(xi(k)) * ct.total(k, k));
    f += wk * (gamma(k) - std::log1p(gamma(k)));
  }
  return f;
}

RVec update_gamma(const CrossTerms& ct, double noise_power) {
  const int k_count = static_cast<int>(ct.phi.rows());
  RVec gamma(k_count);
  for (int k = 0; k < k_count; ++k) gamma(k) = sinr_from_cross(ct, k, noise_power);
  return gamma;
}

CVec update_xi(const CrossTerms& ct, const RVec& gamma, const RVec& omega,
               double noise_power) {
  const int k_count = static_cast<int>(ct.phi.rows());
  CVec xi(k_count);
  for (int k = 0; k < k_count; ++k) {
    double denom = noise_power;
    for (int j = 0; j < k_count; ++j) denom += std::norm(ct.total(k, j));
    xi(k) = std::sqrt((1.0 + gamma(k)) * omega(k)) * ct.total(k, k) / denom;
  }
  return xi;
}

double bisect_mu(const std::function<double(double)>& power_profile,
                 double target, double rel_tol, int max_steps) {
  double lo = 0.0;
  double hi = 1.0;
  while (power_profile(hi) > target) {
    hi *= 2.0;
    if (hi > 1e12) {
      throw std::runtime_error("bisect_mu: bracket exceeded 1e12, ill-conditioned system");
    }
  }
  double mid = hi;
  for (int i = 0; i < max_steps; ++i) {
    mid = 0.5 * (lo + hi);
    const double p = power_profile(mid);
    if (std::abs(p - target) <= rel_tol * target) break;
    if (p > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

WUpdate update_w_b(int b, const Scenario& scn, const ChannelSet& ch,
                   const CVec& theta_b, const RVec& gamma, const CVec& xi,
                   const CMat& others) {
  const int k_count = scn.num_ue;
  const int nt = scn.num_tx;

  std::vector<CVec> hhat(k_count);
  for (int u = 0; u < k_count; ++u) {
    hhat[u] = effective_channel(ch.direct[b][u], ch.irs_ue[u], ch.bs_irs[b], theta_b);
  }
  CMat phi_b = CMat::Zero(nt, nt);
  for (int u = 0; u < k_count; ++u) {
    phi_b.noalias() += std::norm(xi(u)) * hhat[u] * hhat[u].adjoint();
  }
  CMat rhs(nt, k_count);
  for (int k = 0; k < k_count; ++k) {
    CVec r = std::sqrt((1.0 + gamma(k)) * scn.weights(k)) * xi(k) * hhat[k];
    for (int u = 0; u < k_count; ++u) {
      r -= std::norm(xi(u)) * others(u, k) * hhat[u];
    }
    rhs.col(k) = r;
  }

  WUpdate out;
  out.w.assign(k_count, CVec::Zero(nt));
  if (rhs.norm() == 0.0) {
    return out; // degenerate: zero right-hand side, zero beamformer
  }

  auto solve_power = [&](double mu, CMat* sol) {
    CMat a = phi_b;
    a.diagonal().array() += mu;
    const CMat x = a.ldlt().solve(rhs);
    if (sol) *sol = x;
    return x.squaredNorm();
  };

  const double budget = scn.power_budget(b);
  CMat sol;
  const double p0 = solve_power(0.0, &sol);
  double mu = 0.0;
  if (!std::isfinite(p0) || p0 > budget) {
    mu = bisect_mu([&](double m) { return solve_power(m, nullptr); }, budget);
    solve_power(mu, &sol);
  }
  for (int k = 0; k < k_count; ++k) out.w[k] = sol.col(k);
  out.mu = mu;
  return out;
}

}  // namespace cfbeam
