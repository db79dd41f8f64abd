#include "cfbeam/irs_opt.hpp"

#include <stdexcept>

namespace cfbeam {

double quadratic_value(const QuadraticForm& qf, const CVec& theta) {
  return std::real(theta.dot(qf.z * theta)) - 2.0 * std::real(theta.dot(qf.q));
}

namespace {

// Accumulate sum_{u,m} |xi_u|^2 x_{u,m} x_{u,m}^H and the matching linear
// term into (z, q); d(u,m) is the theta-independent part of the cross term.
void accumulate_terms(const Scenario& scn,
                      const std::function<CVec(int, int)>& x_of,
                      const RVec& gamma, const CVec& xi, const CMat& d,
                      CMat& z, CVec& q) {
  for (int u = 0; u < scn.num_ue; ++u) {
    const double xi2 = std::norm(xi(u));
    for (int m = 0; m < scn.num_ue; ++m) {
      const CVec x = x_of(u, m);
      if (xi2 > 0.0) {
        z.noalias() += xi2 * x * x.adjoint();
        q.noalias() -= xi2 * std::conj(d(u, m)) * x;
      }
      if (u == m) {
        q.noalias() += std::sqrt((1.0 + gamma(u)) * scn.weights(u)) *
                       std::conj(xi(u)) * x;
      }
    }
  }
}

}  // namespace

QuadraticForm assemble_quadratic(int b, const Scenario& scn, const ChannelSet& ch,
                                 const std::vector<CVec>& w_b, const RVec& gamma,
                                 const CVec& xi, const CMat& others,
                                 const CVec& penalty_vec, double degree,
                                 double rho) {
  const int nr = scn.reflect_dim();
  QuadraticForm qf;
  qf.z = CMat::Zero(nr, nr);
  qf.q = CVec::Zero(nr);
  if (nr == 0) return qf;

  std::vector<CVec> gw(scn.num_ue);
  for (int m = 0; m < scn.num_ue; ++m) gw[m] = ch.bs_irs[b] * w_b[m];

  // d(u,m): everything in the cross term except theta_b^H x_{u,m}.
  CMat d(scn.num_ue, scn.num_ue);
  for (int u = 0; u < scn.num_ue; ++u) {
    for (int m = 0; m < scn.num_ue; ++m) {
      d(u, m) = others(u, m) + ch.direct[b][u].dot(w_b[m]);
    }
  }
  auto x_of = [&](int u, int m) -> CVec {
    return ch.irs_ue[u].conjugate().cwiseProduct(gw[m]);
  };
  accumulate_terms(scn, x_of, gamma, xi, d, qf.z, qf.q);

  qf.z.diagonal().array() += 0.5 * rho * degree;
  qf.q.noalias() -= 0.5 * rho * penalty_vec;
  qf.zeta = max_eigenvalue(qf.z);
  return qf;
}

QuadraticForm assemble_quadratic_centralized(const Scenario& scn,
                                             const ChannelSet& ch,
                                             const std::vector<std::vector<CVec>>& w,
                                             const RVec& gamma, const CVec& xi,
                                             const CMat& phi_direct) {
  const int nr = scn.reflect_dim();
  QuadraticForm qf;
  qf.z = CMat::Zero(nr, nr);
  qf.q = CVec::Zero(nr);
  if (nr == 0) return qf;

  // Stacked reflected response of the whole network per (ue, beam) pair.
  std::vector<std::vector<CVec>> x(scn.num_ue,
                                   std::vector<CVec>(scn.num_ue, CVec::Zero(nr)));
  for (int b = 0; b < scn.num_bs; ++b) {
    std::vector<CVec> gw(scn.num_ue);
    for (int m = 0; m < scn.num_ue; ++m) gw[m] = ch.bs_irs[b] * w[b][m];
    for (int u = 0; u < scn.num_ue; ++u) {
      for (int m = 0; m < scn.num_ue; ++m) {
        x[u][m] += ch.irs_ue[u].conjugate().cwiseProduct(gw[m]);
      }
    }
  }
  auto x_of = [&](int u, int m) -> CVec { return x[u][m]; };
  accumulate_terms(scn, x_of, gamma, xi, phi_direct, qf.z, qf.q);
  qf.zeta = max_eigenvalue(qf.z);
  return qf;
}

double max_eigenvalue(const CMat& z) {
  if (z.rows() != z.cols()) throw std::invalid_argument("max_eigenvalue: not square");
  const int n = static_cast<int>(z.rows());
  if (n == 0) return 0.0;
  if ((z - z.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + z.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("max_eigenvalue: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(z, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  // inflate slightly so the surrogate stays a true majorizer under roundoff
  return top + 1e-9 * (1.0 + std::abs(top));
}

CVec mm_step(const CVec& theta_prev, const CMat& z, double zeta, const CVec& q) {
  const CVec u = (z - zeta * CMat::Identity(z.rows(), z.cols())) * theta_prev - q;
  CVec next(theta_prev.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u(i));
    next(i) = (mag == 0.0) ? theta_prev(i) : -u(i) / mag;
  }
  return next;
}

CVec solve_theta_b(const CVec& initial, const QuadraticForm& qf, int inner_iters,
                   double tol) {
  CVec theta = initial;
  if (theta.size() == 0) return theta;
  double g = quadratic_value(qf, theta);
  for (int it = 0; it < inner_iters; ++it) {
    theta = mm_step(theta, qf.z, qf.zeta, qf.q);
    const double g_next = quadratic_value(qf, theta);
    if (std::abs(g_next - g) <= tol * (1.0 + std::abs(g))) {
      g = g_next;
      break;
    }
    g = g_next;
  }
  return theta;
}

CVec project_discrete(const CVec& theta, int bits) {
  if (bits < 1) throw std::invalid_argument("project_discrete: bits must be >= 1");
  const double levels = static_cast<double>(1 << bits);
  CVec out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    double ang = std::arg(theta(i));
    if (ang < 0.0) ang += 2.0 * M_PI;
    const double scaled = ang * levels / (2.0 * M_PI);
    // round half down so exact ties pick the smaller grid index
    long u = static_cast<long>(std::ceil(scaled - 0.5));
    u %= static_cast<long>(levels);
    if (u < 0) u += static_cast<long>(levels);
    out(i) = std::polar(1.0, 2.0 * M_PI * u / levels);
  }
  return out;
}

}  // namespace cfbeam
