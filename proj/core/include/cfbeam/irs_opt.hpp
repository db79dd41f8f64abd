#pragma once

#include "cfbeam/fp_core.hpp"

namespace cfbeam {

// Quadratic model g(theta) = theta^H Z theta - 2 Re{theta^H q} of the
// augmented Lagrangian as a function of one BS's local phase vector.
struct QuadraticForm {
  CMat z;
  CVec q;
  double zeta = 0.0; // valid majorizer constant, >= lambda_max(Z)
};

double quadratic_value(const QuadraticForm& qf, const CVec& theta);

// Model at BS b for fixed new beamformers w_b. others(u,m) holds the
// theta-independent cross terms of the other BSs; penalty_vec = A_b^H (t_b +
// lambda / rho); degree = number of edges incident to b (A_b^H A_b = degree*I).
QuadraticForm assemble_quadratic(int b, const Scenario& scn, const ChannelSet& ch,
                                 const std::vector<CVec>& w_b, const RVec& gamma,
                                 const CVec& xi, const CMat& others,
                                 const CVec& penalty_vec, double degree,
                                 double rho);

// Model for the shared phase vector of the centralized solver (no penalty);
// couples all BSs through the stacked reflected responses.
QuadraticForm assemble_quadratic_centralized(const Scenario& scn,
                                             const ChannelSet& ch,
                                             const std::vector<std::vector<CVec>>& w,
                                             const RVec& gamma, const CVec& xi,
                                             const CMat& phi_direct);

// Top eigenvalue of a Hermitian PSD matrix by power iteration, inflated by
// (1 + 1e-8) so the result is always a valid majorizer constant.
double max_eigenvalue(const CMat& z);

// One majorize-minimize step over the unit-modulus set; zero entries of the
// argument keep their previous phase.
CVec mm_step(const CVec& theta_prev, const CMat& z, double zeta, const CVec& q);

CVec solve_theta_b(const CVec& initial, const QuadraticForm& qf,
                   int inner_iters = 20, double tol = 1e-6);

// Nearest-grid projection onto {2*pi*u / 2^U}; ties break toward smaller u.
CVec project_discrete(const CVec& theta, int bits);

}  // namespace cfbeam
