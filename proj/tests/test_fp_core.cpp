#include <doctest.h>

#include "cfbeam/consensus.hpp"
#include "cfbeam/fp_core.hpp"

using namespace cfbeam;

namespace {

// Small random problem with a warm-started state.
struct Fixture {
  Scenario scn;
  ChannelSet ch;
  BeamState state;
  ConsensusGraph graph;

  explicit Fixture(std::uint64_t seed, int num_bs = 2, int num_irs = 1,
                   int num_ue = 2, int num_tx = 4, int elems = 4) {
    ScenarioConfig cfg;
    cfg.num_bs = num_bs;
    cfg.num_irs = num_irs;
    cfg.num_ue = num_ue;
    cfg.num_tx = num_tx;
    cfg.elems_per_irs = elems;
    std::tie(scn, ch) = generate_scenario(cfg, seed);
    graph = build_ring(num_bs);
    AdmmOptions opts;
    state = initial_state(scn, ch, graph, opts);

    // desynchronize the local phase copies a little so cross terms differ
    Rng rng(Rng::derive(seed, 99));
    for (auto& th : state.theta) {
      for (Eigen::Index i = 0; i < th.size(); ++i) {
        th(i) *= std::polar(1.0, 0.3 * rng.normal());
      }
    }
    CrossTerms ct = compute_cross_terms(scn, ch, state);
    state.gamma = update_gamma(ct, scn.noise_power);
    state.xi = update_xi(ct, state.gamma, scn.weights, scn.noise_power);
  }
};

// Independent scalar-loop SINR oracle straight from the ratio definition.
double sinr_oracle(const Fixture& f, int k) {
  const int k_count = f.scn.num_ue;
  std::vector<std::complex<double>> a(k_count, 0.0);
  for (int j = 0; j < k_count; ++j) {
    for (int b = 0; b < f.scn.num_bs; ++b) {
      const CVec hhat = effective_channel(f.ch.direct[b][k], f.ch.irs_ue[k],
                                          f.ch.bs_irs[b], f.state.theta[b]);
      std::complex<double> dot = 0.0;
      for (int i = 0; i < f.scn.num_tx; ++i) {
        dot += std::conj(hhat(i)) * f.state.w[b][j](i);
      }
      a[j] += dot;
    }
  }
  double interference = 0.0;
  for (int j = 0; j < k_count; ++j) {
    if (j != k) interference += std::norm(a[j]);
  }
  return std::norm(a[k]) / (interference + f.scn.noise_power);
}

double golden_min(const std::function<double(double)>& fn, double lo, double hi,
                  int iters = 200) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  for (int i = 0; i < iters; ++i) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (fn(c) < fn(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("sinr trivial cases") {
  Fixture f(3, 1, 0, 1, 2, 1);
  // single BS, single UE: hhat = e_1, w = sqrt(P) e_1
  f.state.theta[0] = CVec::Zero(0);
  f.ch.direct[0][0] = CVec::Zero(2);
  f.ch.direct[0][0](0) = 1.0;
  const double p = f.scn.power_budget(0);
  f.state.w[0][0] = CVec::Zero(2);
  f.state.w[0][0](0) = std::sqrt(p);
  CHECK(sinr(0, f.scn, f.ch, f.state) ==
        doctest::Approx(p / f.scn.noise_power).epsilon(1e-12));

  f.state.w[0][0].setZero();
  CHECK(sinr(0, f.scn, f.ch, f.state) == 0.0);
}

TEST_CASE("sinr and sum-rate match the scalar-loop oracle") {
  Fixture f(11);
  double rate = 0.0;
  for (int k = 0; k < f.scn.num_ue; ++k) {
    const double expected = sinr_oracle(f, k);
    CHECK(sinr(k, f.scn, f.ch, f.state) ==
          doctest::Approx(expected).epsilon(1e-10));
    rate += f.scn.weights(k) * std::log2(1.0 + expected);
  }
  CHECK(weighted_sum_rate(f.scn, f.ch, f.state) ==
        doctest::Approx(rate).epsilon(1e-12));
}

TEST_CASE("weighted sum rate trivial values") {
  Fixture f(4);
  for (auto& row : f.state.w)
    for (auto& w : row) w.setZero();
  CHECK(weighted_sum_rate(f.scn, f.ch, f.state) == 0.0);
  // K=1, SINR=1 -> log2(2) = 1
  Scenario s1 = f.scn;
  s1.num_ue = 1;
  s1.weights = RVec::Ones(1);
  CrossTerms ct;
  ct.phi = CMat::Zero(1, 1);
  ct.psi = CMat::Zero(1, 1);
  ct.phi(0, 0) = std::sqrt(s1.noise_power);
  CHECK(weighted_sum_rate(s1, ct) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fp objective surrogate tightness") {
  Fixture f(21);
  const CrossTerms ct = compute_cross_terms(f.scn, f.ch, f.state);

  SUBCASE("all-zero variables give zero") {
    BeamState z = f.state;
    for (auto& row : z.w)
      for (auto& w : row) w.setZero();
    z.gamma.setZero();
    z.xi.setZero();
    const CrossTerms zct = compute_cross_terms(f.scn, f.ch, z);
    CHECK(fp_objective(f.scn, zct, z.gamma, z.xi) == 0.0);
  }
  SUBCASE("tightness after gamma and xi updates") {
    double expected = 0.0;
    for (int k = 0; k < f.scn.num_ue; ++k) {
      expected -= f.scn.weights(k) *
                  std::log1p(sinr_from_cross(ct, k, f.scn.noise_power));
    }
    const double got = fp_objective(f.scn, ct, f.state.gamma, f.state.xi);
    CHECK(got == doctest::Approx(expected).epsilon(1e-8));
  }
  SUBCASE("perturbing xi away from the closed form increases f") {
    const double f0 = fp_objective(f.scn, ct, f.state.gamma, f.state.xi);
    for (int k = 0; k < f.scn.num_ue; ++k) {
      for (const auto delta : {std::complex<double>(1e-3, 0.0),
                               std::complex<double>(0.0, 1e-3),
                               std::complex<double>(-2e-3, 1e-3)}) {
        CVec xi = f.state.xi;
        xi(k) += delta * std::abs(xi(k));
        CHECK(fp_objective(f.scn, ct, f.state.gamma, xi) > f0);
      }
    }
  }
}

TEST_CASE("gamma update") {
  Fixture f(31);
  const CrossTerms ct = compute_cross_terms(f.scn, f.ch, f.state);

  SUBCASE("zero beamformers give zero gamma") {
    CrossTerms z;
    z.phi = CMat::Zero(f.scn.num_ue, f.scn.num_ue);
    z.psi = CMat::Zero(f.scn.num_ue, f.scn.num_ue);
    CHECK(update_gamma(z, f.scn.noise_power).norm() == 0.0);
  }
  SUBCASE("matches sinr definition") {
    const RVec g = update_gamma(ct, f.scn.noise_power);
    for (int k = 0; k < f.scn.num_ue; ++k) {
      CHECK(g(k) == doctest::Approx(sinr_from_cross(ct, k, f.scn.noise_power)));
    }
  }
  SUBCASE("is the 1-D minimizer of f at the consistent fixed point") {
    // with xi at its closed form for gamma = SINR, the scalar minimization
    // over each gamma_k recovers gamma_k = SINR_k
    const RVec gstar = update_gamma(ct, f.scn.noise_power);
    for (int k = 0; k < f.scn.num_ue; ++k) {
      RVec gamma = gstar;
      auto fn = [&](double gk) {
        gamma(k) = gk;
        return fp_objective(f.scn, ct, gamma, f.state.xi);
      };
      const double found = golden_min(fn, 0.0, 3.0 * gstar(k) + 1.0);
      CHECK(found == doctest::Approx(gstar(k)).epsilon(1e-6));
      gamma(k) = gstar(k);
    }
  }
}

TEST_CASE("xi update stationarity") {
  Fixture f(41);
  const CrossTerms ct = compute_cross_terms(f.scn, f.ch, f.state);

  SUBCASE("zero cross terms give zero xi") {
    CrossTerms z;
    z.phi = CMat::Zero(f.scn.num_ue, f.scn.num_ue);
    z.psi = CMat::Zero(f.scn.num_ue, f.scn.num_ue);
    CHECK(update_xi(z, f.state.gamma, f.scn.weights, f.scn.noise_power).norm() == 0.0);
  }
  SUBCASE("finite-difference stationarity") {
    const CVec xi = update_xi(ct, f.state.gamma, f.scn.weights, f.scn.noise_power);
    const double h = 1e-7;
    for (int k = 0; k < f.scn.num_ue; ++k) {
      for (int part = 0; part < 2; ++part) {
        CVec xp = xi, xm = xi;
        const std::complex<double> dz =
            part == 0 ? std::complex<double>(h, 0) : std::complex<double>(0, h);
        xp(k) += dz;
        xm(k) -= dz;
        const double grad = (fp_objective(f.scn, ct, f.state.gamma, xp) -
                             fp_objective(f.scn, ct, f.state.gamma, xm)) /
                            (2.0 * h);
        CHECK(std::abs(grad) < 1e-6);
      }
    }
  }
  SUBCASE("common phase rotation leaves |xi| unchanged") {
    CrossTerms rot = ct;
    const std::complex<double> phase = std::polar(1.0, 0.77);
    rot.phi *= phase;
    rot.psi *= phase;
    const CVec a = update_xi(ct, f.state.gamma, f.scn.weights, f.scn.noise_power);
    const CVec b = update_xi(rot, f.state.gamma, f.scn.weights, f.scn.noise_power);
    CHECK((a.cwiseAbs() - b.cwiseAbs()).norm() < 1e-12 * a.norm());
  }
}

TEST_CASE("bisect_mu") {
  SUBCASE("analytic root") {
    const double mu = bisect_mu([](double m) { return 1.0 / ((1.0 + m) * (1.0 + m)); },
                                0.25);
    CHECK(mu == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("random SPD system reproduces the budget") {
    Rng rng(5);
    const int n = 5;
    CMat a = sample_rayleigh(n, n, 1.0, rng);
    a = (a * a.adjoint()).eval();
    const CVec r = sample_rayleigh(n, 1, 1.0, rng).col(0);
    auto power = [&](double mu) {
      CMat m = a;
      m.diagonal().array() += mu;
      return m.ldlt().solve(r).squaredNorm();
    };
    const double target = 0.5 * power(0.0);
    const double mu = bisect_mu(power, target);
    CHECK(power(mu) == doctest::Approx(target).epsilon(1e-7));
  }
  SUBCASE("runaway bracket fails") {
    CHECK_THROWS_AS(bisect_mu([](double) { return 1.0; }, 0.5),
                    std::runtime_error);
  }
}

TEST_CASE("w update") {
  Fixture f(51);
  const int b = 0;
  const CrossTerms ct = compute_cross_terms(f.scn, f.ch, f.state);
  const CrossTerms own = own_cross_terms(f.scn, f.ch, b, f.state.w[b], f.state.theta[b]);
  const CMat others = (ct.phi - own.phi) + (ct.psi - own.psi);

  SUBCASE("zero xi gives zero beamformer") {
    const WUpdate wu = update_w_b(b, f.scn, f.ch, f.state.theta[b], f.state.gamma,
                                  CVec::Zero(f.scn.num_ue), others);
    CHECK(wu.mu == 0.0);
    for (const auto& w : wu.w) CHECK(w.norm() == 0.0);
  }

  const WUpdate wu = update_w_b(b, f.scn, f.ch, f.state.theta[b], f.state.gamma,
                                f.state.xi, others);

  SUBCASE("power feasibility and complementary slackness") {
    double power = 0.0;
    for (const auto& w : wu.w) power += w.squaredNorm();
    const double budget = f.scn.power_budget(b);
    CHECK(power <= budget * (1.0 + 1e-8));
    CHECK(std::abs(wu.mu * (power - budget)) <= 1e-6 * budget);
  }

  SUBCASE("finite-difference stationarity of the Lagrangian") {
    BeamState st = f.state;
    st.w[b] = wu.w;
    st.mu(b) = wu.mu;
    auto lagr = [&](const std::vector<CVec>& wb) {
      BeamState probe = st;
      probe.w[b] = wb;
      const CrossTerms pct = compute_cross_terms(f.scn, f.ch, probe);
      double value = fp_objective(f.scn, pct, probe.gamma, probe.xi);
      double power = -f.scn.power_budget(b);
      for (const auto& w : wb) power += w.squaredNorm();
      return value + wu.mu * power;
    };
    const double h = 1e-6;
    const double scale = std::sqrt(f.scn.power_budget(b));
    double gnorm2 = 0.0;
    for (int k = 0; k < f.scn.num_ue; ++k) {
      for (int i = 0; i < f.scn.num_tx; ++i) {
        for (int part = 0; part < 2; ++part) {
          auto wp = wu.w, wm = wu.w;
          const std::complex<double> dz =
              part == 0 ? std::complex<double>(h * scale, 0)
                        : std::complex<double>(0, h * scale);
          wp[k](i) += dz;
          wm[k](i) -= dz;
          const double grad = (lagr(wp) - lagr(wm)) / (2.0 * h * scale);
          gnorm2 += grad * grad;
        }
      }
    }
    CHECK(std::sqrt(gnorm2) < 1e-5);
  }

  SUBCASE("update never increases the augmented Lagrangian") {
    BeamState before = f.state;
    BeamState after = f.state;
    after.w[b] = wu.w;
    const double l0 = augmented_lagrangian(f.scn, f.ch, f.graph, before);
    const double l1 = augmented_lagrangian(f.scn, f.ch, f.graph, after);
    CHECK(l1 <= l0 + 1e-9);
  }
}

TEST_CASE("cross terms incremental consistency") {
  Fixture f(61);
  CrossTerms ct = compute_cross_terms(f.scn, f.ch, f.state);
  // subtract and re-add every BS contribution, compare against from-scratch
  for (int b = 0; b < f.scn.num_bs; ++b) {
    const CrossTerms own = own_cross_terms(f.scn, f.ch, b, f.state.w[b], f.state.theta[b]);
    ct.phi -= own.phi;
    ct.psi -= own.psi;
    ct.phi += own.phi;
    ct.psi += own.psi;
  }
  const CrossTerms fresh = compute_cross_terms(f.scn, f.ch, f.state);
  CHECK((ct.phi - fresh.phi).norm() <= 1e-9 * (1.0 + fresh.phi.norm()));
  CHECK((ct.psi - fresh.psi).norm() <= 1e-9 * (1.0 + fresh.psi.norm()));
}
