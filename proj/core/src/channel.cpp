#include "cfbeam/channel.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfbeam {

double pathloss(double dist_m, double epsilon_db, double alpha) {
  if (dist_m <= 0.0) {
    throw std::invalid_argument("pathloss: distance must be positive");
  }
  return std::pow(10.0, epsilon_db / 10.0) * std::pow(dist_m, -alpha);
}

CMat sample_rayleigh(int rows, int cols, double gain, Rng& rng) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("sample_rayleigh: negative dimension");
  }
  const double amp = std::sqrt(gain);
  CMat h(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      h(i, j) = amp * rng.cnormal();
    }
  }
  return h;
}

CVec steering_vector(int n, const Vec2& from, const Vec2& to) {
  const double az = std::atan2(to.y - from.y, to.x - from.x);
  const double phase_step = M_PI * std::sin(az); // half-wavelength spacing
  CVec a(n);
  for (int i = 0; i < n; ++i) {
    a(i) = std::polar(1.0, phase_step * i);
  }
  return a;
}

CMat sample_rician(int rows, int cols, double gain, double rician_factor_db,
                   const Vec2& from, const Vec2& to, Rng& rng) {
  const double kappa = std::pow(10.0, rician_factor_db / 10.0);
  const CVec a_rx = steering_vector(rows, to, from);
  const CVec a_tx = steering_vector(cols, from, to);
  const CMat los = a_rx * a_tx.adjoint();
  const CMat nlos = sample_rayleigh(rows, cols, 1.0, rng);
  return std::sqrt(gain) * (std::sqrt(kappa / (1.0 + kappa)) * los +
                            std::sqrt(1.0 / (1.0 + kappa)) * nlos);
}

namespace {

Vec2 sample_disc(const Vec2& center, double radius, Rng& rng) {
  const double r = radius * std::sqrt(rng.uniform());
  const double a = 2.0 * M_PI * rng.uniform_half_open();
  return {center.x + r * std::cos(a), center.y + r * std::sin(a)};
}

}  // namespace

std::pair<Scenario, ChannelSet> generate_scenario(const ScenarioConfig& cfg,
                                                  std::uint64_t seed) {
  if (cfg.num_bs < 1 || cfg.num_ue < 1 || cfg.num_tx < 1 ||
      cfg.elems_per_irs < 1 || cfg.num_irs < 0) {
    throw std::invalid_argument("generate_scenario: invalid dimensions");
  }
  Scenario scn;
  scn.num_bs = cfg.num_bs;
  scn.num_irs = cfg.num_irs;
  scn.num_ue = cfg.num_ue;
  scn.num_tx = cfg.num_tx;
  scn.elems_per_irs = cfg.elems_per_irs;
  scn.half_side = cfg.half_side;
  scn.phase_bits = cfg.phase_bits;
  scn.seed = seed;
  scn.power_budget = RVec::Constant(cfg.num_bs, std::pow(10.0, cfg.power_dbm / 10.0));
  scn.weights = RVec::Ones(cfg.num_ue);
  scn.noise_power = kNoisePowerMw;

  const double d = cfg.half_side;
  const Vec2 center{d, d};
  // BSs on the circle through the corners of the 2D x 2D square; for B=4 this
  // lands exactly on (0,0), (0,2D), (2D,2D), (2D,0).
  scn.bs_pos.resize(cfg.num_bs);
  for (int b = 0; b < cfg.num_bs; ++b) {
    const double ang = -0.75 * M_PI - 2.0 * M_PI * b / cfg.num_bs;
    scn.bs_pos[b] = {center.x + d * M_SQRT2 * std::cos(ang),
                     center.y + d * M_SQRT2 * std::sin(ang)};
  }

  // UE and IRS positions come from separate derived streams so UE placement
  // (and hence the direct channels) is invariant to the surface count.
  Rng pos_rng(Rng::derive(seed, 1));
  scn.ue_pos.resize(cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) {
    scn.ue_pos[k] = sample_disc(center, 0.5 * d, pos_rng);
  }
  Rng irs_rng(Rng::derive(seed, 3));
  scn.irs_pos.resize(cfg.num_irs);
  for (int r = 0; r < cfg.num_irs; ++r) {
    scn.irs_pos[r] = sample_disc(center, 0.5 * d, irs_rng);
  }

  Rng ch_rng(Rng::derive(seed, 2));
  ChannelSet ch;
  ch.direct.assign(cfg.num_bs, std::vector<CVec>(cfg.num_ue));
  for (int b = 0; b < cfg.num_bs; ++b) {
    for (int k = 0; k < cfg.num_ue; ++k) {
      const double g = pathloss(distance(scn.bs_pos[b], scn.ue_pos[k]),
                                kRefLossDb, kExpBsUe);
      ch.direct[b][k] = sample_rayleigh(cfg.num_tx, 1, g, ch_rng).col(0);
    }
  }
  const int nr = scn.reflect_dim();
  ch.bs_irs.assign(cfg.num_bs, CMat::Zero(nr, cfg.num_tx));
  const int n = cfg.elems_per_irs;
  for (int b = 0; b < cfg.num_bs; ++b) {
    for (int r = 0; r < cfg.num_irs; ++r) {
      const double g = pathloss(distance(scn.bs_pos[b], scn.irs_pos[r]),
                                kRefLossDb, kExpBsIrs);
      ch.bs_irs[b].middleRows(r * n, n) = sample_rician(
          n, cfg.num_tx, g, kRicianFactorDb, scn.bs_pos[b], scn.irs_pos[r], ch_rng);
    }
  }
  ch.irs_ue.assign(cfg.num_ue, CVec::Zero(nr));
  for (int r = 0; r < cfg.num_irs; ++r) {
    for (int k = 0; k < cfg.num_ue; ++k) {
      const double g = kIrsReflectLoss *
                       pathloss(distance(scn.irs_pos[r], scn.ue_pos[k]),
                                kRefLossDb, kExpIrsUe);
      ch.irs_ue[k].segment(r * n, n) = sample_rician(
          n, 1, g, kRicianFactorDb, scn.irs_pos[r], scn.ue_pos[k], ch_rng).col(0);
    }
  }
  return {std::move(scn), std::move(ch)};
}

CVec effective_channel(const CVec& h, const CVec& v_diag, const CMat& g,
                       const CVec& theta) {
  if (v_diag.size() != g.rows() || theta.size() != g.rows()) {
    throw std::invalid_argument("effective_channel: dimension mismatch");
  }
  if (g.rows() == 0) return h;
  return h + g.adjoint() * v_diag.cwiseProduct(theta);
}

ChannelSet without_irs(const ChannelSet& ch) {
  ChannelSet out = ch;
  for (auto& v : out.irs_ue) v.setZero();
  return out;
}

void dump_channels(const ChannelSet& ch, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("dump_channels: cannot open " + path);
  os.precision(17);
  const int b_count = ch.num_bs();
  const int k_count = ch.num_ue();
  const int nr = b_count ? static_cast<int>(ch.bs_irs[0].rows()) : 0;
  const int nt = (b_count && k_count) ? static_cast<int>(ch.direct[0][0].size()) : 0;
  os << "cfbeam-channels 1 " << b_count << ' ' << k_count << ' ' << nr << ' '
     << nt << '\n';
  auto put = [&os](const std::complex<double>& z) {
    os << z.real() << ' ' << z.imag() << '\n';
  };
  for (int b = 0; b < b_count; ++b)
    for (int k = 0; k < k_count; ++k)
      for (int i = 0; i < nt; ++i) put(ch.direct[b][k](i));
  for (int b = 0; b < b_count; ++b)
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) put(ch.bs_irs[b](i, j)); // row-major
  for (int k = 0; k < k_count; ++k)
    for (int i = 0; i < nr; ++i) put(ch.irs_ue[k](i));
}

ChannelSet load_channels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_channels: cannot open " + path);
  std::string magic;
  int version = 0, b_count = 0, k_count = 0, nr = 0, nt = 0;
  is >> magic >> version >> b_count >> k_count >> nr >> nt;
  if (magic != "cfbeam-channels" || version != 1) {
    throw std::runtime_error("load_channels: bad header in " + path);
  }
  auto get = [&is]() {
    double re = 0, im = 0;
    is >> re >> im;
    return std::complex<double>(re, im);
  };
  ChannelSet ch;
  ch.direct.assign(b_count, std::vector<CVec>(k_count, CVec::Zero(nt)));
  for (int b = 0; b < b_count; ++b)
    for (int k = 0; k < k_count; ++k)
      for (int i = 0; i < nt; ++i) ch.direct[b][k](i) = get();
  ch.bs_irs.assign(b_count, CMat::Zero(nr, nt));
  for (int b = 0; b < b_count; ++b)
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) ch.bs_irs[b](i, j) = get();
  ch.irs_ue.assign(k_count, CVec::Zero(nr));
  for (int k = 0; k < k_count; ++k)
    for (int i = 0; i < nr; ++i) ch.irs_ue[k](i) = get();
  if (!is) throw std::runtime_error("load_channels: truncated file " + path);
  return ch;
}

std::uint64_t channel_checksum(const ChannelSet& ch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& row : ch.direct)
    for (const auto& v : row)
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        mix(v(i).real());
        mix(v(i).imag());
      }
  for (const auto& m : ch.bs_irs)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        mix(m(i, j).real());
        mix(m(i, j).imag());
      }
  for (const auto& v : ch.irs_ue)
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      mix(v(i).real());
      mix(v(i).imag());
    }
  return h;
}

}  // namespace cfbeam
