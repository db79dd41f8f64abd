#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cfbeam/rng.hpp"

namespace cfbeam {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Geometry knobs of one experiment instance. Powers are linear mW.
struct ScenarioConfig {
  int num_bs = 4;
  int num_irs = 1;
  int num_ue = 4;
  int num_tx = 8;         // antennas per BS
  int elems_per_irs = 16; // reflection elements per IRS
  double power_dbm = 0.0; // per-BS transmit power budget
  double half_side = 50.0;
  int phase_bits = 0;     // 0 = continuous phase shifts
};

struct Scenario {
  int num_bs = 0;
  int num_irs = 0;
  int num_ue = 0;
  int num_tx = 0;
  int elems_per_irs = 0;
  RVec power_budget;   // mW, one per BS
  RVec weights;        // per-UE rate weight
  double noise_power = 0.0; // mW
  double half_side = 0.0;
  int phase_bits = 0;
  std::uint64_t seed = 0;
  std::vector<Vec2> bs_pos, irs_pos, ue_pos;

  int reflect_dim() const { return num_irs * elems_per_irs; } // NR
};

// All channel realizations of one drop. irs_ue[k] holds the stacked diagonal
// of V_k; bs_irs[b] is the stacked G_b (NR x N_t).
struct ChannelSet {
  std::vector<std::vector<CVec>> direct; // [b][k], length N_t
  std::vector<CMat> bs_irs;              // [b], NR x N_t
  std::vector<CVec> irs_ue;              // [k], length NR

  int num_bs() const { return static_cast<int>(direct.size()); }
  int num_ue() const { return direct.empty() ? 0 : static_cast<int>(direct[0].size()); }
};

// Thermal noise floor: -174 dBm/Hz over 1 GHz.
constexpr double kNoisePowerMw = 3.9810717055349695e-9; // 10^(-8.4)
constexpr double kRefLossDb = -32.0;
constexpr double kIrsReflectLoss = 0.1; // 10 dB per reflected path
constexpr double kRicianFactorDb = 0.0;
constexpr double kExpBsUe = 3.0;
constexpr double kExpBsIrs = 2.0;
constexpr double kExpIrsUe = 2.0;

double pathloss(double dist_m, double epsilon_db, double alpha);

CMat sample_rayleigh(int rows, int cols, double gain, Rng& rng);

// Rician draw with a unit-modulus LOS outer product from half-wavelength ULA
// steering vectors; angles come from the endpoint positions.
CMat sample_rician(int rows, int cols, double gain, double rician_factor_db,
                   const Vec2& from, const Vec2& to, Rng& rng);

// ULA steering vector for the azimuth of `to` as seen from `from`.
CVec steering_vector(int n, const Vec2& from, const Vec2& to);

std::pair<Scenario, ChannelSet> generate_scenario(const ScenarioConfig& cfg,
                                                  std::uint64_t seed);

// Effective BS->UE channel: hhat = h + G^H V theta (equivalently hhat^H = h^H + theta^H V^H G).
CVec effective_channel(const CVec& h, const CVec& v_diag, const CMat& g,
                       const CVec& theta);

// Reflection-free copy (all IRS->UE links zeroed); direct channels shared.
ChannelSet without_irs(const ChannelSet& ch);

// Text round-trip of a ChannelSet for external cross-checks.
void dump_channels(const ChannelSet& ch, const std::string& path);
ChannelSet load_channels(const std::string& path);

// Order-sensitive FNV-1a hash over every channel coefficient.
std::uint64_t channel_checksum(const ChannelSet& ch);

}  // namespace cfbeam
