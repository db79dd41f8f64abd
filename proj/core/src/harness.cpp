#include "cfbeam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cfbeam {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

long long backhaul_symbols(int num_bs, int num_ue, int elems, int num_irs,
                           int num_edges) {
  return static_cast<long long>(num_bs) *
         (2LL * num_ue * num_ue +
          static_cast<long long>(elems) * num_irs * num_edges);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  auto geti = [&kv](const std::string& key, int& out) {
    if (auto it = kv.find(key); it != kv.end()) out = std::stoi(it->second);
  };
  auto getd = [&kv](const std::string& key, double& out) {
    if (auto it = kv.find(key); it != kv.end()) out = std::stod(it->second);
  };
  geti("B", cfg.scenario.num_bs);
  geti("R", cfg.scenario.num_irs);
  geti("K", cfg.scenario.num_ue);
  geti("N", cfg.scenario.elems_per_irs);
  geti("N_t", cfg.scenario.num_tx);
  getd("P_dBm", cfg.scenario.power_dbm);
  getd("D", cfg.scenario.half_side);
  if (auto it = kv.find("U_bits"); it != kv.end()) {
    cfg.scenario.phase_bits = (it->second == "continuous") ? 0 : std::stoi(it->second);
  }
  if (auto it = kv.find("seed"); it != kv.end()) cfg.master_seed = std::stoull(it->second);
  geti("drops", cfg.drops);
  if (auto it = kv.find("methods"); it != kv.end()) cfg.methods = split(it->second, ',');
  if (auto it = kv.find("sweep"); it != kv.end()) cfg.sweep_var = it->second;
  if (auto it = kv.find("values"); it != kv.end()) {
    for (const auto& v : split(it->second, ',')) cfg.sweep_values.push_back(std::stod(v));
  }
  if (auto it = kv.find("sweep2"); it != kv.end()) cfg.sweep_var2 = it->second;
  if (auto it = kv.find("values2"); it != kv.end()) {
    for (const auto& v : split(it->second, ',')) cfg.sweep_values2.push_back(std::stod(v));
  }
  if (auto it = kv.find("out"); it != kv.end()) cfg.out_dir = it->second;
  getd("rho", cfg.admm.rho);
  geti("max_rounds", cfg.admm.max_rounds);
  getd("rate_tol", cfg.admm.rate_tol);
  getd("residual_tol", cfg.admm.residual_tol);
  cfg.admm.phase_bits = cfg.scenario.phase_bits;

  if (cfg.drops < 1) throw std::runtime_error("load_config: drops must be >= 1");
  if (cfg.methods.empty()) throw std::runtime_error("load_config: methods must be non-empty");
  if (!cfg.sweep_var.empty() && cfg.sweep_values.empty()) {
    throw std::runtime_error("load_config: sweep variable without values");
  }
  return cfg;
}

namespace {

void apply_sweep(ScenarioConfig& scn, const std::string& var, double value) {
  if (var.empty()) return;
  if (var == "P_t" || var == "P_dBm") {
    scn.power_dbm = value;
  } else if (var == "N_t") {
    scn.num_tx = static_cast<int>(value);
  } else if (var == "N") {
    scn.elems_per_irs = static_cast<int>(value);
  } else if (var == "K") {
    scn.num_ue = static_cast<int>(value);
  } else {
    throw std::runtime_error("unknown sweep variable: " + var);
  }
}

ResultRow run_method(const std::string& method, const Scenario& scn,
                     const ChannelSet& ch, const AdmmOptions& opts,
                     const std::string& trace_path) {
  ResultRow row;
  row.method = method;
  const auto t0 = std::chrono::steady_clock::now();

  const bool no_irs = method.ends_with("-noirs");
  const std::string base = no_irs ? method.substr(0, method.size() - 6) : method;
  const ChannelSet& active = ch;
  ChannelSet stripped;
  const ChannelSet* use = &active;
  if (no_irs) {
    stripped = without_irs(ch);
    use = &stripped;
  }

  if (base == "decentralized") {
    const DecentralizedResult res = run_decentralized(scn, *use, opts);
    row.sum_rate_bits = res.trace.records.empty()
                            ? weighted_sum_rate(scn, *use, res.state)
                            : res.trace.records.back().sum_rate_bits;
    row.rounds = res.trace.rounds_completed;
    row.cum_symbols =
        res.trace.records.empty() ? 0 : res.trace.records.back().cum_symbols;
    if (!trace_path.empty()) res.trace.write_csv(trace_path);
  } else if (base == "centralized") {
    const CentralizedResult res = solve_centralized(scn, *use, opts);
    row.sum_rate_bits = res.trace.records.empty()
                            ? weighted_sum_rate(scn, *use, res.state)
                            : res.trace.records.back().sum_rate_bits;
    row.rounds = res.trace.rounds_completed;
    if (!trace_path.empty()) res.trace.write_csv(trace_path);
  } else if (base == "mrt" || base == "zf") {
    // non-cooperative baselines see the reflection-free channel
    const ChannelSet bare = without_irs(*use);
    const CVec theta = CVec::Ones(scn.reflect_dim());
    BeamState state;
    state.w = (base == "mrt") ? mrt(scn, bare, theta)
                              : local_zf(scn, bare, theta).w;
    state.theta.assign(scn.num_bs, theta);
    row.sum_rate_bits = weighted_sum_rate(scn, bare, state);
    row.rounds = 0;
  } else {
    throw std::runtime_error("unknown method: " + method);
  }

  row.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  row.channel_checksum = channel_checksum(ch);
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      bool write_traces) {
  std::vector<double> values = cfg.sweep_values;
  if (values.empty()) values.push_back(0.0);
  std::vector<double> values2 = cfg.sweep_values2;
  if (values2.empty()) values2.push_back(0.0);

  if (write_traces) std::filesystem::create_directories(cfg.out_dir);

  std::vector<ResultRow> rows;
  for (double v2 : values2) {
    for (double v : values) {
      ScenarioConfig scn_cfg = cfg.scenario;
      apply_sweep(scn_cfg, cfg.sweep_var, v);
      apply_sweep(scn_cfg, cfg.sweep_var2, v2);
      for (int drop = 0; drop < cfg.drops; ++drop) {
        const std::uint64_t seed = Rng::derive(cfg.master_seed, drop);
        const auto [scn, ch] = generate_scenario(scn_cfg, seed);
        for (const auto& method : cfg.methods) {
          std::string trace_path;
          if (write_traces) {
            std::ostringstream name;
            name << cfg.out_dir << "/trace_" << method << "_v" << v << "_d"
                 << drop << ".csv";
            trace_path = name.str();
          }
          ResultRow row = run_method(method, scn, ch, cfg.admm, trace_path);
          row.sweep_value = v;
          row.sweep_value2 = v2;
          row.drop = drop;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

void write_results(const std::vector<ResultRow>& rows, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir + "/results.csv");
    os.precision(12);
    os << "method,sweep_value,sweep_value2,drop,sum_rate_bits,rounds,"
          "cum_symbols,channel_checksum\n";
    for (const auto& r : rows) {
      os << r.method << ',' << r.sweep_value << ',' << r.sweep_value2 << ','
         << r.drop << ',' << r.sum_rate_bits << ',' << r.rounds << ','
         << r.cum_symbols << ',' << r.channel_checksum << '\n';
    }
  }
  {
    // timing kept out of results.csv so that file is byte-reproducible
    std::ofstream os(out_dir + "/results_timing.csv");
    os.precision(6);
    os << "method,sweep_value,sweep_value2,drop,wall_clock_s\n";
    for (const auto& r : rows) {
      os << r.method << ',' << r.sweep_value << ',' << r.sweep_value2 << ','
         << r.drop << ',' << r.wall_clock_s << '\n';
    }
  }
  {
    std::map<std::tuple<std::string, double, double>, std::vector<double>> cells;
    for (const auto& r : rows) {
      cells[{r.method, r.sweep_value, r.sweep_value2}].push_back(r.sum_rate_bits);
    }
    std::ofstream os(out_dir + "/aggregate.csv");
    os.precision(12);
    os << "method,sweep_value,sweep_value2,mean_sum_rate_bits,stderr,drops\n";
    for (const auto& [key, vals] : cells) {
      const double n = static_cast<double>(vals.size());
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      const double se = (n > 1) ? std::sqrt(var / (n - 1) / n) : 0.0;
      os << std::get<0>(key) << ',' << std::get<1>(key) << ','
         << std::get<2>(key) << ',' << mean << ',' << se << ',' << vals.size()
         << '\n';
    }
  }
}

}  // namespace cfbeam
