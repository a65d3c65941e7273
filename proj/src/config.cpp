#include "uavcf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace uavcf {

using nlohmann::json;

const char* to_string(Band band) { return band == Band::Sub6 ? "sub6" : "mmwave"; }

const char* to_string(SplitOption split) {
  return split == SplitOption::Option8 ? "option8" : "option72";
}

Band band_from_string(const std::string& s) {
  if (s == "sub6") return Band::Sub6;
  if (s == "mmwave") return Band::MmWave;
  throw ConfigError("unknown band: " + s);
}

SplitOption split_from_string(const std::string& s) {
  if (s == "option8") return SplitOption::Option8;
  if (s == "option72") return SplitOption::Option72;
  throw ConfigError("unknown split: " + s);
}

FronthaulConfigSub6 ExperimentConfig::sub6_channel_config(int num_antennas) const {
  FronthaulConfigSub6 cfg;
  cfg.num_cpu_antennas = num_antennas;
  cfg.pathloss = fronthaul_pathloss;
  cfg.pathloss.carrier_hz = sub6.carrier_hz;
  cfg.asd_deg = sub6_asd_deg;
  cfg.rician_factor_db = sub6_rician_db;
  cfg.los_mode = los_mode;
  return cfg;
}

FronthaulConfigMmWave ExperimentConfig::mmwave_channel_config(int num_antennas) const {
  FronthaulConfigMmWave cfg;
  cfg.num_cpu_antennas = num_antennas;
  cfg.pathloss = fronthaul_pathloss;
  cfg.pathloss.carrier_hz = mmwave.carrier_hz;
  cfg.mmwave = mmwave_params;
  return cfg;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.access_channel.pathloss = PathLossParams{9.61, 0.16, 1.0, 20.0, 3.5e9};
  cfg.access_channel.asd_deg = 15.0;
  cfg.access_channel.num_ap_antennas = cfg.access.num_ap_antennas;
  return cfg;
}

namespace {

// Pulls values out of a json object while recording which keys were touched;
// any key left untouched is a config error (typo protection).
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  ~StrictObject() = default;

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong value type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_pathloss(const json& j, const std::string& path, PathLossParams& p) {
  StrictObject o(j, path);
  o.get("eta1", p.eta1);
  o.get("eta2", p.eta2);
  o.get("excess_los_db", p.excess_los_db);
  o.get("excess_nlos_db", p.excess_nlos_db);
  o.finish();
}

void parse_band_profile(const json& j, const std::string& path, BandProfile& p) {
  StrictObject o(j, path);
  o.get("num_cpu_antennas", p.num_cpu_antennas);
  o.get("carrier_hz", p.carrier_hz);
  o.get("bandwidth_hz", p.bandwidth_hz);
  o.finish();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg = default_config();
  StrictObject root(j, "config");
  root.get("seed", cfg.seed);
  root.get("trials", cfg.trials);
  root.get("threads", cfg.threads);
  root.get("out_dir", cfg.out_dir);
  if (const json* b = root.child("bands")) {
    cfg.bands.clear();
    for (const auto& s : *b) cfg.bands.push_back(band_from_string(s.get<std::string>()));
  }
  if (const json* s = root.child("splits")) {
    cfg.splits.clear();
    for (const auto& v : *s) cfg.splits.push_back(split_from_string(v.get<std::string>()));
  }

  if (const json* t = root.child("topology")) {
    StrictObject o(*t, "topology");
    o.get("num_uavs", cfg.topology.num_uavs);
    o.get("num_ues", cfg.topology.num_ues);
    o.get("area_side_m", cfg.topology.area_side_m);
    o.get("uav_height_m", cfg.topology.uav_height_m);
    o.get("cpu_height_m", cfg.topology.cpu_height_m);
    o.finish();
  }

  if (const json* f = root.child("fronthaul")) {
    StrictObject o(*f, "fronthaul");
    o.get("noise_psd_w_per_hz", cfg.fronthaul.noise_psd_w_per_hz);
    o.get("max_power_w", cfg.fronthaul.max_power_w);
    o.get("sampling_rate_hz", cfg.fronthaul.sampling_rate_hz);
    o.get("quantizer_bits", cfg.fronthaul.quantizer_bits);
    o.get("used_subcarriers", cfg.fronthaul.used_subcarriers);
    o.get("ofdm_symbol_s", cfg.fronthaul.ofdm_symbol_s);
    if (const json* pl = o.child("pathloss")) {
      parse_pathloss(*pl, "fronthaul.pathloss", cfg.fronthaul_pathloss);
    }
    if (const json* b = o.child("sub6")) parse_band_profile(*b, "fronthaul.sub6", cfg.sub6);
    if (const json* b = o.child("mmwave")) parse_band_profile(*b, "fronthaul.mmwave", cfg.mmwave);
    o.get("sub6_asd_deg", cfg.sub6_asd_deg);
    if (o.has("sub6_rician_db")) {
      double v = 0.0;
      o.get("sub6_rician_db", v);
      cfg.sub6_rician_db = v;
    }
    std::string los_mode = "probabilistic_mix";
    o.get("los_mode", los_mode);
    if (los_mode == "probabilistic_mix") {
      cfg.los_mode = LosMode::ProbabilisticMix;
    } else if (los_mode == "bernoulli") {
      cfg.los_mode = LosMode::Bernoulli;
    } else {
      throw ConfigError("fronthaul.los_mode: unknown mode '" + los_mode + "'");
    }
    if (const json* m = o.child("mmwave_paths")) {
      StrictObject mo(*m, "fronthaul.mmwave_paths");
      mo.get("n_scattered", cfg.mmwave_params.n_paths);
      mo.get("scatter_rel_db", cfg.mmwave_params.scatter_rel_db);
      mo.get("angle_window_deg", cfg.mmwave_params.angle_window_deg);
      mo.finish();
    }
    o.finish();
  }

  if (const json* a = root.child("access")) {
    StrictObject o(*a, "access");
    o.get("bandwidth_hz", cfg.access.bandwidth_hz);
    o.get("noise_psd_w_per_hz", cfg.access.noise_psd_w_per_hz);
    o.get("noise_figure_db", cfg.access.noise_figure_db);
    o.get("coherence_samples", cfg.access.coherence_samples);
    o.get("pilot_samples", cfg.access.pilot_samples);
    o.get("pilot_power_w", cfg.access.pilot_power_w);
    o.get("num_ap_antennas", cfg.access.num_ap_antennas);
    o.get("perfect_csi", cfg.access.perfect_csi);
    o.get("stats_trials", cfg.stats_trials);
    o.get("carrier_hz", cfg.access_channel.pathloss.carrier_hz);
    o.get("asd_deg", cfg.access_channel.asd_deg);
    if (o.has("rician_db")) {
      double v = 0.0;
      o.get("rician_db", v);
      cfg.access_channel.rician_factor_db = v;
    }
    if (const json* pl = o.child("pathloss")) {
      parse_pathloss(*pl, "access.pathloss", cfg.access_channel.pathloss);
    }
    o.finish();
    cfg.access_channel.num_ap_antennas = cfg.access.num_ap_antennas;
  }

  if (const json* p = root.child("power")) {
    StrictObject o(*p, "power");
    o.get("proc_idle_w", cfg.power.proc_idle_w);
    o.get("proc_slope_w", cfg.power.proc_slope_w);
    o.get("proc_capacity_gops", cfg.power.proc_capacity_gops);
    o.get("amplifier_static_w", cfg.power.amplifier_static_w);
    o.get("transmit_slope", cfg.power.transmit_slope);
    o.get("dft_size", cfg.power.dft_size);
    o.get("charge_fronthaul_to_uav", cfg.power.charge_fronthaul_to_uav);
    o.finish();
  }

  if (const json* b = root.child("battery")) {
    StrictObject o(*b, "battery");
    o.get("mass_kg", cfg.battery.mass_kg);
    o.get("energy_density_wh_per_kg", cfg.battery.energy_density_wh_per_kg);
    o.get("mech_power_w", cfg.battery.mech_power_w);
    o.finish();
  }

  if (const json* opt = root.child("optimizer")) {
    StrictObject o(*opt, "optimizer");
    o.get("max_uav_power_w", cfg.optimizer.max_uav_power_w);
    o.get("bisect_rel_tol", cfg.optimizer.bisect_rel_tol);
    o.get("bisect_t_lo", cfg.optimizer.bisect_t_lo);
    o.get("max_bisect_iters", cfg.optimizer.max_bisect_iters);
    o.get("solver_rel_gap", cfg.optimizer.solver.rel_gap);
    o.get("solver_max_iters", cfg.optimizer.solver.max_iters);
    o.finish();
  }

  if (const json* s = root.child("sweep")) {
    StrictObject o(*s, "sweep");
    if (const json* nc = o.child("nc_values")) {
      cfg.nc_values.clear();
      for (const auto& v : *nc) cfg.nc_values.push_back(v.get<int>());
    }
    if (const json* g = o.child("gamma_db_values")) {
      cfg.gamma_db_values.clear();
      for (const auto& v : *g) cfg.gamma_db_values.push_back(v.get<double>());
    }
    o.get("service_gamma_db", cfg.service_gamma_db);
    o.finish();
  }
  root.finish();

  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  if (cfg.bands.empty() || cfg.splits.empty()) throw ConfigError("bands/splits must be nonempty");
  if (cfg.access.pilot_samples < cfg.topology.num_ues) {
    throw ConfigError("pilot_samples must be >= num_ues (orthogonal pilots)");
  }
  if (cfg.fronthaul.used_subcarriers > cfg.power.dft_size) {
    throw ConfigError("used_subcarriers cannot exceed dft_size");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["threads"] = cfg.threads;
  j["out_dir"] = cfg.out_dir;
  j["bands"] = json::array();
  for (const Band b : cfg.bands) j["bands"].push_back(to_string(b));
  j["splits"] = json::array();
  for (const SplitOption s : cfg.splits) j["splits"].push_back(to_string(s));
  j["topology"] = {{"num_uavs", cfg.topology.num_uavs},
                   {"num_ues", cfg.topology.num_ues},
                   {"area_side_m", cfg.topology.area_side_m},
                   {"uav_height_m", cfg.topology.uav_height_m},
                   {"cpu_height_m", cfg.topology.cpu_height_m}};
  j["fronthaul"] = {
      {"noise_psd_w_per_hz", cfg.fronthaul.noise_psd_w_per_hz},
      {"max_power_w", cfg.fronthaul.max_power_w},
      {"sampling_rate_hz", cfg.fronthaul.sampling_rate_hz},
      {"quantizer_bits", cfg.fronthaul.quantizer_bits},
      {"used_subcarriers", cfg.fronthaul.used_subcarriers},
      {"ofdm_symbol_s", cfg.fronthaul.ofdm_symbol_s},
      {"pathloss",
       {{"eta1", cfg.fronthaul_pathloss.eta1},
        {"eta2", cfg.fronthaul_pathloss.eta2},
        {"excess_los_db", cfg.fronthaul_pathloss.excess_los_db},
        {"excess_nlos_db", cfg.fronthaul_pathloss.excess_nlos_db}}},
      {"sub6",
       {{"num_cpu_antennas", cfg.sub6.num_cpu_antennas},
        {"carrier_hz", cfg.sub6.carrier_hz},
        {"bandwidth_hz", cfg.sub6.bandwidth_hz}}},
      {"mmwave",
       {{"num_cpu_antennas", cfg.mmwave.num_cpu_antennas},
        {"carrier_hz", cfg.mmwave.carrier_hz},
        {"bandwidth_hz", cfg.mmwave.bandwidth_hz}}},
      {"sub6_asd_deg", cfg.sub6_asd_deg},
      {"los_mode", cfg.los_mode == LosMode::Bernoulli ? "bernoulli" : "probabilistic_mix"},
      {"mmwave_paths",
       {{"n_scattered", cfg.mmwave_params.n_paths},
        {"scatter_rel_db", cfg.mmwave_params.scatter_rel_db},
        {"angle_window_deg", cfg.mmwave_params.angle_window_deg}}}};
  if (cfg.sub6_rician_db) j["fronthaul"]["sub6_rician_db"] = *cfg.sub6_rician_db;
  j["access"] = {{"bandwidth_hz", cfg.access.bandwidth_hz},
                 {"noise_psd_w_per_hz", cfg.access.noise_psd_w_per_hz},
                 {"noise_figure_db", cfg.access.noise_figure_db},
                 {"coherence_samples", cfg.access.coherence_samples},
                 {"pilot_samples", cfg.access.pilot_samples},
                 {"pilot_power_w", cfg.access.pilot_power_w},
                 {"num_ap_antennas", cfg.access.num_ap_antennas},
                 {"perfect_csi", cfg.access.perfect_csi},
                 {"stats_trials", cfg.stats_trials},
                 {"carrier_hz", cfg.access_channel.pathloss.carrier_hz},
                 {"asd_deg", cfg.access_channel.asd_deg},
                 {"pathloss",
                  {{"eta1", cfg.access_channel.pathloss.eta1},
                   {"eta2", cfg.access_channel.pathloss.eta2},
                   {"excess_los_db", cfg.access_channel.pathloss.excess_los_db},
                   {"excess_nlos_db", cfg.access_channel.pathloss.excess_nlos_db}}}};
  if (cfg.access_channel.rician_factor_db) {
    j["access"]["rician_db"] = *cfg.access_channel.rician_factor_db;
  }
  j["power"] = {{"proc_idle_w", cfg.power.proc_idle_w},
                {"proc_slope_w", cfg.power.proc_slope_w},
                {"proc_capacity_gops", cfg.power.proc_capacity_gops},
                {"amplifier_static_w", cfg.power.amplifier_static_w},
                {"transmit_slope", cfg.power.transmit_slope},
                {"dft_size", cfg.power.dft_size},
                {"charge_fronthaul_to_uav", cfg.power.charge_fronthaul_to_uav}};
  j["battery"] = {{"mass_kg", cfg.battery.mass_kg},
                  {"energy_density_wh_per_kg", cfg.battery.energy_density_wh_per_kg},
                  {"mech_power_w", cfg.battery.mech_power_w}};
  j["optimizer"] = {{"max_uav_power_w", cfg.optimizer.max_uav_power_w},
                    {"bisect_rel_tol", cfg.optimizer.bisect_rel_tol},
                    {"bisect_t_lo", cfg.optimizer.bisect_t_lo},
                    {"max_bisect_iters", cfg.optimizer.max_bisect_iters},
                    {"solver_rel_gap", cfg.optimizer.solver.rel_gap},
                    {"solver_max_iters", cfg.optimizer.solver.max_iters}};
  j["sweep"] = {{"nc_values", cfg.nc_values},
                {"gamma_db_values", cfg.gamma_db_values},
                {"service_gamma_db", cfg.service_gamma_db}};
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return Rng::fnv1a(config_to_json(cfg)); }

}  // namespace uavcf
