#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavcf/access.hpp"
#include "uavcf/channels.hpp"
#include "uavcf/fronthaul.hpp"
#include "uavcf/optimizer.hpp"
#include "uavcf/powermodel.hpp"
#include "uavcf/topology.hpp"

namespace uavcf {

/// Raised on malformed configuration files (unknown keys, bad values).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Band { Sub6, MmWave };

const char* to_string(Band band);
const char* to_string(SplitOption split);
Band band_from_string(const std::string& s);
SplitOption split_from_string(const std::string& s);

/// Per-band fronthaul radio profile.
struct BandProfile {
  int num_cpu_antennas = 64;
  double carrier_hz = 3.5e9;
  double bandwidth_hz = 150e6;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int trials = 200;
  int threads = 1;
  std::string out_dir = "out";
  std::vector<Band> bands = {Band::Sub6, Band::MmWave};
  std::vector<SplitOption> splits = {SplitOption::Option8, SplitOption::Option72};

  TopologyConfig topology;
  FronthaulConfig fronthaul;  // bandwidth_hz is overridden per band
  BandProfile sub6{64, 3.5e9, 150e6};
  BandProfile mmwave{1024, 28e9, 500e6};
  PathLossParams fronthaul_pathloss{4.8, 0.43, 1.0, 20.0, 3.5e9};
  double sub6_asd_deg = 15.0;
  std::optional<double> sub6_rician_db;
  LosMode los_mode = LosMode::ProbabilisticMix;
  MmWaveParams mmwave_params;

  AccessChannelConfig access_channel;
  AccessConfig access;
  int stats_trials = 5000;

  PowerModelParams power;
  BatteryParams battery;
  OptimizerConfig optimizer;

  std::vector<int> nc_values = {16, 64, 256, 1024};
  std::vector<double> gamma_db_values = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
  double service_gamma_db = 8.0;

  /// Band-resolved fronthaul parameters.
  const BandProfile& profile(Band band) const {
    return band == Band::Sub6 ? sub6 : mmwave;
  }
  FronthaulConfig fronthaul_for(Band band) const {
    FronthaulConfig cfg = fronthaul;
    cfg.bandwidth_hz = profile(band).bandwidth_hz;
    return cfg;
  }
  FronthaulConfigSub6 sub6_channel_config(int num_antennas) const;
  FronthaulConfigMmWave mmwave_channel_config(int num_antennas) const;
};

ExperimentConfig default_config();

/// Parses the strict-schema JSON config; unknown keys raise ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

/// Canonical JSON echo of a resolved config (also the hashing basis).
std::string config_to_json(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace uavcf
