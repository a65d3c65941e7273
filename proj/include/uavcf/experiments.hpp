#pragma once

#include <string>

#include "uavcf/config.hpp"

namespace uavcf {

struct RunReport {
  int rows = 0;
  bool any_feasible = true;
  std::string csv_path;
};

/// Figure-style sweeps; each writes one CSV under cfg.out_dir plus a run
/// manifest, and returns what landed on disk. Progress goes to stderr.
RunReport run_min_bandwidth(const ExperimentConfig& cfg);
RunReport run_maxmin(const ExperimentConfig& cfg);
RunReport run_powermin(const ExperimentConfig& cfg);
RunReport run_fair_power(const ExperimentConfig& cfg);
RunReport run_service_time(const ExperimentConfig& cfg);

/// Writes the generated topology JSON for the configured seed.
RunReport run_topology(const ExperimentConfig& cfg);

/// Per-instance reusable state for one Monte-Carlo network draw.
struct Instance {
  NetworkTopology topo;
  SinrStatistics stats;
};

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t instance_seed);

/// Fronthaul powers per UAV for a band/split at a given antenna count;
/// returns false when the channel draw was singular.
bool fronthaul_powers_for(const ExperimentConfig& cfg, const NetworkTopology& topo, Band band,
                          int num_cpu_antennas, std::uint64_t instance_seed, SplitOption split,
                          VectorXd& powers);

}  // namespace uavcf
