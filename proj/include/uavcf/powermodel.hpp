#pragma once

#include "uavcf/access.hpp"
#include "uavcf/common.hpp"
#include "uavcf/fronthaul.hpp"

namespace uavcf {

struct PowerModelParams {
  double proc_idle_w = 20.8;        // processing power in idle mode
  double proc_slope_w = 74.0;       // load-dependent processing slope
  double proc_capacity_gops = 180.0;
  double amplifier_static_w = 64.4;  // includes the factor-two memory overhead
  double transmit_slope = 4.0;       // RF chain load slope (25% PA efficiency)
  int dft_size = 2048;
  bool charge_fronthaul_to_uav = true;  // count CPU-side fronthaul power per Eq. of record
};

struct BatteryParams {
  double mass_kg = 3.0;
  double energy_density_wh_per_kg = 200.0;
  double mech_power_w = 150.0;  // fixed-wing aerodynamic draw, not optimized
};

struct GopsBreakdown {
  double filtering = 0.0;  // polyphase filtering load
  double dft = 0.0;        // inverse DFT load
  double total = 0.0;
};

/// On-board processing load in GOPS for the low-PHY at the UAV-AP.
GopsBreakdown processing_gops(const FronthaulConfig& cfg, int dft_size);

/// Load-dependent processing power; throws when the load exceeds capacity.
double processing_power(const PowerModelParams& params, double gops);

struct PowerBreakdown {
  double processing = 0.0;
  double fronthaul = 0.0;
  double amplifier_static = 0.0;
  double transmit = 0.0;
  double total = 0.0;
};

/// Total UAV-AP power consumption for an allocation under a given split.
/// fronthaul_powers holds P^f_l for the selected split, aligned to UAV index.
PowerBreakdown total_power(const PowerAllocation& alloc, SplitOption split,
                           const VectorXd& fronthaul_powers, const FronthaulConfig& fh_cfg,
                           const PowerModelParams& params);

/// Flight endurance in minutes given the per-UAV communication power draw.
double service_time_minutes(double comm_power_w, const BatteryParams& battery);

}  // namespace uavcf
