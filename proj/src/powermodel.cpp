#include "uavcf/powermodel.hpp"

namespace uavcf {

GopsBreakdown processing_gops(const FronthaulConfig& cfg, int dft_size) {
  if (dft_size < 1 || (dft_size & (dft_size - 1)) != 0) {
    throw UnsupportedConfigError("processing_gops: DFT size must be a power of two");
  }
  GopsBreakdown out;
  out.filtering = 40.0 * cfg.num_ap_antennas * cfg.sampling_rate_hz / 1e9;
  out.dft = 8.0 * cfg.num_ap_antennas * dft_size * std::log2(static_cast<double>(dft_size)) /
            (cfg.ofdm_symbol_s * 1e9);
  out.total = out.filtering + out.dft;
  return out;
}

double processing_power(const PowerModelParams& params, double gops) {
  if (gops > params.proc_capacity_gops) {
    throw UnsupportedConfigError("processing_power: load exceeds processing capacity");
  }
  return params.proc_idle_w + params.proc_slope_w * gops / params.proc_capacity_gops;
}

PowerBreakdown total_power(const PowerAllocation& alloc, SplitOption split,
                           const VectorXd& fronthaul_powers, const FronthaulConfig& fh_cfg,
                           const PowerModelParams& params) {
  const int num_uavs = static_cast<int>(alloc.alpha.size());
  if (fronthaul_powers.size() != num_uavs) {
    throw UnsupportedConfigError("total_power: fronthaul powers misaligned with UAV count");
  }
  PowerBreakdown out;
  const int indicator = split_indicator(split);
  const double proc_w =
      indicator ? processing_power(params, processing_gops(fh_cfg, params.dft_size).total) : 0.0;
  for (int l = 0; l < num_uavs; ++l) {
    if (alloc.alpha[l] == 0) continue;
    out.processing += proc_w;
    if (params.charge_fronthaul_to_uav) out.fronthaul += fronthaul_powers[l];
    out.amplifier_static += params.amplifier_static_w;
  }
  out.transmit = params.transmit_slope * alloc.transmit_power();
  out.total = out.processing + out.fronthaul + out.amplifier_static + out.transmit;
  return out;
}

double service_time_minutes(double comm_power_w, const BatteryParams& battery) {
  const double energy_wh = battery.mass_kg * battery.energy_density_wh_per_kg;
  return 60.0 * energy_wh / (battery.mech_power_w + comm_power_w);
}

}  // namespace uavcf
