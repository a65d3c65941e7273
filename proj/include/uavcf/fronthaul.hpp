#pragma once

#include <functional>

#include "uavcf/channels.hpp"
#include "uavcf/common.hpp"

namespace uavcf {

/// Functional split of the PHY between CPU and UAV-AP. Option8 leaves only RF
/// at the UAV (time-domain IQ on the fronthaul); Option72 moves the low-PHY
/// (inverse DFT) on board and carries frequency-domain samples.
enum class SplitOption {
  Option8,
  Option72,
};

/// 1 when the split performs baseband processing at the UAV-AP, else 0.
inline int split_indicator(SplitOption split) { return split == SplitOption::Option72 ? 1 : 0; }

struct FronthaulConfig {
  double bandwidth_hz = 150e6;        // B_F
  double noise_psd_w_per_hz = 4e-21;  // N_0
  double max_power_w = 10.0;          // CPU transmit budget across UAV-APs
  double sampling_rate_hz = 30.72e6;  // f_s
  int quantizer_bits = 8;             // N_bits
  int used_subcarriers = 1200;        // N_used
  double ofdm_symbol_s = 71.4e-6;     // T_s
  int num_ap_antennas = 4;            // N_a carried per UAV-AP
};

/// Downlink fronthaul rate requirement per UAV-AP in bit/s.
double fronthaul_rate_requirement(SplitOption split, const FronthaulConfig& cfg);

struct ZfPrecodingResult {
  MatrixXcd P;                   // N_c x L, unit-norm columns
  VectorXd effective_gain;       // 1 / [(H^T H*)^{-1}]_ll
  VectorXd inverse_gram_diag;    // [(H^T H*)^{-1}]_ll
};

/// Zero-forcing precoder over the conjugated Gram system; nulls co-UAV
/// interference so H^T P is diagonal with real positive entries.
/// Throws SingularChannelError when the Gram matrix condition number exceeds
/// the threshold (degenerate geometry).
ZfPrecodingResult zf_precoder(const FronthaulChannel& channel, double cond_threshold = 1e10);

/// CPU transmit power needed to sustain `rate_bps` toward UAV-AP l after ZF.
/// Saturates to +inf when the exponent overflows (infeasible downstream).
double fronthaul_power_required(const ZfPrecodingResult& zf, int l, double rate_bps,
                                const FronthaulConfig& cfg);

/// Same expression from the inverse-Gram diagonal entry directly.
double fronthaul_power_for_gain(double inverse_gram_diag, double rate_bps, double bandwidth_hz,
                                double noise_psd);

/// Required-power limit for bandwidth -> infinity (feasibility pre-check).
double asymptotic_power_floor(double inverse_gram_diag, double rate_bps, double noise_psd);

struct MinBandwidthResult {
  double mean_hz = 0.0;
  double median_hz = 0.0;
  double stderr_hz = 0.0;
  int feasible_draws = 0;
  int infeasible_draws = 0;
};

/// Monte-Carlo estimate of the smallest fronthaul bandwidth that activates the
/// single best UAV-AP within the CPU power budget. `channel_sampler` must
/// return a fresh draw (topology and fading) on every call.
MinBandwidthResult min_bandwidth_single_ap(
    const std::function<FronthaulChannel(Rng&)>& channel_sampler, SplitOption split,
    const FronthaulConfig& cfg, int n_mc, Rng& rng);

/// Smallest bandwidth with required power <= budget for one gain value;
/// bisection over [lo, hi], valid because the power is decreasing in B.
double min_bandwidth_for_gain(double inverse_gram_diag, double rate_bps, double noise_psd,
                              double power_budget_w, double lo_hz = 1e3, double hi_hz = 100e9,
                              double rel_tol = 1e-4);

}  // namespace uavcf
