#pragma once

#include <string>
#include <vector>

#include "uavcf/channels.hpp"
#include "uavcf/common.hpp"

namespace uavcf {

struct AccessConfig {
  double bandwidth_hz = 20e6;          // B_A
  double noise_psd_w_per_hz = 4e-21;   // thermal density at the UE
  double noise_figure_db = 7.0;
  int coherence_samples = 192;  // tau_c
  int pilot_samples = 8;        // tau_u
  double pilot_power_w = 0.1;
  int num_ap_antennas = 4;
  bool perfect_csi = false;

  int data_samples() const { return coherence_samples - pilot_samples; }
  double noise_power_w() const {
    return bandwidth_hz * noise_psd_w_per_hz * db_to_linear(noise_figure_db);
  }
};

/// Orthogonal pilot assignment; requires K <= tau_u.
std::vector<int> assign_pilots(int num_ues, int tau_u);

struct LmmseEstimate {
  VectorXcd hhat;
  MatrixXcd error_cov;
};

/// LMMSE channel estimate from a despread pilot observation
/// y = sqrt(p tau_u) h + n with n ~ CN(0, sigma^2 I) and prior h ~ CN(0, R).
LmmseEstimate lmmse_estimate(const VectorXcd& pilot_observation, const MatrixXcd& r,
                             const AccessConfig& cfg);

/// Regularized local precoding directions for one AP: v_k = M^{-1} hhat_k with
/// M = p sum_i (hhat_i hhat_i^H + C_err,i) + sigma^2 I. The downlink precoder
/// is the conjugate of v (TDD reciprocity: the downlink channel is the
/// transpose of the uplink one), normalized by sqrt(E ||v||^2) over the
/// Monte-Carlo ensemble.
std::vector<VectorXcd> lmmse_precoder_directions(const std::vector<LmmseEstimate>& estimates,
                                                 const AccessConfig& cfg);

/// Hardening statistics of the effective downlink channel, estimated over
/// n_mc coherence blocks.
struct SinrStatistics {
  int num_ues = 0;
  int num_uavs = 0;
  int n_mc = 0;
  double noise_power = 0.0;  // sigma_a^2 used during estimation
  MatrixXd b;                // K x L, E{h^T w} real parts (clamped at 0)
  MatrixXd b_stderr;         // standard error of each b entry
  std::vector<MatrixXcd> C;  // K*K entries of L x L, index k * K + i
  double max_imag_ratio = 0.0;  // diagnostic |Im|/|Re| of the b estimates
  int clamped_b_entries = 0;

  const MatrixXcd& c(int k, int i) const { return C[k * num_ues + i]; }
  MatrixXcd& c(int k, int i) { return C[k * num_ues + i]; }
};

SinrStatistics estimate_sinr_statistics(const AccessChannelModel& model, const AccessConfig& cfg,
                                        int n_mc, const Rng& rng);
SinrStatistics estimate_sinr_statistics(const NetworkTopology& topo,
                                        const AccessChannelConfig& ch_cfg,
                                        const AccessConfig& cfg, int n_mc, const Rng& rng);

/// Transmit amplitude allocation: rho(k, l) = sqrt(P^a_{kl}), alpha gates UAVs.
struct PowerAllocation {
  MatrixXd rho;     // K x L, nonnegative
  VectorXi alpha;   // length L, 0/1

  static PowerAllocation zeros(int num_ues, int num_uavs);
  double transmit_power() const { return rho.squaredNorm(); }
  double uav_amplitude(int l) const { return rho.col(l).norm(); }
  int active_count() const { return alpha.sum(); }
};

struct SinrEvaluation {
  VectorXd gamma;                  // per UE
  std::vector<bool> clamped;       // interference clamped at zero
};

/// Effective downlink SINR per UE from the hardening statistics.
SinrEvaluation effective_sinr(const SinrStatistics& stats, const PowerAllocation& alloc);

/// (tau_d / tau_c) log2(1 + gamma) in bit/s/Hz.
double spectral_efficiency(double gamma, const AccessConfig& cfg);

/// Cache of statistics keyed by the generating context; loading validates the
/// key and returns false on any mismatch.
struct StatsCacheKey {
  std::uint64_t topology_hash = 0;
  std::uint64_t config_hash = 0;
  int n_mc = 0;
  std::uint64_t seed = 0;
};

std::uint64_t access_config_hash(const AccessChannelConfig& ch_cfg, const AccessConfig& cfg);
void save_sinr_statistics(const SinrStatistics& stats, const StatsCacheKey& key,
                          const std::string& path);
bool load_sinr_statistics(const std::string& path, const StatsCacheKey& expected,
                          SinrStatistics& out);

}  // namespace uavcf
