#pragma once

#include <optional>
#include <vector>

#include "uavcf/common.hpp"
#include "uavcf/rng.hpp"
#include "uavcf/topology.hpp"

namespace uavcf {

/// Uniform planar array, half-wavelength spacing, antennas indexed row-major.
struct ArrayGeometry {
  int rows = 1;
  int cols = 1;
  double spacing_wavelengths = 0.5;

  int size() const { return rows * cols; }

  /// Squarest factorization of n (exact square when n is a perfect square).
  static ArrayGeometry for_antennas(int n);
};

/// Array response for a plane wave from (azimuth, elevation); entries are
/// unit modulus so the squared norm equals the antenna count exactly.
VectorXcd upa_response(double azimuth_deg, double elevation_deg, const ArrayGeometry& geometry);

/// Correlation matrix of the local scattering model: azimuth Gaussian around
/// the nominal angle with standard deviation asd_deg, elevation fixed
/// (2-D scattering). Hermitian PSD with trace = gain * antenna count.
MatrixXcd local_scattering_correlation(double nominal_az_deg, double asd_deg,
                                       const ArrayGeometry& geometry, double gain,
                                       double nominal_el_deg = 0.0);

enum class LosMode {
  ProbabilisticMix,  // LoS-probability-weighted power split, fading every draw
  Bernoulli,         // LoS/NLoS state drawn per realization
};

struct MmWaveParams {
  int n_paths = 1;                 // scattered paths on top of the direct one
  double scatter_rel_db = -10.0;   // total scattered power relative to direct
  double angle_window_deg = 10.0;  // scatter angle window around the direct path
};

struct FronthaulChannel {
  MatrixXcd H;  // N_c x L, column l is the CPU-to-UAV l channel

  int num_antennas() const { return static_cast<int>(H.rows()); }
  int num_uavs() const { return static_cast<int>(H.cols()); }
};

struct Sub6ChannelConfig {
  PathLossParams pathloss;
  double asd_deg = 15.0;
  LosMode los_mode = LosMode::ProbabilisticMix;
  // When set, fixes the LoS power fraction to K/(1+K); otherwise the link's
  // LoS probability is used as the fraction.
  std::optional<double> rician_factor_db;
};

struct FronthaulConfigSub6 : Sub6ChannelConfig {
  int num_cpu_antennas = 64;
};

struct FronthaulConfigMmWave {
  PathLossParams pathloss;
  MmWaveParams mmwave;
  int num_cpu_antennas = 1024;
};

/// Deterministic per-link quantities for one fronthaul, reusable across draws.
struct FronthaulLinkModel {
  double mean_gain = 0.0;  // linear large-scale gain
  double p_los = 0.0;
  double az_deg = 0.0;  // direct-path angles seen from the CPU array
  double el_deg = 0.0;
  double los_power = 0.0;   // gain assigned to the deterministic component
  double nlos_power = 0.0;  // gain assigned to the fading component
  // sub-6 only: Kronecker factors of the scattering correlation (unit trace
  // per antenna); full matrix is row_sqrt row_sqrt^H (kron) col col^H.
  MatrixXcd row_corr_sqrt;
  VectorXcd col_response;
  // mmWave only
  std::vector<double> beta;  // per scattered path average power
};

struct FronthaulModel {
  ArrayGeometry geometry;
  std::vector<FronthaulLinkModel> links;  // length L
  LosMode los_mode = LosMode::ProbabilisticMix;
  MmWaveParams mmwave;
  bool is_mmwave = false;
};

FronthaulModel build_fronthaul_model(const NetworkTopology& topo, const FronthaulConfigSub6& cfg);
FronthaulModel build_fronthaul_model(const NetworkTopology& topo, const FronthaulConfigMmWave& cfg);

/// One realization of the fronthaul channel matrix from a prebuilt model.
FronthaulChannel sample_fronthaul(const FronthaulModel& model, Rng& rng);

/// Convenience one-shot samplers.
FronthaulChannel sample_mmwave_fronthaul(const NetworkTopology& topo,
                                         const FronthaulConfigMmWave& cfg, Rng& rng);
FronthaulChannel sample_sub6_fronthaul(const NetworkTopology& topo, const FronthaulConfigSub6& cfg,
                                       Rng& rng);

struct AccessChannelConfig : Sub6ChannelConfig {
  int num_ap_antennas = 4;
};

/// Deterministic statistics of one UE-to-UAV access link.
struct AccessLinkModel {
  double mean_gain = 0.0;
  double p_los = 0.0;
  double los_power = 0.0;
  double nlos_power = 0.0;
  VectorXcd steering;       // unit-modulus array response toward the UE
  VectorXcd los_response;   // sqrt(los_power) * steering
  MatrixXcd nlos_corr;      // R_kl, trace = N_a * nlos_power
  MatrixXcd nlos_corr_sqrt;
  MatrixXcd full_corr;  // E{h h^H} including the random-phase LoS part
};

struct AccessChannelModel {
  ArrayGeometry geometry;
  int num_ues = 0;
  int num_uavs = 0;
  LosMode los_mode = LosMode::ProbabilisticMix;
  std::vector<AccessLinkModel> links;  // k * L + l

  const AccessLinkModel& link(int k, int l) const { return links[k * num_uavs + l]; }
};

AccessChannelModel build_access_model(const NetworkTopology& topo, const AccessChannelConfig& cfg);

/// One realization per (UE, UAV) pair; h[k*L + l] has length N_a.
struct AccessChannelSet {
  int num_ues = 0;
  int num_uavs = 0;
  std::vector<VectorXcd> h;

  const VectorXcd& channel(int k, int l) const { return h[k * num_uavs + l]; }
};

AccessChannelSet sample_access_channels(const AccessChannelModel& model, Rng& rng);
AccessChannelSet sample_access_channels(const NetworkTopology& topo,
                                        const AccessChannelConfig& cfg, Rng& rng);

/// Azimuth/elevation of b as seen from an array at a (degrees).
void bearing_angles(const Position3D& a, const Position3D& b, double& az_deg, double& el_deg);

}  // namespace uavcf
