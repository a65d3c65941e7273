#pragma once

#include <string>
#include <vector>

#include "uavcf/common.hpp"
#include "uavcf/rng.hpp"

namespace uavcf {

struct Position3D {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  double z = 0.0;  // meters above ground, >= 0
};

inline double distance3d(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double horizontal_distance(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Air-to-ground path loss parameters for one link class.
///
/// eta1/eta2 shape the elevation-dependent LoS probability; the excess terms
/// are added on top of free-space loss for the LoS and NLoS states.
struct PathLossParams {
  double eta1 = 4.8;
  double eta2 = 0.43;
  double excess_los_db = 1.0;
  double excess_nlos_db = 20.0;
  double carrier_hz = 3.5e9;
};

struct TopologyConfig {
  int num_uavs = 16;
  int num_ues = 8;
  double area_side_m = 1000.0;
  double uav_height_m = 200.0;
  double cpu_height_m = 50.0;
};

struct NetworkTopology {
  Position3D cpu;
  std::vector<Position3D> uavs;
  std::vector<Position3D> ues;
  double area_side = 0.0;
  std::uint64_t seed = 0;

  int num_uavs() const { return static_cast<int>(uavs.size()); }
  int num_ues() const { return static_cast<int>(ues.size()); }
};

/// Drops UAVs and UEs uniformly over the square area; the CPU sits at the
/// area center. Deterministic for a fixed (config, seed).
NetworkTopology generate_topology(const TopologyConfig& config, std::uint64_t seed);

/// Elevation angle in degrees of b as seen from a (90 when directly overhead).
double elevation_angle(const Position3D& a, const Position3D& b);

/// Logistic LoS probability as a function of elevation angle in degrees.
double los_probability(double theta_deg, const PathLossParams& params);

/// LoS-probability-weighted air-to-ground path loss in dB over the 3-D distance.
double mean_path_loss_db(const Position3D& a, const Position3D& b, const PathLossParams& params);

/// Free-space path loss in dB at distance d (3-D) and the configured carrier.
double free_space_path_loss_db(double distance_m, double carrier_hz);

std::string topology_to_json(const NetworkTopology& topo);
NetworkTopology topology_from_json(const std::string& text);
void save_topology(const NetworkTopology& topo, const std::string& path);
NetworkTopology load_topology(const std::string& path);

/// Stable content hash used to key cached statistics to a topology.
std::uint64_t topology_hash(const NetworkTopology& topo);

}  // namespace uavcf
