#include "uavcf/topology.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uavcf {

NetworkTopology generate_topology(const TopologyConfig& config, std::uint64_t seed) {
  if (config.num_uavs < 1 || config.num_ues < 1) {
    throw UnsupportedConfigError("generate_topology: need at least one UAV and one UE");
  }
  if (config.area_side_m <= 0.0) {
    throw UnsupportedConfigError("generate_topology: area side must be positive");
  }
  NetworkTopology topo;
  topo.area_side = config.area_side_m;
  topo.seed = seed;
  topo.cpu = {0.5 * config.area_side_m, 0.5 * config.area_side_m, config.cpu_height_m};

  Rng rng = Rng(seed).stream("topology");
  topo.uavs.reserve(config.num_uavs);
  for (int l = 0; l < config.num_uavs; ++l) {
    topo.uavs.push_back({rng.uniform(0.0, config.area_side_m),
                         rng.uniform(0.0, config.area_side_m), config.uav_height_m});
  }
  topo.ues.reserve(config.num_ues);
  for (int k = 0; k < config.num_ues; ++k) {
    topo.ues.push_back({rng.uniform(0.0, config.area_side_m),
                        rng.uniform(0.0, config.area_side_m), 0.0});
  }
  return topo;
}

double elevation_angle(const Position3D& a, const Position3D& b) {
  const double dz = b.z - a.z;
  const double dh = horizontal_distance(a, b);
  if (dh == 0.0 && dz == 0.0) {
    throw UnsupportedConfigError("elevation_angle: coincident positions");
  }
  if (dh == 0.0) return dz >= 0.0 ? 90.0 : -90.0;
  return rad_to_deg(std::atan2(dz, dh));
}

double los_probability(double theta_deg, const PathLossParams& params) {
  return 1.0 / (1.0 + params.eta1 * std::exp(-params.eta2 * (theta_deg - params.eta1)));
}

double free_space_path_loss_db(double distance_m, double carrier_hz) {
  return 20.0 * std::log10(4.0 * kPi * carrier_hz * distance_m / kSpeedOfLight);
}

double mean_path_loss_db(const Position3D& a, const Position3D& b, const PathLossParams& params) {
  const double d = distance3d(a, b);
  if (d == 0.0) throw UnsupportedConfigError("mean_path_loss_db: coincident positions");
  const double theta = std::abs(elevation_angle(a, b));
  const double p_los = los_probability(theta, params);
  const double fspl = free_space_path_loss_db(d, params.carrier_hz);
  return fspl + p_los * params.excess_los_db + (1.0 - p_los) * params.excess_nlos_db;
}

namespace {

nlohmann::json position_to_json(const Position3D& p) {
  return nlohmann::json{{"x_m", p.x}, {"y_m", p.y}, {"z_m", p.z}};
}

Position3D position_from_json(const nlohmann::json& j) {
  return {j.at("x_m").get<double>(), j.at("y_m").get<double>(), j.at("z_m").get<double>()};
}

}  // namespace

std::string topology_to_json(const NetworkTopology& topo) {
  nlohmann::json j;
  j["cpu"] = position_to_json(topo.cpu);
  j["uavs"] = nlohmann::json::array();
  for (const auto& p : topo.uavs) j["uavs"].push_back(position_to_json(p));
  j["ues"] = nlohmann::json::array();
  for (const auto& p : topo.ues) j["ues"].push_back(position_to_json(p));
  j["area_side_m"] = topo.area_side;
  j["seed"] = topo.seed;
  return j.dump(2);
}

NetworkTopology topology_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  NetworkTopology topo;
  topo.cpu = position_from_json(j.at("cpu"));
  for (const auto& p : j.at("uavs")) topo.uavs.push_back(position_from_json(p));
  for (const auto& p : j.at("ues")) topo.ues.push_back(position_from_json(p));
  topo.area_side = j.at("area_side_m").get<double>();
  topo.seed = j.at("seed").get<std::uint64_t>();
  return topo;
}

void save_topology(const NetworkTopology& topo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_topology: cannot open " + path);
  out << topology_to_json(topo) << "\n";
}

NetworkTopology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_topology: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return topology_from_json(ss.str());
}

std::uint64_t topology_hash(const NetworkTopology& topo) {
  // Hash the canonical JSON text so the key is stable across processes.
  return Rng::fnv1a(topology_to_json(topo));
}

}  // namespace uavcf
