#include <doctest.h>

#include <fstream>
#include <sstream>

#include "uavcf/topology.hpp"

using namespace uavcf;

namespace {

TopologyConfig paper_scale() {
  TopologyConfig cfg;
  cfg.num_uavs = 16;
  cfg.num_ues = 8;
  cfg.area_side_m = 1000.0;
  cfg.uav_height_m = 200.0;
  cfg.cpu_height_m = 50.0;
  return cfg;
}

}  // namespace

TEST_CASE("generate_topology basic layout") {
  const NetworkTopology topo = generate_topology(paper_scale(), 123);
  REQUIRE(topo.num_uavs() == 16);
  REQUIRE(topo.num_ues() == 8);
  CHECK(topo.cpu.x == 500.0);
  CHECK(topo.cpu.y == 500.0);
  CHECK(topo.cpu.z == 50.0);
  for (const auto& u : topo.uavs) {
    CHECK(u.z == 200.0);
    CHECK(u.x >= 0.0);
    CHECK(u.x <= 1000.0);
    CHECK(u.y >= 0.0);
    CHECK(u.y <= 1000.0);
  }
  for (const auto& u : topo.ues) CHECK(u.z == 0.0);
}

TEST_CASE("generate_topology is deterministic") {
  const NetworkTopology a = generate_topology(paper_scale(), 77);
  const NetworkTopology b = generate_topology(paper_scale(), 77);
  CHECK(topology_to_json(a) == topology_to_json(b));
  const NetworkTopology c = generate_topology(paper_scale(), 78);
  CHECK(topology_to_json(a) != topology_to_json(c));
}

TEST_CASE("golden single link topology") {
  TopologyConfig cfg;
  cfg.num_uavs = 1;
  cfg.num_ues = 1;
  const NetworkTopology topo = generate_topology(cfg, 0);
  std::ifstream in("data/golden_topology_l1k1_seed0.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string golden = ss.str();
  while (!golden.empty() && (golden.back() == '\n' || golden.back() == '\r')) golden.pop_back();
  CHECK(topology_to_json(topo) == golden);
}

TEST_CASE("elevation angle") {
  const Position3D a{0.0, 0.0, 0.0};
  CHECK(elevation_angle(a, {150.0, 0.0, 150.0}) == doctest::Approx(45.0));
  CHECK(elevation_angle(a, {0.0, 0.0, 10.0}) == doctest::Approx(90.0));
  CHECK(elevation_angle(a, {346.41, 0.0, 200.0}) == doctest::Approx(30.0).epsilon(1e-5));
  CHECK_THROWS_AS(elevation_angle(a, a), std::invalid_argument);
}

TEST_CASE("los probability closed forms and monotonicity") {
  PathLossParams fronthaul;
  fronthaul.eta1 = 4.8;
  fronthaul.eta2 = 0.43;
  CHECK(los_probability(4.8, fronthaul) == doctest::Approx(1.0 / 5.8).epsilon(1e-6));

  PathLossParams access;
  access.eta1 = 9.61;
  access.eta2 = 0.16;
  CHECK(los_probability(90.0, access) == doctest::Approx(0.999975).epsilon(1e-5));

  double prev = -1.0;
  for (double theta = 0.0; theta <= 90.0; theta += 1.5) {
    const double p = los_probability(theta, access);
    CHECK(p > prev);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("mean path loss free-space values") {
  PathLossParams p;
  p.excess_los_db = 0.0;
  p.excess_nlos_db = 0.0;

  p.carrier_hz = 3.5e9;
  CHECK(mean_path_loss_db({0, 0, 0}, {1000.0, 0, 0.001}, p) == doctest::Approx(103.32).epsilon(1e-4));

  p.carrier_hz = 28e9;
  CHECK(mean_path_loss_db({0, 0, 0}, {250.0, 0, 0.001}, p) == doctest::Approx(109.34).epsilon(1e-4));

  // equal excess terms shift the result by exactly that amount for any angle
  PathLossParams q = p;
  q.excess_los_db = 7.0;
  q.excess_nlos_db = 7.0;
  const Position3D a{0, 0, 0}, b{120.0, 40.0, 90.0};
  CHECK(mean_path_loss_db(a, b, q) ==
        doctest::Approx(mean_path_loss_db(a, b, p) + 7.0).epsilon(1e-12));
}

TEST_CASE("mean path loss grows with distance") {
  PathLossParams p;
  p.carrier_hz = 3.5e9;
  const Position3D origin{0, 0, 0};
  double prev = -1.0;
  for (double d = 100.0; d <= 2000.0; d += 100.0) {
    // fixed elevation so only distance moves
    const double loss = mean_path_loss_db(origin, {d, 0.0, d}, p);
    CHECK(loss > prev);
    prev = loss;
  }
}

TEST_CASE("topology json round trip") {
  const NetworkTopology topo = generate_topology(paper_scale(), 5);
  const NetworkTopology back = topology_from_json(topology_to_json(topo));
  CHECK(topology_to_json(back) == topology_to_json(topo));
  CHECK(topology_hash(back) == topology_hash(topo));
}
