#include <doctest.h>

#include <complex>

#include "uavcf/channels.hpp"

using namespace uavcf;

namespace {

NetworkTopology tiny_topology(int num_uavs = 1, int num_ues = 1) {
  TopologyConfig cfg;
  cfg.num_uavs = num_uavs;
  cfg.num_ues = num_ues;
  return generate_topology(cfg, 101);
}

}  // namespace

TEST_CASE("upa response boresight and norms") {
  const ArrayGeometry geom{4, 4, 0.5};
  const VectorXcd bore = upa_response(0.0, 0.0, geom);
  for (int i = 0; i < bore.size(); ++i) {
    CHECK(bore[i].real() == doctest::Approx(1.0));
    CHECK(bore[i].imag() == doctest::Approx(0.0));
  }
  for (double az : {-60.0, 10.0, 45.0}) {
    for (double el : {-30.0, 0.0, 70.0}) {
      const VectorXcd a = upa_response(az, el, geom);
      CHECK(a.squaredNorm() == doctest::Approx(16.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("upa response phases for a 2x2 array") {
  // u = 0.5, v = 0: phases pi*(m*u) row-major -> {0, 0, pi/2, pi/2}
  const ArrayGeometry geom{2, 2, 0.5};
  const double az = rad_to_deg(std::asin(0.5));
  const VectorXcd a = upa_response(az, 0.0, geom);
  CHECK(std::arg(a[0]) == doctest::Approx(0.0));
  CHECK(std::arg(a[1]) == doctest::Approx(0.0));
  CHECK(std::arg(a[2]) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(std::arg(a[3]) == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("local scattering correlation structure") {
  const double gain = 2.5;
  // planar geometry: Hermitian, PSD, exact trace
  const ArrayGeometry planar = ArrayGeometry::for_antennas(4);
  const MatrixXcd rp = local_scattering_correlation(30.0, 15.0, planar, gain);
  REQUIRE(rp.rows() == 4);
  CHECK((rp - rp.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(rp.trace().real() == doctest::Approx(4.0 * gain).epsilon(1e-9));
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(rp);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * rp.trace().real());

  // four-element line array: azimuth spread decorrelates every antenna pair
  const ArrayGeometry line{4, 1, 0.5};
  const MatrixXcd r = local_scattering_correlation(30.0, 15.0, line, gain);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(std::abs(r(i, j)) < std::abs(r(i, i)));
    }
  }
}

TEST_CASE("local scattering matches a direct quadrature oracle") {
  // independent oracle: naive trapezoid integration over +-4.5 sigma
  const ArrayGeometry geom{4, 1, 0.5};
  const double asd = 15.0, nominal = 30.0, gain = 1.0;
  const int grid = 20001;
  const double sigma = deg_to_rad(asd);
  const double lo = deg_to_rad(nominal) - 4.5 * sigma;
  const double hi = deg_to_rad(nominal) + 4.5 * sigma;
  MatrixXcd oracle = MatrixXcd::Zero(4, 4);
  double wsum = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double phi = lo + (hi - lo) * i / (grid - 1);
    const double t = (phi - deg_to_rad(nominal)) / sigma;
    double w = std::exp(-0.5 * t * t);
    if (i == 0 || i == grid - 1) w *= 0.5;
    VectorXcd a(4);
    for (int m = 0; m < 4; ++m) {
      const double phase = kPi * m * std::sin(phi);
      a[m] = cplx(std::cos(phase), std::sin(phase));
    }
    oracle += w * (a * a.adjoint());
    wsum += w;
  }
  oracle *= gain / wsum;
  const MatrixXcd r = local_scattering_correlation(nominal, asd, geom, gain);
  CHECK((r - oracle).cwiseAbs().maxCoeff() <= 2e-6);
}

TEST_CASE("vanishing spread collapses to rank one") {
  const ArrayGeometry geom = ArrayGeometry::for_antennas(4);
  const MatrixXcd r = local_scattering_correlation(20.0, 1e-4, geom, 1.0);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(r);
  CHECK(eig.eigenvalues()[3] == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(eig.eigenvalues()[2] <= 1e-4);
}

TEST_CASE("mmwave fronthaul moments and determinism") {
  const NetworkTopology topo = tiny_topology();
  FronthaulConfigMmWave cfg;
  cfg.pathloss.carrier_hz = 28e9;
  cfg.num_cpu_antennas = 16;

  const FronthaulModel model = build_fronthaul_model(topo, cfg);
  const double beta1 = model.links[0].beta[0];

  Rng rng_a(900);
  Rng rng_b(900);
  const FronthaulChannel ha = sample_fronthaul(model, rng_a);
  const FronthaulChannel hb = sample_fronthaul(model, rng_b);
  CHECK((ha.H - hb.H).cwiseAbs().maxCoeff() == 0.0);

  // n_paths = 0 gives the pure direct path: rank-1 column of known norm
  FronthaulConfigMmWave los_only = cfg;
  los_only.mmwave.n_paths = 0;
  Rng rng_c(901);
  const FronthaulChannel hc = sample_mmwave_fronthaul(topo, los_only, rng_c);
  const double gain = model.links[0].mean_gain;
  CHECK(hc.H.col(0).squaredNorm() == doctest::Approx(16.0 * gain).epsilon(1e-9));

  // sample mean of |alpha_1|^2 approaches beta_1 (scattered-path power)
  Rng rng_d(902);
  const int draws = 100000;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    const cplx alpha = std::sqrt(beta1) * rng_d.cnormal();
    acc += std::norm(alpha);
  }
  CHECK(acc / draws == doctest::Approx(beta1).epsilon(0.03));

  // channel second moment matches N_c * gain within Monte-Carlo tolerance
  Rng rng_e(903);
  double power = 0.0;
  const int ch_draws = 20000;
  for (int i = 0; i < ch_draws; ++i) {
    power += sample_fronthaul(model, rng_e).H.col(0).squaredNorm();
  }
  CHECK(power / ch_draws == doctest::Approx(16.0 * gain).epsilon(0.03));
}

TEST_CASE("sub6 fronthaul second moment and determinism") {
  const NetworkTopology topo = tiny_topology();
  FronthaulConfigSub6 cfg;
  cfg.num_cpu_antennas = 16;
  const FronthaulModel model = build_fronthaul_model(topo, cfg);
  const double gain = model.links[0].mean_gain;

  Rng a(31), b(31);
  CHECK((sample_fronthaul(model, a).H - sample_fronthaul(model, b).H).cwiseAbs().maxCoeff() ==
        0.0);

  Rng rng(32);
  double power = 0.0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    power += sample_fronthaul(model, rng).H.col(0).squaredNorm();
  }
  CHECK(power / draws == doctest::Approx(16.0 * gain).epsilon(0.03));

  // huge Rician factor concentrates the power on the deterministic component
  FronthaulConfigSub6 pure_los = cfg;
  pure_los.rician_factor_db = 80.0;
  const FronthaulModel los_model = build_fronthaul_model(topo, pure_los);
  Rng rng2(33);
  const FronthaulChannel h = sample_fronthaul(los_model, rng2);
  CHECK(h.H.col(0).squaredNorm() == doctest::Approx(16.0 * gain).epsilon(1e-3));
}

TEST_CASE("access channels: scalar NLoS link is standard complex gaussian") {
  const NetworkTopology topo = tiny_topology();
  AccessChannelConfig cfg;
  cfg.num_ap_antennas = 1;
  cfg.rician_factor_db = -300.0;  // pure NLoS

  AccessChannelModel model = build_access_model(topo, cfg);
  // unit gain override for the moment test
  model.links[0].nlos_power = 1.0;
  model.links[0].nlos_corr = MatrixXcd::Identity(1, 1);
  model.links[0].nlos_corr_sqrt = MatrixXcd::Identity(1, 1);
  model.links[0].los_response = VectorXcd::Zero(1);

  Rng rng(44);
  const int draws = 100000;
  double m2 = 0.0, m4 = 0.0;
  cplx mean = 0.0;
  for (int i = 0; i < draws; ++i) {
    const AccessChannelSet set = sample_access_channels(model, rng);
    const cplx v = set.channel(0, 0)[0];
    mean += v;
    m2 += std::norm(v);
    m4 += std::norm(v) * std::norm(v);
  }
  mean /= static_cast<double>(draws);
  m2 /= draws;
  m4 /= draws;
  CHECK(std::abs(mean) < 0.02);
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(m4 == doctest::Approx(2.0).epsilon(0.06));  // E|g|^4 = 2 for CN(0,1)
}

TEST_CASE("access channels edge cases") {
  const NetworkTopology topo = tiny_topology();
  AccessChannelConfig cfg;
  cfg.num_ap_antennas = 4;

  AccessChannelModel model = build_access_model(topo, cfg);
  // zero large-scale gain gives the zero vector
  model.links[0].los_response.setZero();
  model.links[0].nlos_power = 0.0;
  Rng rng(50);
  const AccessChannelSet set = sample_access_channels(model, rng);
  CHECK(set.channel(0, 0).norm() == 0.0);

  Rng a(51), b(51);
  const AccessChannelModel fresh = build_access_model(topo, cfg);
  const AccessChannelSet s1 = sample_access_channels(fresh, a);
  const AccessChannelSet s2 = sample_access_channels(fresh, b);
  CHECK((s1.channel(0, 0) - s2.channel(0, 0)).norm() == 0.0);
}

TEST_CASE("access correlation trace matches the NLoS gain") {
  const NetworkTopology topo = tiny_topology(2, 2);
  AccessChannelConfig cfg;
  cfg.num_ap_antennas = 4;
  const AccessChannelModel model = build_access_model(topo, cfg);
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      const auto& link = model.link(k, l);
      CHECK(link.nlos_corr.trace().real() ==
            doctest::Approx(4.0 * link.nlos_power).epsilon(1e-9));
      CHECK((link.nlos_corr - link.nlos_corr.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}
