#include <doctest.h>

#include "uavcf/fronthaul.hpp"

using namespace uavcf;

namespace {

FronthaulConfig paper_config() {
  FronthaulConfig cfg;
  cfg.sampling_rate_hz = 30.72e6;
  cfg.quantizer_bits = 8;
  cfg.num_ap_antennas = 4;
  cfg.used_subcarriers = 1200;
  cfg.ofdm_symbol_s = 71.4e-6;
  return cfg;
}

FronthaulChannel random_channel(int n, int l, Rng& rng) {
  FronthaulChannel ch;
  ch.H.resize(n, l);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < l; ++j) ch.H(i, j) = rng.cnormal();
  }
  return ch;
}

}  // namespace

TEST_CASE("fronthaul rate requirements") {
  const FronthaulConfig cfg = paper_config();
  CHECK(fronthaul_rate_requirement(SplitOption::Option8, cfg) ==
        doctest::Approx(2.0 * 30.72e6 * 8 * 4).epsilon(1e-12));
  CHECK(fronthaul_rate_requirement(SplitOption::Option72, cfg) ==
        doctest::Approx(2.0 * 8 * 1200 * 4 / 71.4e-6).epsilon(1e-12));
  // f_s > N_used / T_s implies the Option 8 stream is heavier
  CHECK(fronthaul_rate_requirement(SplitOption::Option8, cfg) >
        fronthaul_rate_requirement(SplitOption::Option72, cfg));
}

TEST_CASE("zf precoder single column") {
  Rng rng(1);
  const FronthaulChannel ch = random_channel(8, 1, rng);
  const ZfPrecodingResult zf = zf_precoder(ch);
  CHECK(zf.effective_gain[0] == doctest::Approx(ch.H.col(0).squaredNorm()).epsilon(1e-12));
  const VectorXcd expected = ch.H.col(0).conjugate() / ch.H.col(0).norm();
  CHECK((zf.P.col(0) - expected).norm() <= 1e-12);
}

TEST_CASE("zf precoder orthogonal columns") {
  // orthogonal columns with norms c_l -> effective gain c_l^2
  FronthaulChannel ch;
  ch.H = MatrixXcd::Zero(4, 2);
  ch.H(0, 0) = cplx(2.0, 0.0);
  ch.H(1, 1) = cplx(0.0, 3.0);
  const ZfPrecodingResult zf = zf_precoder(ch);
  CHECK(zf.effective_gain[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(zf.effective_gain[1] == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("zf precoder nulls cross interference") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const FronthaulChannel ch = random_channel(8, 3, rng);
    const ZfPrecodingResult zf = zf_precoder(ch);
    const MatrixXcd cross = ch.H.transpose() * zf.P;
    double max_off = 0.0, max_diag = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) {
          max_diag = std::max(max_diag, std::abs(cross(i, j)));
          CHECK(cross(i, i).real() > 0.0);
          CHECK(std::abs(cross(i, i).imag()) <= 1e-9 * std::abs(cross(i, i)));
        } else {
          max_off = std::max(max_off, std::abs(cross(i, j)));
        }
      }
    }
    CHECK(max_off <= 1e-9 * max_diag);
    for (int j = 0; j < 3; ++j) {
      CHECK(zf.P.col(j).norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("zf precoder rejects rank deficient channels") {
  FronthaulChannel ch;
  ch.H = MatrixXcd::Zero(4, 2);
  ch.H.col(0).setConstant(cplx(1.0, 0.0));
  ch.H.col(1) = ch.H.col(0);  // identical columns
  CHECK_THROWS_AS(zf_precoder(ch), SingularChannelError);
}

TEST_CASE("fronthaul power expression") {
  FronthaulConfig cfg = paper_config();
  cfg.bandwidth_hz = 1e8;
  cfg.noise_psd_w_per_hz = 4e-21;

  FronthaulChannel ch;
  ch.H = MatrixXcd::Zero(2, 1);
  ch.H(0, 0) = cplx(1.0, 0.0);  // |h| = 1 so the inverse Gram entry is 1
  const ZfPrecodingResult zf = zf_precoder(ch);

  CHECK(fronthaul_power_required(zf, 0, 0.0, cfg) == 0.0);
  // rate = B gives (2^1 - 1) B N0
  CHECK(fronthaul_power_required(zf, 0, cfg.bandwidth_hz, cfg) ==
        doctest::Approx(cfg.bandwidth_hz * cfg.noise_psd_w_per_hz).epsilon(1e-12));
  // doubling the inverse Gram entry doubles the power
  const double p1 = fronthaul_power_for_gain(1.0, 5e8, cfg.bandwidth_hz, cfg.noise_psd_w_per_hz);
  const double p2 = fronthaul_power_for_gain(2.0, 5e8, cfg.bandwidth_hz, cfg.noise_psd_w_per_hz);
  CHECK(p2 == doctest::Approx(2.0 * p1).epsilon(1e-12));
  // overflow saturates instead of wrapping
  CHECK(std::isinf(fronthaul_power_for_gain(1.0, 1e12, 1e3, 4e-21)));
}

TEST_CASE("power is decreasing in bandwidth and increasing in rate") {
  const double n0 = 4e-21, g = 1e8;
  double prev = std::numeric_limits<double>::infinity();
  for (double b = 1e7; b <= 1e9; b *= 1.3) {
    const double p = fronthaul_power_for_gain(g, 1.9e9, b, n0);
    CHECK(p < prev);
    prev = p;
  }
  prev = 0.0;
  for (double r = 1e8; r <= 4e9; r *= 1.4) {
    const double p = fronthaul_power_for_gain(g, r, 1.5e8, n0);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("min bandwidth agrees with a dense grid search") {
  // single AP, G = 1: B solves (2^(R/B)-1) B N0 = P_max
  const double rate = 1.9e9, n0 = 4e-21, pmax = 1e-10;
  const double bisect = min_bandwidth_for_gain(1.0, rate, n0, pmax);

  double grid_best = std::numeric_limits<double>::infinity();
  const int steps = 200000;
  for (int i = 1; i <= steps; ++i) {
    const double b = 1e6 * std::pow(1e4, static_cast<double>(i) / steps);  // 1e6..1e10 log grid
    if (fronthaul_power_for_gain(1.0, rate, b, n0) <= pmax) {
      grid_best = b;
      break;
    }
  }
  CHECK(bisect == doctest::Approx(grid_best).epsilon(1e-3));

  // asymptotic feasibility limit: B -> inf power approaches R N0 ln 2 G
  const double floor = asymptotic_power_floor(1.0, rate, n0);
  CHECK(fronthaul_power_for_gain(1.0, rate, 1e15, n0) == doctest::Approx(floor).epsilon(1e-4));
  CHECK(std::isinf(min_bandwidth_for_gain(1.0, rate, n0, floor * 0.99)));
}

TEST_CASE("monte carlo min bandwidth prefers option 7.2") {
  const NetworkTopology topo = generate_topology({.num_uavs = 4, .num_ues = 1}, 7);
  FronthaulConfigSub6 ch_cfg;
  ch_cfg.num_cpu_antennas = 16;
  const FronthaulModel model = build_fronthaul_model(topo, ch_cfg);
  auto sampler = [&](Rng& r) { return sample_fronthaul(model, r); };

  FronthaulConfig cfg = paper_config();
  cfg.noise_psd_w_per_hz = 4e-21;
  cfg.max_power_w = 10.0;

  Rng rng(5);
  const MinBandwidthResult opt8 = min_bandwidth_single_ap(sampler, SplitOption::Option8, cfg, 50, rng);
  Rng rng2(5);
  const MinBandwidthResult opt72 =
      min_bandwidth_single_ap(sampler, SplitOption::Option72, cfg, 50, rng2);
  REQUIRE(opt8.feasible_draws == 50);
  REQUIRE(opt72.feasible_draws == 50);
  CHECK(opt72.mean_hz < opt8.mean_hz);
  CHECK(opt72.median_hz < opt8.median_hz);
}
