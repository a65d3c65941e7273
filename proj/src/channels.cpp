#include "uavcf/channels.hpp"

#include <Eigen/Eigenvalues>

namespace uavcf {

ArrayGeometry ArrayGeometry::for_antennas(int n) {
  if (n < 1) throw UnsupportedConfigError("ArrayGeometry: antenna count must be positive");
  int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (r > 1 && n % r != 0) --r;
  return {r, n / r, 0.5};
}

void bearing_angles(const Position3D& a, const Position3D& b, double& az_deg, double& el_deg) {
  const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
  az_deg = rad_to_deg(std::atan2(dy, dx));
  el_deg = rad_to_deg(std::atan2(dz, std::sqrt(dx * dx + dy * dy)));
}

VectorXcd upa_response(double azimuth_deg, double elevation_deg, const ArrayGeometry& geometry) {
  const double u = std::cos(deg_to_rad(elevation_deg)) * std::sin(deg_to_rad(azimuth_deg));
  const double v = std::sin(deg_to_rad(elevation_deg));
  const double scale = 2.0 * kPi * geometry.spacing_wavelengths;
  VectorXcd a(geometry.size());
  for (int m = 0; m < geometry.rows; ++m) {
    for (int q = 0; q < geometry.cols; ++q) {
      const double phase = scale * (m * u + q * v);
      a[m * geometry.cols + q] = cplx(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

namespace {

// Row-factor response exp(j*2*pi*spacing*m*u), m = 0..rows-1.
VectorXcd row_response(double u, int rows, double spacing) {
  VectorXcd a(rows);
  for (int m = 0; m < rows; ++m) {
    const double phase = 2.0 * kPi * spacing * m * u;
    a[m] = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

VectorXcd col_response_for(double v, int cols, double spacing) {
  VectorXcd a(cols);
  for (int q = 0; q < cols; ++q) {
    const double phase = 2.0 * kPi * spacing * q * v;
    a[q] = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

// E{a_row(u(phi)) a_row(u(phi))^H} over phi ~ N(nominal, asd^2), truncated at
// 4.5 sigma and renormalized, composite Simpson weights. Positive weights on
// rank-1 terms keep the result PSD by construction.
MatrixXcd row_correlation(double nominal_az_deg, double asd_deg, double nominal_el_deg, int rows,
                          double spacing) {
  constexpr int kNodes = 257;  // odd, Simpson-compatible
  const double sigma = deg_to_rad(asd_deg);
  const double center = deg_to_rad(nominal_az_deg);
  const double half_span = 4.5 * sigma;
  const double step = 2.0 * half_span / (kNodes - 1);
  const double cos_el = std::cos(deg_to_rad(nominal_el_deg));

  Eigen::VectorXd w(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    double simpson = (i == 0 || i == kNodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double phi = center - half_span + i * step;
    const double t = (phi - center) / sigma;
    w[i] = simpson * std::exp(-0.5 * t * t);
  }
  w /= w.sum();

  MatrixXcd r = MatrixXcd::Zero(rows, rows);
  for (int i = 0; i < kNodes; ++i) {
    const double phi = center - half_span + i * step;
    const VectorXcd a = row_response(cos_el * std::sin(phi), rows, spacing);
    r.noalias() += w[i] * (a * a.adjoint());
  }
  return r;
}

// Principal square root of a Hermitian PSD matrix; tiny negative eigenvalues
// from roundoff are clamped and the trace renormalized.
MatrixXcd hermitian_sqrt_clamped(const MatrixXcd& r) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(r);
  VectorXd ev = eig.eigenvalues();
  const double trace = ev.sum();
  bool clamped = false;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0.0) {
      ev[i] = 0.0;
      clamped = true;
    }
  }
  if (clamped && trace > 0.0) {
    const double s = ev.sum();
    if (s > 0.0) ev *= trace / s;
  }
  return eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint();
}

struct PowerSplit {
  double los = 0.0;
  double nlos = 0.0;
};

PowerSplit split_gain(double gain, double p_los, const std::optional<double>& rician_db) {
  double frac = p_los;
  if (rician_db.has_value()) {
    const double kf = db_to_linear(*rician_db);
    frac = kf / (1.0 + kf);
  }
  return {gain * frac, gain * (1.0 - frac)};
}

}  // namespace

MatrixXcd local_scattering_correlation(double nominal_az_deg, double asd_deg,
                                       const ArrayGeometry& geometry, double gain,
                                       double nominal_el_deg) {
  if (asd_deg <= 0.0) {
    throw UnsupportedConfigError("local_scattering_correlation: asd_deg must be positive");
  }
  const MatrixXcd r_row = row_correlation(nominal_az_deg, asd_deg, nominal_el_deg, geometry.rows,
                                          geometry.spacing_wavelengths);
  const VectorXcd c = col_response_for(std::sin(deg_to_rad(nominal_el_deg)), geometry.cols,
                                       geometry.spacing_wavelengths);
  const int n = geometry.size();
  MatrixXcd r(n, n);
  // With zero elevation spread the correlation factorizes across the array
  // axes: R = R_row (kron) c c^H.
  for (int m1 = 0; m1 < geometry.rows; ++m1) {
    for (int m2 = 0; m2 < geometry.rows; ++m2) {
      for (int q1 = 0; q1 < geometry.cols; ++q1) {
        for (int q2 = 0; q2 < geometry.cols; ++q2) {
          r(m1 * geometry.cols + q1, m2 * geometry.cols + q2) =
              gain * r_row(m1, m2) * c[q1] * std::conj(c[q2]);
        }
      }
    }
  }
  // PSD by construction; symmetrize against roundoff.
  r = 0.5 * (r + r.adjoint()).eval();
  return r;
}

namespace {

FronthaulLinkModel make_sub6_link(const NetworkTopology& topo, const Position3D& uav,
                                  const Sub6ChannelConfig& cfg, const ArrayGeometry& geom) {
  FronthaulLinkModel link;
  const double theta = std::abs(elevation_angle(topo.cpu, uav));
  link.p_los = los_probability(theta, cfg.pathloss);
  link.mean_gain = db_to_linear(-mean_path_loss_db(topo.cpu, uav, cfg.pathloss));
  bearing_angles(topo.cpu, uav, link.az_deg, link.el_deg);
  const PowerSplit split = split_gain(link.mean_gain, link.p_los, cfg.rician_factor_db);
  link.los_power = split.los;
  link.nlos_power = split.nlos;
  link.row_corr_sqrt = hermitian_sqrt_clamped(row_correlation(
      link.az_deg, cfg.asd_deg, link.el_deg, geom.rows, geom.spacing_wavelengths));
  link.col_response =
      col_response_for(std::sin(deg_to_rad(link.el_deg)), geom.cols, geom.spacing_wavelengths);
  return link;
}

// Correlated Rayleigh draw through the Kronecker factors:
// h = vec(c c^H/|c| G row_sqrt^T) with G iid complex normal.
VectorXcd sample_scattered(const MatrixXcd& row_sqrt, const VectorXcd& col, Rng& rng) {
  const int rows = static_cast<int>(row_sqrt.rows());
  const int cols = static_cast<int>(col.size());
  MatrixXcd g(cols, rows);
  for (int m = 0; m < rows; ++m) {
    for (int q = 0; q < cols; ++q) g(q, m) = rng.cnormal();
  }
  const MatrixXcd col_sqrt = (col * col.adjoint()) / std::sqrt(static_cast<double>(cols));
  const MatrixXcd x = col_sqrt * g * row_sqrt.transpose();
  VectorXcd h(rows * cols);
  for (int m = 0; m < rows; ++m) {
    for (int q = 0; q < cols; ++q) h[m * cols + q] = x(q, m);
  }
  return h;
}

VectorXcd sample_sub6_link(const FronthaulLinkModel& link, const ArrayGeometry& geom, LosMode mode,
                           Rng& rng) {
  const VectorXcd a = upa_response(link.az_deg, link.el_deg, geom);
  if (mode == LosMode::Bernoulli) {
    if (rng.uniform() < link.p_los) {
      return std::sqrt(link.mean_gain) * rng.phase() * a;
    }
    VectorXcd h = sample_scattered(link.row_corr_sqrt, link.col_response, rng);
    return std::sqrt(link.mean_gain) * h;
  }
  VectorXcd h = std::sqrt(link.los_power) * rng.phase() * a;
  if (link.nlos_power > 0.0) {
    h += std::sqrt(link.nlos_power) * sample_scattered(link.row_corr_sqrt, link.col_response, rng);
  }
  return h;
}

}  // namespace

FronthaulModel build_fronthaul_model(const NetworkTopology& topo, const FronthaulConfigSub6& cfg) {
  FronthaulModel model;
  model.geometry = ArrayGeometry::for_antennas(cfg.num_cpu_antennas);
  model.los_mode = cfg.los_mode;
  model.is_mmwave = false;
  model.links.reserve(topo.uavs.size());
  for (const auto& uav : topo.uavs) {
    model.links.push_back(make_sub6_link(topo, uav, cfg, model.geometry));
  }
  return model;
}

FronthaulModel build_fronthaul_model(const NetworkTopology& topo,
                                     const FronthaulConfigMmWave& cfg) {
  FronthaulModel model;
  model.geometry = ArrayGeometry::for_antennas(cfg.num_cpu_antennas);
  model.is_mmwave = true;
  model.mmwave = cfg.mmwave;
  model.links.reserve(topo.uavs.size());
  for (const auto& uav : topo.uavs) {
    FronthaulLinkModel link;
    const double theta = std::abs(elevation_angle(topo.cpu, uav));
    link.p_los = los_probability(theta, cfg.pathloss);
    link.mean_gain = db_to_linear(-mean_path_loss_db(topo.cpu, uav, cfg.pathloss));
    bearing_angles(topo.cpu, uav, link.az_deg, link.el_deg);
    // Split the total gain between the direct path and the scattered paths so
    // that E{|h|^2} stays at N_c * mean_gain.
    const double scatter_total = db_to_linear(cfg.mmwave.scatter_rel_db);
    const int n_paths = std::max(0, cfg.mmwave.n_paths);
    if (n_paths == 0) {
      link.los_power = link.mean_gain;
    } else {
      link.los_power = link.mean_gain / (1.0 + scatter_total);
      link.beta.assign(n_paths, link.los_power * scatter_total / n_paths);
    }
    link.nlos_power = link.mean_gain - link.los_power;
    model.links.push_back(std::move(link));
  }
  return model;
}

namespace {

VectorXcd sample_mmwave_link(const FronthaulLinkModel& link, const ArrayGeometry& geom,
                             const MmWaveParams& params, Rng& rng) {
  // Direct path: deterministic magnitude, uniform random phase.
  VectorXcd h = std::sqrt(link.los_power) * rng.phase() * upa_response(link.az_deg, link.el_deg, geom);
  for (std::size_t i = 0; i < link.beta.size(); ++i) {
    const double az = link.az_deg + rng.uniform(-params.angle_window_deg, params.angle_window_deg);
    const double el = link.el_deg + rng.uniform(-params.angle_window_deg, params.angle_window_deg);
    const cplx alpha = std::sqrt(link.beta[i]) * rng.cnormal();
    h += alpha * upa_response(az, el, geom);
  }
  return h;
}

}  // namespace

FronthaulChannel sample_fronthaul(const FronthaulModel& model, Rng& rng) {
  const int n = model.geometry.size();
  const int num_links = static_cast<int>(model.links.size());
  FronthaulChannel out;
  out.H.resize(n, num_links);
  for (int l = 0; l < num_links; ++l) {
    out.H.col(l) = model.is_mmwave
                       ? sample_mmwave_link(model.links[l], model.geometry, model.mmwave, rng)
                       : sample_sub6_link(model.links[l], model.geometry, model.los_mode, rng);
  }
  return out;
}

FronthaulChannel sample_mmwave_fronthaul(const NetworkTopology& topo,
                                         const FronthaulConfigMmWave& cfg, Rng& rng) {
  const FronthaulModel model = build_fronthaul_model(topo, cfg);
  return sample_fronthaul(model, rng);
}

FronthaulChannel sample_sub6_fronthaul(const NetworkTopology& topo, const FronthaulConfigSub6& cfg,
                                       Rng& rng) {
  const FronthaulModel model = build_fronthaul_model(topo, cfg);
  return sample_fronthaul(model, rng);
}

AccessChannelModel build_access_model(const NetworkTopology& topo, const AccessChannelConfig& cfg) {
  AccessChannelModel model;
  model.geometry = ArrayGeometry::for_antennas(cfg.num_ap_antennas);
  model.num_ues = topo.num_ues();
  model.num_uavs = topo.num_uavs();
  model.los_mode = cfg.los_mode;
  model.links.resize(static_cast<std::size_t>(model.num_ues) * model.num_uavs);
  for (int k = 0; k < model.num_ues; ++k) {
    for (int l = 0; l < model.num_uavs; ++l) {
      AccessLinkModel link;
      const Position3D& uav = topo.uavs[l];
      const Position3D& ue = topo.ues[k];
      const double theta = std::abs(elevation_angle(ue, uav));
      link.p_los = los_probability(theta, cfg.pathloss);
      link.mean_gain = db_to_linear(-mean_path_loss_db(uav, ue, cfg.pathloss));
      double az = 0.0, el = 0.0;
      bearing_angles(uav, ue, az, el);  // array sits at the UAV, looking down
      const PowerSplit split = split_gain(link.mean_gain, link.p_los, cfg.rician_factor_db);
      link.los_power = split.los;
      link.nlos_power = split.nlos;
      link.steering = upa_response(az, el, model.geometry);
      link.los_response = std::sqrt(link.los_power) * link.steering;
      link.nlos_corr =
          link.nlos_power > 0.0
              ? local_scattering_correlation(az, cfg.asd_deg, model.geometry, link.nlos_power, el)
              : MatrixXcd::Zero(model.geometry.size(), model.geometry.size());
      link.nlos_corr_sqrt = hermitian_sqrt_clamped(link.nlos_corr);
      // The LoS phase is random per realization, so the channel is zero mean
      // and the estimator-facing correlation includes both parts.
      link.full_corr = link.nlos_corr + link.los_response * link.los_response.adjoint();
      model.links[static_cast<std::size_t>(k) * model.num_uavs + l] = std::move(link);
    }
  }
  return model;
}

AccessChannelSet sample_access_channels(const AccessChannelModel& model, Rng& rng) {
  AccessChannelSet out;
  out.num_ues = model.num_ues;
  out.num_uavs = model.num_uavs;
  out.h.resize(model.links.size());
  const int n = model.geometry.size();
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const AccessLinkModel& link = model.links[i];
    if (model.los_mode == LosMode::Bernoulli) {
      // The drawn state selects the fading structure; the mean gain is kept so
      // second moments stay at N_a * mean_gain.
      if (rng.uniform() < link.p_los) {
        out.h[i] = std::sqrt(link.mean_gain) * rng.phase() * link.steering;
        continue;
      }
      VectorXcd g(n);
      for (int j = 0; j < n; ++j) g[j] = rng.cnormal();
      const double scale =
          link.nlos_power > 0.0 ? std::sqrt(link.mean_gain / link.nlos_power) : 0.0;
      out.h[i] = scale * (link.nlos_corr_sqrt * g);
      continue;
    }
    VectorXcd h = rng.phase() * link.los_response;
    if (link.nlos_power > 0.0) {
      VectorXcd g(n);
      for (int j = 0; j < n; ++j) g[j] = rng.cnormal();
      h += link.nlos_corr_sqrt * g;
    }
    out.h[i] = std::move(h);
  }
  return out;
}

AccessChannelSet sample_access_channels(const NetworkTopology& topo,
                                        const AccessChannelConfig& cfg, Rng& rng) {
  const AccessChannelModel model = build_access_model(topo, cfg);
  return sample_access_channels(model, rng);
}

}  // namespace uavcf
