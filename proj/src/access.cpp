#include "uavcf/access.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace uavcf {

std::vector<int> assign_pilots(int num_ues, int tau_u) {
  if (num_ues > tau_u) {
    throw UnsupportedConfigError("assign_pilots: more UEs than orthogonal pilots");
  }
  std::vector<int> pilots(num_ues);
  for (int k = 0; k < num_ues; ++k) pilots[k] = k;
  return pilots;
}

LmmseEstimate lmmse_estimate(const VectorXcd& pilot_observation, const MatrixXcd& r,
                             const AccessConfig& cfg) {
  const double energy = cfg.pilot_power_w * cfg.pilot_samples;
  const double sigma2 = cfg.noise_power_w();
  const int n = static_cast<int>(r.rows());
  const MatrixXcd m = energy * r + sigma2 * MatrixXcd::Identity(n, n);
  const MatrixXcd filt = std::sqrt(energy) * r * m.ldlt().solve(MatrixXcd::Identity(n, n));
  LmmseEstimate out;
  out.hhat = filt * pilot_observation;
  out.error_cov = r - std::sqrt(energy) * filt * r;
  return out;
}

std::vector<VectorXcd> lmmse_precoder_directions(const std::vector<LmmseEstimate>& estimates,
                                                 const AccessConfig& cfg) {
  const int n = cfg.num_ap_antennas;
  const double p = cfg.pilot_power_w;
  MatrixXcd m = cfg.noise_power_w() * MatrixXcd::Identity(n, n);
  for (const auto& est : estimates) {
    m.noalias() += p * (est.hhat * est.hhat.adjoint());
    m += p * est.error_cov;
  }
  const Eigen::LDLT<MatrixXcd> fact(m);
  std::vector<VectorXcd> v;
  v.reserve(estimates.size());
  for (const auto& est : estimates) v.push_back(fact.solve(est.hhat));
  return v;
}

namespace {

// Per-link precomputation shared by both Monte-Carlo passes.
struct LinkEstimator {
  MatrixXcd filter;     // hhat = filter * y_pilot
  MatrixXcd error_cov;  // deterministic for the link
};

std::vector<LinkEstimator> build_estimators(const AccessChannelModel& model,
                                            const AccessConfig& cfg) {
  std::vector<LinkEstimator> est(model.links.size());
  const double energy = cfg.pilot_power_w * cfg.pilot_samples;
  const double sigma2 = cfg.noise_power_w();
  const int n = model.geometry.size();
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    // The random LoS phase makes the channel zero mean, so the estimator prior
    // uses the full second moment (LoS plus scattering).
    const MatrixXcd& r = model.links[i].full_corr;
    const MatrixXcd m = energy * r + sigma2 * eye;
    est[i].filter = std::sqrt(energy) * r * m.ldlt().solve(eye);
    est[i].error_cov = r - est[i].filter * std::sqrt(energy) * r;
  }
  return est;
}

struct TrialWork {
  AccessChannelSet channels;
  std::vector<VectorXcd> v;  // K*L unnormalized precoder directions
};

// One coherence block: channels, pilot observations, estimates, directions.
// Must consume the rng identically in both passes.
void run_trial(const AccessChannelModel& model, const AccessConfig& cfg,
               const std::vector<LinkEstimator>& est, Rng& rng, TrialWork& work) {
  const int num_ues = model.num_ues, num_uavs = model.num_uavs;
  const int n = model.geometry.size();
  const double energy = cfg.pilot_power_w * cfg.pilot_samples;
  const double noise_std = std::sqrt(cfg.noise_power_w());

  work.channels = sample_access_channels(model, rng);
  std::vector<LmmseEstimate> per_ap(num_ues);
  work.v.resize(static_cast<std::size_t>(num_ues) * num_uavs);
  for (int l = 0; l < num_uavs; ++l) {
    for (int k = 0; k < num_ues; ++k) {
      const VectorXcd& h = work.channels.channel(k, l);
      const std::size_t idx = static_cast<std::size_t>(k) * num_uavs + l;
      if (cfg.perfect_csi) {
        per_ap[k].hhat = h;
        per_ap[k].error_cov = MatrixXcd::Zero(n, n);
        continue;
      }
      VectorXcd y = std::sqrt(energy) * h;
      for (int a = 0; a < n; ++a) y[a] += noise_std * rng.cnormal();
      per_ap[k].hhat = est[idx].filter * y;
      per_ap[k].error_cov = est[idx].error_cov;
    }
    const std::vector<VectorXcd> v = lmmse_precoder_directions(per_ap, cfg);
    for (int k = 0; k < num_ues; ++k) {
      work.v[static_cast<std::size_t>(k) * num_uavs + l] = v[k];
    }
  }
}

}  // namespace

SinrStatistics estimate_sinr_statistics(const AccessChannelModel& model, const AccessConfig& cfg,
                                        int n_mc, const Rng& rng) {
  if (n_mc < 1) throw UnsupportedConfigError("estimate_sinr_statistics: n_mc must be >= 1");
  if (model.geometry.size() != cfg.num_ap_antennas) {
    throw UnsupportedConfigError("estimate_sinr_statistics: antenna count mismatch");
  }
  assign_pilots(model.num_ues, cfg.pilot_samples);

  const int num_ues = model.num_ues, num_uavs = model.num_uavs;
  const std::vector<LinkEstimator> est =
      cfg.perfect_csi ? std::vector<LinkEstimator>() : build_estimators(model, cfg);

  // Pass 1: average power of the unnormalized directions.
  MatrixXd norm_sq = MatrixXd::Zero(num_ues, num_uavs);
  TrialWork work;
  for (int t = 0; t < n_mc; ++t) {
    Rng trial_rng = rng.stream(static_cast<std::uint64_t>(t));
    run_trial(model, cfg, est, trial_rng, work);
    for (int k = 0; k < num_ues; ++k) {
      for (int l = 0; l < num_uavs; ++l) {
        norm_sq(k, l) += work.v[static_cast<std::size_t>(k) * num_uavs + l].squaredNorm();
      }
    }
  }
  norm_sq /= n_mc;
  MatrixXd scale(num_ues, num_uavs);
  for (int k = 0; k < num_ues; ++k) {
    for (int l = 0; l < num_uavs; ++l) {
      scale(k, l) = norm_sq(k, l) > 0.0 ? 1.0 / std::sqrt(norm_sq(k, l)) : 0.0;
    }
  }

  // Pass 2: same realizations, normalized precoders, accumulate moments.
  SinrStatistics stats;
  stats.num_ues = num_ues;
  stats.num_uavs = num_uavs;
  stats.n_mc = n_mc;
  stats.noise_power = cfg.noise_power_w();
  MatrixXcd b_acc = MatrixXcd::Zero(num_ues, num_uavs);
  MatrixXd b_sq_acc = MatrixXd::Zero(num_ues, num_uavs);
  stats.C.assign(static_cast<std::size_t>(num_ues) * num_ues,
                 MatrixXcd::Zero(num_uavs, num_uavs));

  VectorXcd q(num_uavs);
  for (int t = 0; t < n_mc; ++t) {
    Rng trial_rng = rng.stream(static_cast<std::uint64_t>(t));
    run_trial(model, cfg, est, trial_rng, work);
    for (int k = 0; k < num_ues; ++k) {
      for (int i = 0; i < num_ues; ++i) {
        for (int l = 0; l < num_uavs; ++l) {
          // downlink precoder w = conj(v)/norm, so h^T w = conj(h^H v)/norm
          const std::size_t idx = static_cast<std::size_t>(i) * num_uavs + l;
          const VectorXcd& h = work.channels.channel(k, l);
          q[l] = scale(i, l) * std::conj(h.dot(work.v[idx]));
        }
        stats.c(k, i).noalias() += q * q.adjoint();
        if (i == k) {
          b_acc.row(k) += q.transpose();
          b_sq_acc.row(k) += q.real().transpose().cwiseAbs2();
        }
      }
    }
  }

  for (auto& c : stats.C) {
    c /= n_mc;
    c = 0.5 * (c + c.adjoint()).eval();
  }
  b_acc /= n_mc;
  b_sq_acc /= n_mc;
  stats.b.resize(num_ues, num_uavs);
  stats.b_stderr.resize(num_ues, num_uavs);
  for (int k = 0; k < num_ues; ++k) {
    for (int l = 0; l < num_uavs; ++l) {
      const double re = b_acc(k, l).real();
      const double im = std::abs(b_acc(k, l).imag());
      if (re > 0.0) stats.max_imag_ratio = std::max(stats.max_imag_ratio, im / re);
      if (re < 0.0) ++stats.clamped_b_entries;
      stats.b(k, l) = std::max(0.0, re);
      const double var = std::max(0.0, b_sq_acc(k, l) - re * re);
      stats.b_stderr(k, l) = std::sqrt(var / n_mc);
    }
  }
  if (stats.max_imag_ratio > 0.05) {
    std::cerr << "estimate_sinr_statistics: imaginary residual ratio "
              << stats.max_imag_ratio << " exceeds 0.05, increase n_mc\n";
  }
  return stats;
}

SinrStatistics estimate_sinr_statistics(const NetworkTopology& topo,
                                        const AccessChannelConfig& ch_cfg,
                                        const AccessConfig& cfg, int n_mc, const Rng& rng) {
  const AccessChannelModel model = build_access_model(topo, ch_cfg);
  return estimate_sinr_statistics(model, cfg, n_mc, rng);
}

PowerAllocation PowerAllocation::zeros(int num_ues, int num_uavs) {
  PowerAllocation a;
  a.rho = MatrixXd::Zero(num_ues, num_uavs);
  a.alpha = VectorXi::Zero(num_uavs);
  return a;
}

SinrEvaluation effective_sinr(const SinrStatistics& stats, const PowerAllocation& alloc) {
  const int num_ues = stats.num_ues;
  SinrEvaluation out;
  out.gamma.resize(num_ues);
  out.clamped.assign(num_ues, false);
  for (int k = 0; k < num_ues; ++k) {
    const double bk_rho = stats.b.row(k).dot(alloc.rho.row(k));
    const double signal = bk_rho * bk_rho;
    double total = 0.0;
    for (int i = 0; i < num_ues; ++i) {
      const VectorXd rho_i = alloc.rho.row(i).transpose();
      total += (rho_i.transpose() * stats.c(k, i).real() * rho_i).value();
    }
    double interference = total - signal;
    if (interference < 0.0) {
      interference = 0.0;
      out.clamped[k] = true;
    }
    out.gamma[k] = signal / (interference + stats.noise_power);
  }
  return out;
}

double spectral_efficiency(double gamma, const AccessConfig& cfg) {
  if (gamma < 0.0) throw UnsupportedConfigError("spectral_efficiency: negative SINR");
  return static_cast<double>(cfg.data_samples()) / cfg.coherence_samples *
         std::log2(1.0 + gamma);
}

std::uint64_t access_config_hash(const AccessChannelConfig& ch_cfg, const AccessConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << ch_cfg.pathloss.eta1 << ' ' << ch_cfg.pathloss.eta2 << ' '
     << ch_cfg.pathloss.excess_los_db << ' ' << ch_cfg.pathloss.excess_nlos_db << ' '
     << ch_cfg.pathloss.carrier_hz << ' ' << ch_cfg.asd_deg << ' '
     << static_cast<int>(ch_cfg.los_mode) << ' '
     << (ch_cfg.rician_factor_db ? *ch_cfg.rician_factor_db : -1e300) << ' '
     << ch_cfg.num_ap_antennas << ' ' << cfg.bandwidth_hz << ' ' << cfg.noise_psd_w_per_hz << ' '
     << cfg.noise_figure_db << ' ' << cfg.coherence_samples << ' ' << cfg.pilot_samples << ' '
     << cfg.pilot_power_w << ' ' << cfg.num_ap_antennas << ' ' << cfg.perfect_csi;
  return Rng::fnv1a(os.str());
}

namespace {

nlohmann::json complex_matrix_to_json(const MatrixXcd& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

MatrixXcd complex_matrix_from_json(const nlohmann::json& j) {
  const int rows = j.at("rows").get<int>(), cols = j.at("cols").get<int>();
  MatrixXcd m(rows, cols);
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < cols; ++c) {
      m(i, c) = cplx(re[i * cols + c].get<double>(), im[i * cols + c].get<double>());
    }
  }
  return m;
}

nlohmann::json real_matrix_to_json(const MatrixXd& m) {
  nlohmann::json v = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  }
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", v}};
}

MatrixXd real_matrix_from_json(const nlohmann::json& j) {
  const int rows = j.at("rows").get<int>(), cols = j.at("cols").get<int>();
  MatrixXd m(rows, cols);
  const auto& v = j.at("data");
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < cols; ++c) m(i, c) = v[i * cols + c].get<double>();
  }
  return m;
}

}  // namespace

void save_sinr_statistics(const SinrStatistics& stats, const StatsCacheKey& key,
                          const std::string& path) {
  nlohmann::json j;
  j["topology_hash"] = key.topology_hash;
  j["config_hash"] = key.config_hash;
  j["n_mc"] = key.n_mc;
  j["seed"] = key.seed;
  j["num_ues"] = stats.num_ues;
  j["num_uavs"] = stats.num_uavs;
  j["stats_n_mc"] = stats.n_mc;
  j["noise_power_w"] = stats.noise_power;
  j["max_imag_ratio"] = stats.max_imag_ratio;
  j["clamped_b_entries"] = stats.clamped_b_entries;
  j["b"] = real_matrix_to_json(stats.b);
  j["b_stderr"] = real_matrix_to_json(stats.b_stderr);
  j["C"] = nlohmann::json::array();
  for (const auto& c : stats.C) j["C"].push_back(complex_matrix_to_json(c));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_sinr_statistics: cannot open " + path);
  out << j.dump() << "\n";
}

bool load_sinr_statistics(const std::string& path, const StatsCacheKey& expected,
                          SinrStatistics& out) {
  std::ifstream in(path);
  if (!in) return false;
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("topology_hash").get<std::uint64_t>() != expected.topology_hash ||
        j.at("config_hash").get<std::uint64_t>() != expected.config_hash ||
        j.at("n_mc").get<int>() != expected.n_mc ||
        j.at("seed").get<std::uint64_t>() != expected.seed) {
      return false;
    }
    out.num_ues = j.at("num_ues").get<int>();
    out.num_uavs = j.at("num_uavs").get<int>();
    out.n_mc = j.at("stats_n_mc").get<int>();
    out.noise_power = j.at("noise_power_w").get<double>();
    out.max_imag_ratio = j.at("max_imag_ratio").get<double>();
    out.clamped_b_entries = j.at("clamped_b_entries").get<int>();
    out.b = real_matrix_from_json(j.at("b"));
    out.b_stderr = real_matrix_from_json(j.at("b_stderr"));
    out.C.clear();
    for (const auto& c : j.at("C")) out.C.push_back(complex_matrix_from_json(c));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace uavcf
