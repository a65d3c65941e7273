#include "uavcf/fronthaul.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>

namespace uavcf {

double fronthaul_rate_requirement(SplitOption split, const FronthaulConfig& cfg) {
  if (split == SplitOption::Option8) {
    return 2.0 * cfg.sampling_rate_hz * cfg.quantizer_bits * cfg.num_ap_antennas;
  }
  return 2.0 * cfg.quantizer_bits * cfg.used_subcarriers * cfg.num_ap_antennas /
         cfg.ofdm_symbol_s;
}

ZfPrecodingResult zf_precoder(const FronthaulChannel& channel, double cond_threshold) {
  const MatrixXcd& h = channel.H;
  const int l = channel.num_uavs();
  if (channel.num_antennas() < l) {
    throw SingularChannelError("zf_precoder: fewer CPU antennas than UAV-APs");
  }
  const MatrixXcd gram = h.transpose() * h.conjugate();  // Hermitian PSD

  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(gram);
  const VectorXd ev = eig.eigenvalues();
  if (ev[0] <= 0.0 || ev[l - 1] / ev[0] > cond_threshold) {
    throw SingularChannelError("zf_precoder: Gram matrix is numerically singular");
  }
  const MatrixXcd gram_inv = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                             eig.eigenvectors().adjoint();

  ZfPrecodingResult out;
  out.inverse_gram_diag = gram_inv.diagonal().real();
  out.effective_gain = out.inverse_gram_diag.cwiseInverse();
  out.P = h.conjugate() * gram_inv * out.inverse_gram_diag.cwiseSqrt().cwiseInverse().asDiagonal();
  return out;
}

double fronthaul_power_for_gain(double inverse_gram_diag, double rate_bps, double bandwidth_hz,
                                double noise_psd) {
  const double exponent = rate_bps / bandwidth_hz;
  if (exponent > 1020.0) return std::numeric_limits<double>::infinity();
  return (std::exp2(exponent) - 1.0) * bandwidth_hz * noise_psd * inverse_gram_diag;
}

double fronthaul_power_required(const ZfPrecodingResult& zf, int l, double rate_bps,
                                const FronthaulConfig& cfg) {
  return fronthaul_power_for_gain(zf.inverse_gram_diag[l], rate_bps, cfg.bandwidth_hz,
                                  cfg.noise_psd_w_per_hz);
}

double asymptotic_power_floor(double inverse_gram_diag, double rate_bps, double noise_psd) {
  // lim_{B->inf} (2^{R/B}-1) B = R ln 2
  return rate_bps * std::log(2.0) * noise_psd * inverse_gram_diag;
}

double min_bandwidth_for_gain(double inverse_gram_diag, double rate_bps, double noise_psd,
                              double power_budget_w, double lo_hz, double hi_hz, double rel_tol) {
  auto power = [&](double b) {
    return fronthaul_power_for_gain(inverse_gram_diag, rate_bps, b, noise_psd);
  };
  if (power(hi_hz) > power_budget_w) return std::numeric_limits<double>::infinity();
  if (power(lo_hz) <= power_budget_w) return lo_hz;
  double lo = lo_hz, hi = hi_hz;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (power(mid) <= power_budget_w) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

MinBandwidthResult min_bandwidth_single_ap(
    const std::function<FronthaulChannel(Rng&)>& channel_sampler, SplitOption split,
    const FronthaulConfig& cfg, int n_mc, Rng& rng) {
  const double rate = fronthaul_rate_requirement(split, cfg);
  MinBandwidthResult out;
  std::vector<double> samples;
  samples.reserve(n_mc);
  double sum = 0.0, sumsq = 0.0;
  for (int trial = 0; trial < n_mc; ++trial) {
    Rng trial_rng = rng.stream(static_cast<std::uint64_t>(trial));
    double best = std::numeric_limits<double>::infinity();
    try {
      const FronthaulChannel channel = channel_sampler(trial_rng);
      const ZfPrecodingResult zf = zf_precoder(channel);
      // The best UAV-AP is the one with the lowest required power, i.e. the
      // smallest inverse-Gram diagonal entry.
      const double g = zf.inverse_gram_diag.minCoeff();
      if (asymptotic_power_floor(g, rate, cfg.noise_psd_w_per_hz) < cfg.max_power_w) {
        best = min_bandwidth_for_gain(g, rate, cfg.noise_psd_w_per_hz, cfg.max_power_w);
      }
    } catch (const SingularChannelError&) {
      // degenerate draw, counted below
    }
    if (std::isfinite(best)) {
      samples.push_back(best);
      sum += best;
      sumsq += best * best;
      ++out.feasible_draws;
    } else {
      ++out.infeasible_draws;
    }
  }
  if (out.feasible_draws > 0) {
    const double n = out.feasible_draws;
    out.mean_hz = sum / n;
    if (out.feasible_draws > 1) {
      const double var = std::max(0.0, (sumsq - n * out.mean_hz * out.mean_hz) / (n - 1.0));
      out.stderr_hz = std::sqrt(var / n);
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    out.median_hz = samples[samples.size() / 2];
  }
  return out;
}

}  // namespace uavcf
