#include "uavcf/optimizer.hpp"

#include <cmath>

namespace uavcf {

namespace {

// Variable layout shared by both problems.
struct Layout {
  int num_ues = 0;
  int num_uavs = 0;
  int rho(int k, int l) const { return k * num_uavs + l; }
  int alpha(int l) const { return num_ues * num_uavs + l; }
  int epigraph() const { return num_ues * num_uavs + num_uavs; }
  int total() const { return num_ues * num_uavs + num_uavs + 1; }
};

// Adds everything common to both optimization problems: variable bounds,
// binary declarations with their implications, per-UAV power cones, the
// fronthaul budget row and the transmit-energy epigraph cone.
SocpProblem base_problem(const Layout& lay, const VectorXd& fronthaul_powers,
                         double fronthaul_budget_w, double max_uav_power_w) {
  SocpProblem p;
  p.n_vars = lay.total();
  p.objective = VectorXd::Zero(p.n_vars);
  p.bounds.assign(p.n_vars, VariableBounds{0.0, std::numeric_limits<double>::infinity()});
  for (int l = 0; l < lay.num_uavs; ++l) {
    p.bounds[lay.alpha(l)] = {0.0, 1.0};
    p.binary_indices.push_back(lay.alpha(l));
    BinaryImplication imp;
    imp.binary_index = lay.alpha(l);
    for (int k = 0; k < lay.num_ues; ++k) imp.zero_when_off.push_back(lay.rho(k, l));
    p.implications.push_back(std::move(imp));
  }

  // || rho-bar_l || <= alpha_l sqrt(P_UAV)
  for (int l = 0; l < lay.num_uavs; ++l) {
    ConeConstraint cone;
    cone.A = MatrixXd::Zero(lay.num_ues, p.n_vars);
    for (int k = 0; k < lay.num_ues; ++k) cone.A(k, lay.rho(k, l)) = 1.0;
    cone.b = VectorXd::Zero(lay.num_ues);
    cone.c = VectorXd::Zero(p.n_vars);
    cone.c[lay.alpha(l)] = std::sqrt(max_uav_power_w);
    cone.d = 0.0;
    p.cones.push_back(std::move(cone));
  }

  // sum_l alpha_l P^f_l <= P^f_max
  LinearConstraint budget;
  budget.row = VectorXd::Zero(p.n_vars);
  for (int l = 0; l < lay.num_uavs; ++l) budget.row[lay.alpha(l)] = fronthaul_powers[l];
  budget.rhs = fronthaul_budget_w;
  p.linears.push_back(std::move(budget));

  // || [2 rho; t - 1] || <= t + 1  encodes  sum rho^2 <= t
  {
    const int n_rho = lay.num_ues * lay.num_uavs;
    ConeConstraint epi;
    epi.A = MatrixXd::Zero(n_rho + 1, p.n_vars);
    for (int i = 0; i < n_rho; ++i) epi.A(i, i) = 2.0;
    epi.A(n_rho, lay.epigraph()) = 1.0;
    epi.b = VectorXd::Zero(n_rho + 1);
    epi.b[n_rho] = -1.0;
    epi.c = VectorXd::Zero(p.n_vars);
    epi.c[lay.epigraph()] = 1.0;
    epi.d = 1.0;
    p.cones.push_back(std::move(epi));
  }
  return p;
}

PowerAllocation extract_allocation(const Layout& lay, const VectorXd& x) {
  PowerAllocation alloc = PowerAllocation::zeros(lay.num_ues, lay.num_uavs);
  for (int l = 0; l < lay.num_uavs; ++l) {
    alloc.alpha[l] = x[lay.alpha(l)] > 0.5 ? 1 : 0;
    for (int k = 0; k < lay.num_ues; ++k) {
      alloc.rho(k, l) = alloc.alpha[l] ? std::max(0.0, x[lay.rho(k, l)]) : 0.0;
    }
  }
  return alloc;
}

ConeConstraint sinr_cone_for_layout(const Layout& lay, const SinrStatistics& stats, int k,
                                    double target) {
  if (target <= 0.0) {
    throw UnsupportedConfigError("build_sinr_cone: target SINR must be positive");
  }
  const double sigma = std::sqrt(stats.noise_power);
  const int num_ues = stats.num_ues, num_uavs = stats.num_uavs;
  ConeConstraint cone;
  // Row block i holds C_ki^{1/2} rho_i; for real rho only the real part of
  // C_ki enters the quadratic form, so its real square root is used. The
  // whole cone is scaled by 1/sigma_a to keep entries near unity.
  cone.A = MatrixXd::Zero(num_ues * num_uavs + 1, lay.total());
  for (int i = 0; i < num_ues; ++i) {
    const MatrixXd sqrt_c = psd_sqrt(MatrixXd(stats.c(k, i).real()));
    for (int r = 0; r < num_uavs; ++r) {
      for (int l = 0; l < num_uavs; ++l) {
        cone.A(i * num_uavs + r, lay.rho(i, l)) = sqrt_c(r, l) / sigma;
      }
    }
  }
  cone.b = VectorXd::Zero(num_ues * num_uavs + 1);
  cone.b[num_ues * num_uavs] = 1.0;  // sigma_a / sigma_a
  cone.c = VectorXd::Zero(lay.total());
  const double coef = std::sqrt((1.0 + target) / target);
  for (int l = 0; l < num_uavs; ++l) {
    cone.c[lay.rho(k, l)] = coef * stats.b(k, l) / sigma;
  }
  cone.d = 0.0;
  return cone;
}

}  // namespace

ConeConstraint build_sinr_cone(const SinrStatistics& stats, int k, double target) {
  const Layout lay{stats.num_ues, stats.num_uavs};
  return sinr_cone_for_layout(lay, stats, k, target);
}

MaxMinResult solve_max_min(const SinrStatistics& stats, const VectorXd& fronthaul_powers,
                           double fronthaul_budget_w, const OptimizerConfig& cfg) {
  const Layout lay{stats.num_ues, stats.num_uavs};
  MaxMinResult result;

  if (fronthaul_powers.minCoeff() > fronthaul_budget_w) {
    return result;  // no UAV fits the fronthaul budget alone
  }

  // Interference-free upper bound on any UE's SINR at full power.
  double t_hi = 0.0;
  const double sqrt_p = std::sqrt(cfg.max_uav_power_w);
  for (int k = 0; k < stats.num_ues; ++k) {
    const double peak = stats.b.row(k).sum() * sqrt_p;
    t_hi = std::max(t_hi, peak * peak / stats.noise_power);
  }
  if (t_hi <= 0.0) return result;
  double t_lo = std::min(cfg.bisect_t_lo, 0.5 * t_hi);

  auto solve_at = [&](double target, SocpSolution& sol) {
    SocpProblem p = base_problem(lay, fronthaul_powers, fronthaul_budget_w, cfg.max_uav_power_w);
    p.objective[lay.epigraph()] = 1.0;  // minimize total transmit energy
    for (int k = 0; k < stats.num_ues; ++k) {
      p.cones.push_back(sinr_cone_for_layout(lay, stats, k, target));
    }
    sol = solve_mbsocp(p, cfg.solver);
    return sol.status == SolveStatus::Optimal;
  };

  SocpSolution sol;
  if (!solve_at(t_lo, sol)) return result;
  result.feasible = true;
  result.t_star = t_lo;
  result.alloc = extract_allocation(lay, sol.x);
  result.iterations = 1;

  while (t_hi - t_lo > cfg.bisect_rel_tol * t_hi && result.iterations < cfg.max_bisect_iters) {
    const double mid = 0.5 * (t_lo + t_hi);
    ++result.iterations;
    if (solve_at(mid, sol)) {
      t_lo = mid;
      result.t_star = mid;
      result.alloc = extract_allocation(lay, sol.x);
    } else {
      t_hi = mid;
    }
  }
  return result;
}

PowerMinResult minimize_total_power(const SinrStatistics& stats, const VectorXd& gamma_targets,
                                    SplitOption split, const VectorXd& fronthaul_powers,
                                    const PowerModelParams& power_params,
                                    const FronthaulConfig& fh_cfg, const OptimizerConfig& cfg) {
  const Layout lay{stats.num_ues, stats.num_uavs};
  if (gamma_targets.size() != stats.num_ues) {
    throw UnsupportedConfigError("minimize_total_power: one SINR target per UE required");
  }
  if (gamma_targets.minCoeff() <= 0.0) {
    throw UnsupportedConfigError("minimize_total_power: SINR targets must be positive");
  }

  SocpProblem p = base_problem(lay, fronthaul_powers, fh_cfg.max_power_w, cfg.max_uav_power_w);
  const int indicator = split_indicator(split);
  const double proc_w =
      indicator
          ? processing_power(power_params, processing_gops(fh_cfg, power_params.dft_size).total)
          : 0.0;
  for (int l = 0; l < lay.num_uavs; ++l) {
    p.objective[lay.alpha(l)] =
        proc_w + fronthaul_powers[l] + power_params.amplifier_static_w;
  }
  p.objective[lay.epigraph()] = power_params.transmit_slope;
  for (int k = 0; k < stats.num_ues; ++k) {
    p.cones.push_back(sinr_cone_for_layout(lay, stats, k, gamma_targets[k]));
  }

  const SocpSolution sol = solve_mbsocp(p, cfg.solver);
  PowerMinResult result;
  result.status = sol.status;
  result.nodes = sol.nodes;
  if (sol.status != SolveStatus::Optimal) {
    result.alloc = PowerAllocation::zeros(lay.num_ues, lay.num_uavs);
    return result;
  }
  result.feasible = true;
  result.alloc = extract_allocation(lay, sol.x);
  result.breakdown =
      total_power(result.alloc, split, fronthaul_powers, fh_cfg, power_params);
  result.total_power = result.breakdown.total;
  return result;
}

FairPowerResult fair_then_minimize(const SinrStatistics& stats, const VectorXd& fronthaul_powers,
                                   SplitOption split, const PowerModelParams& power_params,
                                   const FronthaulConfig& fh_cfg, const OptimizerConfig& cfg) {
  FairPowerResult result;
  result.maxmin = solve_max_min(stats, fronthaul_powers, fh_cfg.max_power_w, cfg);
  if (!result.maxmin.feasible) return result;
  result.maxmin_power =
      total_power(result.maxmin.alloc, split, fronthaul_powers, fh_cfg, power_params);
  const VectorXd gammas = VectorXd::Constant(stats.num_ues, result.maxmin.t_star);
  result.minimized = minimize_total_power(stats, gammas, split, fronthaul_powers, power_params,
                                          fh_cfg, cfg);
  return result;
}

}  // namespace uavcf
