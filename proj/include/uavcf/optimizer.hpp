#pragma once

#include "uavcf/access.hpp"
#include "uavcf/powermodel.hpp"
#include "uavcf/socp.hpp"

namespace uavcf {

struct OptimizerConfig {
  double max_uav_power_w = 1.0;  // P_UAV
  double bisect_rel_tol = 1e-3;
  double bisect_t_lo = 1e-4;  // -40 dB
  int max_bisect_iters = 64;
  SocpSettings solver;
};

/// Cone form of "SINR of UE k is at least target" over the optimization
/// variables [rho(0,0..L-1), ..., rho(K-1,0..L-1), alpha(0..L-1), t]:
/// the stacked second moments against sigma_a, bounded by the scaled useful
/// signal sqrt((1+target)/target) b_k^T rho_k. Rows are normalized by sigma_a.
ConeConstraint build_sinr_cone(const SinrStatistics& stats, int k, double target);

struct MaxMinResult {
  double t_star = 0.0;  // linear SINR
  PowerAllocation alloc;
  int iterations = 0;
  bool feasible = false;
};

/// Bisection over the common SINR target; each point solves the mixed-binary
/// transmit-power-minimization surrogate of the feasibility problem.
MaxMinResult solve_max_min(const SinrStatistics& stats, const VectorXd& fronthaul_powers,
                           double fronthaul_budget_w, const OptimizerConfig& cfg);

struct PowerMinResult {
  bool feasible = false;
  SolveStatus status = SolveStatus::Infeasible;
  double total_power = 0.0;
  PowerAllocation alloc;
  PowerBreakdown breakdown;
  long nodes = 0;
};

/// Total UAV-AP power minimization under per-UE SINR requirements, the
/// fronthaul power budget and per-UAV transmit limits; binary activations.
PowerMinResult minimize_total_power(const SinrStatistics& stats, const VectorXd& gamma_targets,
                                    SplitOption split, const VectorXd& fronthaul_powers,
                                    const PowerModelParams& power_params,
                                    const FronthaulConfig& fh_cfg, const OptimizerConfig& cfg);

struct FairPowerResult {
  MaxMinResult maxmin;
  PowerBreakdown maxmin_power;   // Eq.-of-record power of the fair allocation
  PowerMinResult minimized;      // re-optimized at Gamma_k = t_star
};

/// Max-min fairness first, then power minimization at the fair SINR target.
FairPowerResult fair_then_minimize(const SinrStatistics& stats, const VectorXd& fronthaul_powers,
                                   SplitOption split, const PowerModelParams& power_params,
                                   const FronthaulConfig& fh_cfg, const OptimizerConfig& cfg);

}  // namespace uavcf
