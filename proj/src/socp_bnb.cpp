// Best-first branch-and-bound over the binary variables of a SocpProblem.
// Every node solves a continuous relaxation with branched binaries fixed by
// substitution; fixing a binary to zero also fixes the variables listed in
// its implication, which keeps node subproblems strictly feasible.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>
#include <vector>

#include "uavcf/socp.hpp"

namespace uavcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Node {
  VectorXd fixed;       // NaN = free
  double lower_bound = -kInf;
  long order = 0;       // creation index, deterministic tie break
};

struct NodeCompare {
  bool operator()(const Node& a, const Node& b) const {
    if (a.lower_bound != b.lower_bound) return a.lower_bound > b.lower_bound;
    return a.order > b.order;
  }
};

void fix_binary(const SocpProblem& prob, VectorXd& fixed, int binary, double value) {
  fixed[binary] = value;
  if (value != 0.0) return;
  for (const auto& imp : prob.implications) {
    if (imp.binary_index != binary) continue;
    for (const int j : imp.zero_when_off) fixed[j] = 0.0;
  }
}

bool integral(const SocpSolution& sol, const std::vector<int>& binaries, const VectorXd& fixed,
              double tol, int& branch_var, double& branch_frac) {
  branch_var = -1;
  branch_frac = 0.0;
  for (const int b : binaries) {
    if (!std::isnan(fixed[b])) continue;
    const double v = sol.x[b];
    const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
    const double dist = std::min(std::abs(v), std::abs(v - 1.0));
    if (dist <= tol) continue;
    if (frac > branch_frac) {
      branch_frac = frac;
      branch_var = b;
    }
  }
  return branch_var < 0;
}

// Snaps near-integral binaries in a relaxation solution to exact 0/1.
void snap_binaries(SocpSolution& sol, const std::vector<int>& binaries, double tol) {
  for (const int b : binaries) {
    const double v = sol.x[b];
    if (std::abs(v) <= tol) sol.x[b] = 0.0;
    if (std::abs(v - 1.0) <= tol) sol.x[b] = 1.0;
  }
}

}  // namespace

SocpSolution solve_mbsocp(const SocpProblem& problem, const SocpSettings& settings) {
  problem.validate();
  if (problem.binary_indices.empty()) {
    const VectorXd all_free = VectorXd::Constant(problem.n_vars, kNaN);
    return detail::solve_with_fixed(problem, all_free, settings);
  }
  if (problem.binary_indices.size() > 32) {
    throw std::invalid_argument("solve_mbsocp: more than 32 binary variables");
  }

  SocpSolution incumbent;
  incumbent.status = SolveStatus::Infeasible;
  double upper = kInf;
  long nodes = 0, order = 0;
  bool any_numerical_failure = false;

  auto gap_ok = [&](double lower) {
    return upper - lower <= settings.rel_gap * std::max(1.0, std::abs(upper));
  };

  auto try_incumbent = [&](const SocpSolution& sol) {
    if (sol.status != SolveStatus::Optimal) return;
    if (sol.objective < upper) {
      upper = sol.objective;
      incumbent = sol;
      incumbent.status = SolveStatus::Optimal;
    }
  };

  // Solve with every binary fixed to the given pattern (plus implications).
  auto solve_pattern = [&](const VectorXd& base, const std::vector<double>& pattern) {
    VectorXd fixed = base;
    for (std::size_t i = 0; i < problem.binary_indices.size(); ++i) {
      const int b = problem.binary_indices[i];
      if (std::isnan(fixed[b])) fix_binary(problem, fixed, b, pattern[i]);
    }
    SocpSolution sol = detail::solve_with_fixed(problem, fixed, settings);
    ++nodes;
    snap_binaries(sol, problem.binary_indices, settings.int_tol);
    try_incumbent(sol);
  };

  // Binaries already pinned by their bounds are fixed up front so their
  // implications apply (an interior-point node cannot express lo == hi).
  VectorXd root_fixed = VectorXd::Constant(problem.n_vars, kNaN);
  if (!problem.bounds.empty()) {
    for (const int b : problem.binary_indices) {
      if (problem.bounds[b].hi <= settings.int_tol) {
        fix_binary(problem, root_fixed, b, 0.0);
      } else if (problem.bounds[b].lo >= 1.0 - settings.int_tol) {
        fix_binary(problem, root_fixed, b, 1.0);
      }
    }
  }

  std::priority_queue<Node, std::vector<Node>, NodeCompare> open;
  open.push({root_fixed, -kInf, order++});

  double proven_lower = -kInf;
  bool root = true;

  while (!open.empty()) {
    if (nodes >= settings.max_nodes) break;
    Node node = open.top();
    open.pop();
    proven_lower = std::max(proven_lower, node.lower_bound);
    if (std::isfinite(upper) && gap_ok(node.lower_bound)) break;

    SocpSolution relax = detail::solve_with_fixed(problem, node.fixed, settings);
    ++nodes;
    if (relax.status == SolveStatus::NumericalFailure) {
      if (settings.warn_numerical_failures) {
        std::cerr << "solve_mbsocp: relaxation failed numerically, pruning node\n";
      }
      any_numerical_failure = true;
      root = false;
      continue;
    }
    if (relax.status == SolveStatus::Infeasible) {
      root = false;
      continue;
    }
    if (relax.status == SolveStatus::Unbounded) {
      // A relaxation below an integral point is unbounded only if the mixed
      // problem is; report it from the root, prune elsewhere.
      if (root) {
        SocpSolution sol;
        sol.status = SolveStatus::Unbounded;
        sol.x = relax.x;
        sol.nodes = nodes;
        return sol;
      }
      root = false;
      continue;
    }

    if (root && settings.rounding_heuristic) {
      // Two cheap patterns: nearest rounding and support rounding. Either may
      // hand the search a strong early upper bound.
      std::vector<double> nearest, support;
      for (const int b : problem.binary_indices) {
        nearest.push_back(relax.x[b] >= 0.5 ? 1.0 : 0.0);
        support.push_back(relax.x[b] > 1e-5 ? 1.0 : 0.0);
      }
      solve_pattern(node.fixed, nearest);
      if (support != nearest) solve_pattern(node.fixed, support);
    }
    root = false;

    const double lower = relax.objective;
    if (std::isfinite(upper) && lower >= upper - settings.rel_gap * std::max(1.0, std::abs(upper))) {
      continue;  // cannot improve the incumbent
    }

    int branch_var = -1;
    double frac = 0.0;
    if (integral(relax, problem.binary_indices, node.fixed, settings.int_tol, branch_var, frac)) {
      snap_binaries(relax, problem.binary_indices, settings.int_tol);
      try_incumbent(relax);
      continue;
    }

    for (const double value : {0.0, 1.0}) {
      Node child;
      child.fixed = node.fixed;
      fix_binary(problem, child.fixed, branch_var, value);
      child.lower_bound = lower;
      child.order = order++;
      open.push(std::move(child));
    }
  }

  if (incumbent.status == SolveStatus::Optimal) {
    if (open.empty() && nodes < settings.max_nodes) {
      incumbent.gap = 0.0;  // tree exhausted
    } else {
      incumbent.gap = std::max(0.0, (upper - proven_lower) / std::max(1.0, std::abs(upper)));
    }
    incumbent.nodes = nodes;
    return incumbent;
  }

  SocpSolution none;
  none.status = any_numerical_failure ? SolveStatus::NumericalFailure : SolveStatus::Infeasible;
  none.x = VectorXd::Zero(problem.n_vars);
  none.nodes = nodes;
  return none;
}

}  // namespace uavcf
