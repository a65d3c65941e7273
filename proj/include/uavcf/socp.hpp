#pragma once

#include <limits>
#include <string>
#include <vector>

#include "uavcf/common.hpp"

namespace uavcf {

/// ||A x + b|| <= c^T x + d
struct ConeConstraint {
  MatrixXd A;
  VectorXd b;
  VectorXd c;
  double d = 0.0;
};

enum class Sense { LessEqual, Equal };

struct LinearConstraint {
  VectorXd row;
  double rhs = 0.0;
  Sense sense = Sense::LessEqual;
};

struct VariableBounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// Variables that must be zero whenever a binary is fixed to zero. Branching
/// applies these together with the fix, which keeps the node subproblems
/// strictly feasible (a cone with a zero right-hand side has no interior).
struct BinaryImplication {
  int binary_index = -1;
  std::vector<int> zero_when_off;
};

/// Linear objective over second-order cone and linear constraints, optionally
/// with binary variables. Quadratic objectives must be pre-cast through an
/// epigraph variable by the caller.
struct SocpProblem {
  int n_vars = 0;
  VectorXd objective;
  double objective_constant = 0.0;
  std::vector<ConeConstraint> cones;
  std::vector<LinearConstraint> linears;
  std::vector<VariableBounds> bounds;  // empty or size n_vars
  std::vector<int> binary_indices;
  std::vector<BinaryImplication> implications;

  /// Throws std::invalid_argument on inconsistent dimensions or binary
  /// variables whose bounds leave [0, 1].
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus status);

struct SocpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  VectorXd x;
  double objective = 0.0;
  double gap = 0.0;  // duality gap (continuous) or relative tree gap (binary)
  int iterations = 0;
  long nodes = 0;  // branch-and-bound nodes processed
};

struct SocpSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  int max_iters = 200;
  // branch and bound
  double rel_gap = 1e-6;
  double int_tol = 1e-6;
  long max_nodes = 200000;
  bool rounding_heuristic = true;
  bool warn_numerical_failures = true;
};

/// Interior-point solve of the continuous problem (binary_indices ignored,
/// must be empty for the strict contract).
SocpSolution solve_socp(const SocpProblem& problem, const SocpSettings& settings = {});

/// Best-first branch-and-bound over the binary variables; each node solves a
/// continuous relaxation. Deterministic for identical inputs.
SocpSolution solve_mbsocp(const SocpProblem& problem, const SocpSettings& settings = {});

/// Principal square root S of a Hermitian PSD matrix, S S^H = C. Eigenvalues
/// in [-1e-8 tr, 0) are clamped to zero; more negative ones raise
/// std::invalid_argument (corrupted statistics upstream).
MatrixXcd psd_sqrt(const MatrixXcd& c);
MatrixXd psd_sqrt(const MatrixXd& c);

/// Plain-text round trip used by solver regression tests.
std::string problem_to_text(const SocpProblem& problem);
SocpProblem problem_from_text(const std::string& text);
void save_problem(const SocpProblem& problem, const std::string& path);
SocpProblem load_problem(const std::string& path);

namespace detail {

/// Continuous solve with some variables substituted by constants; used by
/// branch-and-bound nodes. `fixed` holds NaN for free variables.
SocpSolution solve_with_fixed(const SocpProblem& problem, const VectorXd& fixed,
                              const SocpSettings& settings);

}  // namespace detail

}  // namespace uavcf
