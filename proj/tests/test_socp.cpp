#include <doctest.h>

#include <cmath>

#include "uavcf/rng.hpp"
#include "uavcf/socp.hpp"

using namespace uavcf;

namespace {

SocpProblem single_link_problem(double gamma, double sigma, double b) {
  // minimize rho  s.t.  ||[b rho; sigma]|| <= sqrt((1+gamma)/gamma) b rho
  SocpProblem p;
  p.n_vars = 1;
  p.objective = VectorXd::Ones(1);
  ConeConstraint cone;
  cone.A = MatrixXd::Zero(2, 1);
  cone.A(0, 0) = b;
  cone.b = VectorXd::Zero(2);
  cone.b[1] = sigma;
  cone.c = VectorXd::Zero(1);
  cone.c[0] = std::sqrt((1.0 + gamma) / gamma) * b;
  cone.d = 0.0;
  p.cones.push_back(cone);
  p.bounds = {{0.0, std::numeric_limits<double>::infinity()}};
  return p;
}

// Random mixed-binary instance shaped like an activation problem: K demand
// cones over per-group variables, one capacity cone per group gated by its
// binary, a shared budget row over the binaries.
SocpProblem random_activation_instance(int n_groups, int n_users, Rng& rng) {
  const int n_rho = n_groups * n_users;
  SocpProblem p;
  p.n_vars = n_rho + n_groups;
  p.objective.resize(p.n_vars);
  for (int i = 0; i < n_rho; ++i) p.objective[i] = 0.05 * rng.uniform();
  for (int l = 0; l < n_groups; ++l) p.objective[n_rho + l] = 0.5 + 1.5 * rng.uniform();
  p.bounds.assign(p.n_vars, VariableBounds{0.0, std::numeric_limits<double>::infinity()});
  for (int l = 0; l < n_groups; ++l) p.bounds[n_rho + l] = {0.0, 1.0};

  auto rho_index = [&](int k, int l) { return k * n_groups + l; };

  // demand cones: ||[S rho_k; sigma]|| <= coef * b_k' rho_k
  for (int k = 0; k < n_users; ++k) {
    ConeConstraint cone;
    const int rows = n_groups + 1;
    cone.A = MatrixXd::Zero(rows, p.n_vars);
    for (int l = 0; l < n_groups; ++l) {
      cone.A(l, rho_index(k, l)) = 0.5 + rng.uniform();
    }
    cone.b = VectorXd::Zero(rows);
    cone.b[rows - 1] = 0.3 + rng.uniform();
    cone.c = VectorXd::Zero(p.n_vars);
    for (int l = 0; l < n_groups; ++l) {
      cone.c[rho_index(k, l)] = 1.0 + 2.0 * rng.uniform();
    }
    cone.d = 0.0;
    p.cones.push_back(std::move(cone));
  }
  // capacity cones: ||rho-bar_l|| <= alpha_l * sqrt(P)
  for (int l = 0; l < n_groups; ++l) {
    ConeConstraint cone;
    cone.A = MatrixXd::Zero(n_users, p.n_vars);
    for (int k = 0; k < n_users; ++k) cone.A(k, rho_index(k, l)) = 1.0;
    cone.b = VectorXd::Zero(n_users);
    cone.c = VectorXd::Zero(p.n_vars);
    cone.c[n_rho + l] = 1.5;
    cone.d = 0.0;
    p.cones.push_back(std::move(cone));

    BinaryImplication imp;
    imp.binary_index = n_rho + l;
    for (int k = 0; k < n_users; ++k) imp.zero_when_off.push_back(rho_index(k, l));
    p.implications.push_back(std::move(imp));
  }
  // budget over binaries, sized so not all groups can be active
  LinearConstraint budget;
  budget.row = VectorXd::Zero(p.n_vars);
  for (int l = 0; l < n_groups; ++l) budget.row[n_rho + l] = 0.5 + rng.uniform();
  budget.rhs = 0.45 * budget.row.sum();
  p.linears.push_back(std::move(budget));

  for (int l = 0; l < n_groups; ++l) p.binary_indices.push_back(n_rho + l);
  return p;
}

// Exhaustive oracle: solve the continuous problem for every binary pattern.
SocpSolution enumerate_patterns(const SocpProblem& prob, const SocpSettings& settings) {
  const int nb = static_cast<int>(prob.binary_indices.size());
  SocpSolution best;
  best.status = SolveStatus::Infeasible;
  best.objective = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << nb); ++mask) {
    VectorXd fixed = VectorXd::Constant(prob.n_vars, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < nb; ++i) {
      const int b = prob.binary_indices[i];
      const double v = (mask >> i) & 1 ? 1.0 : 0.0;
      fixed[b] = v;
      if (v == 0.0) {
        for (const auto& imp : prob.implications) {
          if (imp.binary_index != b) continue;
          for (const int j : imp.zero_when_off) fixed[j] = 0.0;
        }
      }
    }
    SocpSolution sol = detail::solve_with_fixed(prob, fixed, settings);
    if (sol.status == SolveStatus::Optimal && sol.objective < best.objective) {
      best = sol;
      best.status = SolveStatus::Optimal;
    }
  }
  return best;
}

double max_cone_violation(const SocpProblem& prob, const VectorXd& x) {
  double worst = 0.0;
  for (const auto& cone : prob.cones) {
    const double lhs = (cone.A * x + cone.b).norm();
    const double rhs = cone.c.dot(x) + cone.d;
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

double max_linear_violation(const SocpProblem& prob, const VectorXd& x) {
  double worst = 0.0;
  for (const auto& lin : prob.linears) {
    const double r = lin.row.dot(x) - lin.rhs;
    worst = std::max(worst, lin.sense == Sense::Equal ? std::abs(r) : r);
  }
  if (!prob.bounds.empty()) {
    for (int i = 0; i < prob.n_vars; ++i) {
      if (std::isfinite(prob.bounds[i].lo)) worst = std::max(worst, prob.bounds[i].lo - x[i]);
      if (std::isfinite(prob.bounds[i].hi)) worst = std::max(worst, x[i] - prob.bounds[i].hi);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("norm ball minimum matches hand algebra") {
  // minimize x s.t. ||[x; 1]|| <= 2  ->  x* = -sqrt(3)
  SocpProblem p;
  p.n_vars = 1;
  p.objective = VectorXd::Ones(1);
  ConeConstraint cone;
  cone.A = MatrixXd::Identity(2, 1);
  cone.b = VectorXd::Zero(2);
  cone.b[1] = 1.0;
  cone.c = VectorXd::Zero(1);
  cone.d = 2.0;
  p.cones.push_back(cone);
  const SocpSolution sol = solve_socp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-7));
  CHECK(sol.objective == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-7));
}

TEST_CASE("single link power matches the closed form") {
  const SocpSolution sol = solve_socp(single_link_problem(1.0, 1.0, 1.0));
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(std::abs(sol.x[0] - 1.0) < 1e-6);

  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double gamma = 0.1 + 10.0 * rng.uniform();
    const double sigma = 0.2 + 2.0 * rng.uniform();
    const double b = 0.3 + 3.0 * rng.uniform();
    const SocpSolution s = solve_socp(single_link_problem(gamma, sigma, b));
    REQUIRE(s.status == SolveStatus::Optimal);
    const double expected = std::sqrt(gamma) * sigma / b;
    CHECK(std::abs(s.x[0] - expected) < 1e-6 * std::max(1.0, expected));
  }
}

TEST_CASE("impossible cone is infeasible") {
  SocpProblem p;
  p.n_vars = 1;
  p.objective = VectorXd::Zero(1);
  ConeConstraint cone;
  cone.A = MatrixXd::Identity(1, 1);
  cone.b = VectorXd::Zero(1);
  cone.c = VectorXd::Zero(1);
  cone.d = -1.0;
  p.cones.push_back(cone);
  CHECK(solve_socp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("conflicting linear constraints are certified infeasible") {
  SocpProblem p;
  p.n_vars = 1;
  p.objective = VectorXd::Ones(1);
  p.bounds = {{0.0, 1.0}};
  LinearConstraint lin;
  lin.row = VectorXd::Ones(1) * -1.0;  // -x <= -2  ->  x >= 2
  lin.rhs = -2.0;
  p.linears.push_back(lin);
  CHECK(solve_socp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded direction is certified") {
  SocpProblem p;
  p.n_vars = 1;
  p.objective = -VectorXd::Ones(1);
  p.bounds = {{0.0, std::numeric_limits<double>::infinity()}};
  CHECK(solve_socp(p).status == SolveStatus::Unbounded);
}

TEST_CASE("equalities and epigraph cone") {
  // minimize t s.t. ||[2x; t-1]|| <= t+1, x = 3  ->  t = x^2 = 9
  SocpProblem p;
  p.n_vars = 2;  // x, t
  p.objective = VectorXd::Zero(2);
  p.objective[1] = 1.0;
  ConeConstraint cone;
  cone.A = MatrixXd::Zero(2, 2);
  cone.A(0, 0) = 2.0;
  cone.A(1, 1) = 1.0;
  cone.b = VectorXd::Zero(2);
  cone.b[1] = -1.0;
  cone.c = VectorXd::Zero(2);
  cone.c[1] = 1.0;
  cone.d = 1.0;
  p.cones.push_back(cone);
  LinearConstraint eq;
  eq.row = VectorXd::Zero(2);
  eq.row[0] = 1.0;
  eq.rhs = 3.0;
  eq.sense = Sense::Equal;
  p.linears.push_back(eq);
  const SocpSolution sol = solve_socp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[1] == doctest::Approx(9.0).epsilon(1e-7));
}

TEST_CASE("optimal solutions satisfy the KKT feasibility contract") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    SocpProblem p = random_activation_instance(3 + (trial % 3), 2 + (trial % 2), rng);
    p.binary_indices.clear();  // continuous relaxation
    const SocpSolution sol = solve_socp(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(max_cone_violation(p, sol.x) <= 1e-6);
    CHECK(max_linear_violation(p, sol.x) <= 1e-8);
  }
}

TEST_CASE("bit identical resolves") {
  Rng rng(3);
  SocpProblem p = random_activation_instance(4, 3, rng);
  const SocpSolution a = solve_mbsocp(p);
  const SocpSolution b = solve_mbsocp(p);
  REQUIRE(a.status == b.status);
  REQUIRE(a.x.size() == b.x.size());
  for (int i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
}

TEST_CASE("integral relaxation short circuits branching") {
  // Binary with cost pushes alpha to exactly 0; no branching needed.
  SocpProblem p;
  p.n_vars = 2;  // x, alpha
  p.objective.resize(2);
  p.objective << 1.0, 1.0;
  p.bounds = {{0.0, 10.0}, {0.0, 1.0}};
  p.binary_indices = {1};
  const SocpSolution sol = solve_mbsocp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(sol.x[1] == 0.0);
  CHECK(sol.nodes <= 3);
}

TEST_CASE("branch and bound matches exhaustive enumeration") {
  Rng rng(42);
  SocpSettings settings;
  for (int trial = 0; trial < 8; ++trial) {
    SocpProblem p = random_activation_instance(3 + (trial % 4), 2 + (trial % 3), rng);
    const SocpSolution bb = solve_mbsocp(p, settings);
    const SocpSolution oracle = enumerate_patterns(p, settings);
    REQUIRE(bb.status == oracle.status);
    if (bb.status == SolveStatus::Optimal) {
      CHECK(std::abs(bb.objective - oracle.objective) <=
            1e-6 * std::max(1.0, std::abs(oracle.objective)));
      for (const int b : p.binary_indices) {
        CHECK(std::min(std::abs(bb.x[b]), std::abs(bb.x[b] - 1.0)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("all binaries forced off with positive demand is infeasible") {
  Rng rng(5);
  SocpProblem p = random_activation_instance(3, 2, rng);
  // force every binary to zero through its upper bound
  for (const int b : p.binary_indices) p.bounds[b].hi = 0.0;
  CHECK(solve_mbsocp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("psd_sqrt basics") {
  const MatrixXd eye = MatrixXd::Identity(3, 3);
  CHECK(psd_sqrt(eye).isApprox(eye, 1e-12));

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const MatrixXd s = psd_sqrt(d);
  CHECK(s(0, 0) == doctest::Approx(2.0));
  CHECK(s(1, 1) == doctest::Approx(3.0));

  Rng rng(9);
  MatrixXcd m(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) m(i, j) = rng.cnormal();
  }
  const MatrixXcd c = m * m.adjoint();
  const MatrixXcd r = psd_sqrt(c);
  CHECK((r * r.adjoint() - c).norm() <= 1e-10 * c.norm());

  MatrixXd indef = MatrixXd::Identity(2, 2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(psd_sqrt(indef), std::invalid_argument);

  // tiny negative eigenvalue inside the clamp window
  MatrixXd nearly = MatrixXd::Identity(2, 2);
  nearly(1, 1) = -1e-9;
  const MatrixXd rs = psd_sqrt(nearly);
  CHECK(rs(1, 1) == 0.0);
}

TEST_CASE("problem text round trip") {
  Rng rng(17);
  SocpProblem p = random_activation_instance(3, 2, rng);
  const std::string text = problem_to_text(p);
  const SocpProblem q = problem_from_text(text);
  const SocpSolution a = solve_mbsocp(p);
  const SocpSolution b = solve_mbsocp(q);
  REQUIRE(a.status == b.status);
  for (int i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
}
