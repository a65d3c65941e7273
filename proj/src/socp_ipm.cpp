// Primal-dual interior-point solver for second-order cone programs.
//
// The continuous problem is brought to the conic standard form
//
//     minimize    c^T x
//     subject to  A x = b,   G x + s = h,   s in K,
//
// with K a product of a nonnegative orthant and second-order cones, and then
// solved on the homogeneous self-dual embedding with Nesterov-Todd scaling
// and a Mehrotra predictor-corrector step (the classic embedded-conic-solver
// recipe). The embedding yields infeasibility and unboundedness certificates
// instead of diverging when the problem has no solution.
//
// Problems here are desk scale (a few hundred variables and a few thousand
// cone rows), so the KKT system is solved densely through the normal
// equations M = G^T W^{-2} G with static regularization, followed by
// iterative refinement against the unregularized KKT matrix to recover the
// accuracy lost by the reduction.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <vector>

#include "uavcf/socp.hpp"

namespace uavcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// standard form
// ---------------------------------------------------------------------------

struct StandardForm {
  VectorXd c;
  MatrixXd A;  // p x n equalities
  VectorXd b;
  MatrixXd G;  // m x n inequalities, s = h - G x in K
  VectorXd h;
  int nlp = 0;                 // leading LP rows of G
  std::vector<int> soc_dims;   // subsequent second-order cone blocks
  double data_norm = 1.0;      // max |entry| over A, G (certificate scaling)

  int n() const { return static_cast<int>(c.size()); }
  int p() const { return static_cast<int>(b.size()); }
  int m() const { return static_cast<int>(h.size()); }
  int degree() const { return nlp + static_cast<int>(soc_dims.size()); }
};

struct Standardized {
  StandardForm form;
  std::vector<int> free_index;        // free slot -> original variable
  VectorXd fixed_values;              // NaN for free variables
  double objective_constant = 0.0;
  std::optional<SolveStatus> trivial; // set when presolve already decided
};

bool is_free(double v) { return std::isnan(v); }

// Substitutes fixed variables, turns bounds into LP rows and drops rows that
// became vacuous. Only trivially decidable contradictions are detected here.
Standardized standardize(const SocpProblem& prob, const VectorXd& fixed) {
  Standardized out;
  out.fixed_values = fixed;

  std::vector<int> slot(prob.n_vars, -1);
  for (int i = 0; i < prob.n_vars; ++i) {
    if (is_free(fixed[i])) {
      slot[i] = static_cast<int>(out.free_index.size());
      out.free_index.push_back(i);
    }
  }
  const int n = static_cast<int>(out.free_index.size());

  out.objective_constant = prob.objective_constant;
  out.form.c = VectorXd::Zero(n);
  for (int i = 0; i < prob.n_vars; ++i) {
    if (slot[i] >= 0) {
      out.form.c[slot[i]] = prob.objective[i];
    } else {
      out.objective_constant += prob.objective[i] * fixed[i];
    }
  }

  std::vector<VectorXd> eq_rows, lp_rows;
  std::vector<double> eq_rhs, lp_rhs;
  auto reduce_row = [&](const VectorXd& row, double rhs, VectorXd& r_out, double& rhs_out) {
    r_out = VectorXd::Zero(n);
    rhs_out = rhs;
    for (int i = 0; i < prob.n_vars; ++i) {
      if (row[i] == 0.0) continue;
      if (slot[i] >= 0) {
        r_out[slot[i]] += row[i];
      } else {
        rhs_out -= row[i] * fixed[i];
      }
    }
  };

  const double feas_eps = 1e-9;
  for (const auto& lin : prob.linears) {
    VectorXd r;
    double rhs;
    reduce_row(lin.row, lin.rhs, r, rhs);
    const bool empty = (r.lpNorm<Eigen::Infinity>() == 0.0);
    if (lin.sense == Sense::Equal) {
      if (empty) {
        if (std::abs(rhs) > feas_eps * std::max(1.0, std::abs(lin.rhs))) {
          out.trivial = SolveStatus::Infeasible;
          return out;
        }
        continue;
      }
      eq_rows.push_back(std::move(r));
      eq_rhs.push_back(rhs);
    } else {
      if (empty) {
        if (rhs < -feas_eps * std::max(1.0, std::abs(lin.rhs))) {
#ifdef UAVCF_IPM_TRACE
          std::fprintf(stderr, "presolve: empty LP row rhs=%g\n", rhs);
#endif
          out.trivial = SolveStatus::Infeasible;
          return out;
        }
        continue;
      }
      lp_rows.push_back(std::move(r));
      lp_rhs.push_back(rhs);
    }
  }

  if (!prob.bounds.empty()) {
    for (int i = 0; i < prob.n_vars; ++i) {
      if (slot[i] < 0) continue;  // fixed values are trusted to honor bounds
      const auto& bd = prob.bounds[i];
      if (std::isfinite(bd.hi)) {
        VectorXd r = VectorXd::Zero(n);
        r[slot[i]] = 1.0;
        lp_rows.push_back(std::move(r));
        lp_rhs.push_back(bd.hi);
      }
      if (std::isfinite(bd.lo)) {
        VectorXd r = VectorXd::Zero(n);
        r[slot[i]] = -1.0;
        lp_rows.push_back(std::move(r));
        lp_rhs.push_back(-bd.lo);
      }
    }
  }

  struct ConeRows {
    MatrixXd a;
    VectorXd b;
    VectorXd c;
    double d;
  };
  std::vector<ConeRows> cones;
  for (const auto& cone : prob.cones) {
    ConeRows cr;
    cr.a = MatrixXd::Zero(cone.A.rows(), n);
    cr.b = cone.b;
    for (int i = 0; i < prob.n_vars; ++i) {
      if (slot[i] >= 0) {
        cr.a.col(slot[i]) = cone.A.col(i);
      } else if (cone.A.col(i).lpNorm<Eigen::Infinity>() != 0.0) {
        cr.b += cone.A.col(i) * fixed[i];
      }
    }
    double d;
    VectorXd crow;
    reduce_row(cone.c, cone.d, crow, d);
    cr.c = std::move(crow);
    cr.d = d;

    const bool a_empty = (cr.a.size() == 0 || cr.a.lpNorm<Eigen::Infinity>() == 0.0);
    const bool c_empty = (cr.c.lpNorm<Eigen::Infinity>() == 0.0);
    if (a_empty) {
      const double lhs = cr.b.size() ? cr.b.norm() : 0.0;
      if (c_empty) {
        if (lhs > cr.d + feas_eps * std::max(1.0, std::abs(cr.d))) {
#ifdef UAVCF_IPM_TRACE
          std::fprintf(stderr, "presolve: constant cone lhs=%g d=%g\n", lhs, cr.d);
#endif
          out.trivial = SolveStatus::Infeasible;
          return out;
        }
        continue;  // constant constraint, satisfied
      }
      // ||const|| <= c^T x + d  ->  plain LP row
      lp_rows.push_back(-cr.c);
      lp_rhs.push_back(cr.d - lhs);
      continue;
    }
    if (c_empty && cr.d < 0.0) {
#ifdef UAVCF_IPM_TRACE
      std::fprintf(stderr, "presolve: cone with d=%g and no c\n", cr.d);
#endif
      out.trivial = SolveStatus::Infeasible;
      return out;
    }
    cones.push_back(std::move(cr));
  }

  StandardForm& f = out.form;
  f.nlp = static_cast<int>(lp_rows.size());
  int m = f.nlp;
  for (const auto& cr : cones) {
    f.soc_dims.push_back(static_cast<int>(cr.a.rows()) + 1);
    m += f.soc_dims.back();
  }
  f.G.resize(m, n);
  f.h.resize(m);
  for (int i = 0; i < f.nlp; ++i) {
    f.G.row(i) = lp_rows[i].transpose();
    f.h[i] = lp_rhs[i];
  }
  int r = f.nlp;
  for (const auto& cr : cones) {
    f.G.row(r) = -cr.c.transpose();
    f.h[r] = cr.d;
    ++r;
    f.G.middleRows(r, cr.a.rows()) = -cr.a;
    f.h.segment(r, cr.b.size()) = cr.b;
    r += static_cast<int>(cr.a.rows());
  }
  f.A.resize(static_cast<int>(eq_rows.size()), n);
  f.b.resize(eq_rows.size());
  for (std::size_t i = 0; i < eq_rows.size(); ++i) {
    f.A.row(static_cast<int>(i)) = eq_rows[i].transpose();
    f.b[static_cast<int>(i)] = eq_rhs[i];
  }
  f.data_norm = 1.0;
  if (f.G.size() > 0) f.data_norm = std::max(f.data_norm, f.G.cwiseAbs().maxCoeff());
  if (f.A.size() > 0) f.data_norm = std::max(f.data_norm, f.A.cwiseAbs().maxCoeff());
  return out;
}

// ---------------------------------------------------------------------------
// cone algebra
// ---------------------------------------------------------------------------

// Nesterov-Todd scaling point. For the LP block W = diag(sqrt(s/z)); for a
// second-order cone W = eta [a, q^T; q, I + q q^T/(1+a)] built from the
// normalized scaling point w = (a; q) with a^2 - ||q||^2 = 1.
struct Scaling {
  VectorXd lp_w2;      // (s_i / z_i) per LP row
  VectorXd lp_w2_inv;  // (z_i / s_i)
  struct Soc {
    double eta = 1.0;
    double a = 1.0;
    VectorXd q;
  };
  std::vector<Soc> socs;
};

struct ConeLayout {
  int nlp = 0;
  std::vector<int> soc_dims;
};

bool compute_scaling(const ConeLayout& lay, const VectorXd& s, const VectorXd& z, Scaling& w) {
  w.lp_w2.resize(lay.nlp);
  w.lp_w2_inv.resize(lay.nlp);
  for (int i = 0; i < lay.nlp; ++i) {
    if (s[i] <= 0.0 || z[i] <= 0.0) return false;
    w.lp_w2[i] = s[i] / z[i];
    w.lp_w2_inv[i] = z[i] / s[i];
  }
  w.socs.resize(lay.soc_dims.size());
  int off = lay.nlp;
  for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
    const int dim = lay.soc_dims[k];
    const auto sk = s.segment(off, dim);
    const auto zk = z.segment(off, dim);
    const double s_res = sk[0] * sk[0] - sk.tail(dim - 1).squaredNorm();
    const double z_res = zk[0] * zk[0] - zk.tail(dim - 1).squaredNorm();
    if (s_res <= 0.0 || z_res <= 0.0 || sk[0] <= 0.0 || zk[0] <= 0.0) return false;
    const double a_s = std::sqrt(s_res), a_z = std::sqrt(z_res);
    const VectorXd sbar = sk / a_s, zbar = zk / a_z;
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    Scaling::Soc& soc = w.socs[k];
    soc.a = 0.5 / gamma * (sbar[0] + zbar[0]);
    soc.q = 0.5 / gamma * (sbar.tail(dim - 1) - zbar.tail(dim - 1));
    soc.eta = std::sqrt(a_s / a_z);
    off += dim;
  }
  return true;
}

// u := W u restricted to one SOC block.
void soc_apply_w(const Scaling::Soc& soc, Eigen::Ref<VectorXd> u) {
  const double zeta = soc.q.dot(u.tail(u.size() - 1));
  const double u0 = u[0];
  u[0] = soc.eta * (soc.a * u0 + zeta);
  u.tail(u.size() - 1) =
      soc.eta * (u.tail(u.size() - 1) + (u0 + zeta / (1.0 + soc.a)) * soc.q);
}

void soc_apply_w_inv(const Scaling::Soc& soc, Eigen::Ref<VectorXd> u) {
  const double zeta = soc.q.dot(u.tail(u.size() - 1));
  const double u0 = u[0];
  u[0] = (soc.a * u0 - zeta) / soc.eta;
  u.tail(u.size() - 1) =
      (u.tail(u.size() - 1) + (-u0 + zeta / (1.0 + soc.a)) * soc.q) / soc.eta;
}

void apply_w(const ConeLayout& lay, const Scaling& w, VectorXd& u) {
  for (int i = 0; i < lay.nlp; ++i) u[i] *= std::sqrt(w.lp_w2[i]);
  int off = lay.nlp;
  for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
    soc_apply_w(w.socs[k], u.segment(off, lay.soc_dims[k]));
    off += lay.soc_dims[k];
  }
}

void apply_w_inv(const ConeLayout& lay, const Scaling& w, VectorXd& u) {
  for (int i = 0; i < lay.nlp; ++i) u[i] /= std::sqrt(w.lp_w2[i]);
  int off = lay.nlp;
  for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
    soc_apply_w_inv(w.socs[k], u.segment(off, lay.soc_dims[k]));
    off += lay.soc_dims[k];
  }
}

void apply_w2(const ConeLayout& lay, const Scaling& w, VectorXd& u) {
  for (int i = 0; i < lay.nlp; ++i) u[i] *= w.lp_w2[i];
  int off = lay.nlp;
  for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
    soc_apply_w(w.socs[k], u.segment(off, lay.soc_dims[k]));
    soc_apply_w(w.socs[k], u.segment(off, lay.soc_dims[k]));
    off += lay.soc_dims[k];
  }
}

void apply_w2_inv(const ConeLayout& lay, const Scaling& w, VectorXd& u) {
  for (int i = 0; i < lay.nlp; ++i) u[i] *= w.lp_w2_inv[i];
  int off = lay.nlp;
  for (std::size_t k = 0; k < lay.soc_dims.size(); ++k) {
    soc_apply_w_inv(w.socs[k], u.segment(off, lay.soc_dims[k]));
    soc_apply_w_inv(w.socs[k], u.segment(off, lay.soc_dims[k]));
    off += lay.soc_dims[k];
  }
}

// Jordan product u o w and its inverse against lambda, blockwise.
VectorXd cone_product(const ConeLayout& lay, const VectorXd& u, const VectorXd& v) {
  VectorXd out(u.size());
  for (int i = 0; i < lay.nlp; ++i) out[i] = u[i] * v[i];
  int off = lay.nlp;
  for (const int dim : lay.soc_dims) {
    const auto uk = u.segment(off, dim);
    const auto vk = v.segment(off, dim);
    out[off] = uk.dot(vk);
    out.segment(off + 1, dim - 1) = uk[0] * vk.tail(dim - 1) + vk[0] * uk.tail(dim - 1);
    off += dim;
  }
  return out;
}

// Solves lambda o u = d for u.
VectorXd cone_divide(const ConeLayout& lay, const VectorXd& lambda, const VectorXd& d) {
  VectorXd out(d.size());
  for (int i = 0; i < lay.nlp; ++i) out[i] = d[i] / lambda[i];
  int off = lay.nlp;
  for (const int dim : lay.soc_dims) {
    const auto lk = lambda.segment(off, dim);
    const auto dk = d.segment(off, dim);
    const double det = lk[0] * lk[0] - lk.tail(dim - 1).squaredNorm();
    const double u0 = (lk[0] * dk[0] - lk.tail(dim - 1).dot(dk.tail(dim - 1))) / det;
    out[off] = u0;
    out.segment(off + 1, dim - 1) = (dk.tail(dim - 1) - u0 * lk.tail(dim - 1)) / lk[0];
    off += dim;
  }
  return out;
}

VectorXd cone_identity(const ConeLayout& lay, int m) {
  VectorXd e = VectorXd::Zero(m);
  for (int i = 0; i < lay.nlp; ++i) e[i] = 1.0;
  int off = lay.nlp;
  for (const int dim : lay.soc_dims) {
    e[off] = 1.0;
    off += dim;
  }
  return e;
}

// Largest step a with u + a du staying in the cone; +inf when unconstrained.
double step_to_boundary(const ConeLayout& lay, const VectorXd& u, const VectorXd& du) {
  double alpha = kInf;
  for (int i = 0; i < lay.nlp; ++i) {
    if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
  }
  int off = lay.nlp;
  for (const int dim : lay.soc_dims) {
    const auto uk = u.segment(off, dim);
    const auto dk = du.segment(off, dim);
    const double a = dk[0] * dk[0] - dk.tail(dim - 1).squaredNorm();
    const double b = 2.0 * (uk[0] * dk[0] - uk.tail(dim - 1).dot(dk.tail(dim - 1)));
    const double c = uk[0] * uk[0] - uk.tail(dim - 1).squaredNorm();
    off += dim;
    if (c <= 0.0) return 0.0;  // not strictly interior, should not happen
    const double disc = b * b - 4.0 * a * c;
    double root = kInf;
    if (a == 0.0) {
      if (b < 0.0) root = -c / b;
    } else if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      const double r1 = q / a;
      const double r2 = (q != 0.0) ? c / q : kInf;
      if (r1 > 0.0) root = std::min(root, r1);
      if (r2 > 0.0) root = std::min(root, r2);
      if (a < 0.0 && r1 <= 0.0 && r2 <= 0.0) root = kInf;  // opens downward, roots behind us
    }
    alpha = std::min(alpha, root);
  }
  return alpha;
}

// Shifts a point into the interior of the cone along the identity element.
void bring_to_cone(const ConeLayout& lay, VectorXd& u) {
  double worst = 0.0;
  for (int i = 0; i < lay.nlp; ++i) worst = std::min(worst, u[i]);
  int off = lay.nlp;
  for (const int dim : lay.soc_dims) {
    const auto uk = u.segment(off, dim);
    worst = std::min(worst, uk[0] - uk.tail(dim - 1).norm());
    off += dim;
  }
  if (worst <= 0.0) {
    const double shift = 1.0 - worst;
    for (int i = 0; i < lay.nlp; ++i) u[i] += shift;
    off = lay.nlp;
    for (const int dim : lay.soc_dims) {
      u[off] += shift;
      off += dim;
    }
  }
}

// ---------------------------------------------------------------------------
// KKT solver: dense LDL^T of the full quasidefinite system
//
//   [ dI   A^T     G^T    ]
//   [ A   -dI      0      ]
//   [ G    0   -W^2 - dI  ]
//
// Static regularization d makes the matrix quasidefinite so the unpivoted
// factorization cannot break down; iterative refinement against the
// unregularized matrix restores the accuracy. The z-block recovery never
// multiplies by W^{-2}, which keeps directions usable at small mu.
// ---------------------------------------------------------------------------

class KktSolver {
 public:
  KktSolver(const StandardForm& f, const ConeLayout& lay)
      : f_(f), lay_(lay), dim_(f.n() + f.p() + f.m()) {
    kmat_.resize(dim_, dim_);
  }

  bool factor(const Scaling& w) {
    scaling_ = &w;
    const int n = f_.n(), p = f_.p(), m = f_.m();
    kmat_.setZero();
    kmat_.block(n, 0, p, n) = f_.A;
    kmat_.block(0, n, n, p) = f_.A.transpose();
    kmat_.block(n + p, 0, m, n) = f_.G;
    kmat_.block(0, n + p, n, m) = f_.G.transpose();
    // -W^2 blockwise: diagonal for LP rows, eta^2 (2 w w^T - J) per SOC
    const int zoff = n + p;
    for (int i = 0; i < lay_.nlp; ++i) kmat_(zoff + i, zoff + i) = -w.lp_w2[i];
    int off = lay_.nlp;
    for (const auto& soc : w.socs) {
      const int dim = static_cast<int>(soc.q.size()) + 1;
      const double e2 = soc.eta * soc.eta;
      const int base = zoff + off;
      kmat_(base, base) = -e2 * (2.0 * soc.a * soc.a - 1.0);
      for (int i = 1; i < dim; ++i) {
        const double wqi = soc.q[i - 1];
        kmat_(base + i, base) = -e2 * 2.0 * soc.a * wqi;
        kmat_(base, base + i) = kmat_(base + i, base);
        for (int j = 1; j <= i; ++j) {
          kmat_(base + i, base + j) = -e2 * (2.0 * wqi * soc.q[j - 1] + (i == j ? 1.0 : 0.0));
          kmat_(base + j, base + i) = kmat_(base + i, base + j);
        }
      }
      off += dim;
    }
    if (!kmat_.allFinite()) return false;
    lu_.compute(kmat_);
    return true;
  }

  // Solves the unregularized KKT system with iterative refinement.
  void solve(const VectorXd& rx, const VectorXd& ry, const VectorXd& rz, VectorXd& dx,
             VectorXd& dy, VectorXd& dz) const {
    const int n = f_.n(), p = f_.p(), m = f_.m();
    VectorXd rhs(dim_), sol(dim_);
    rhs.head(n) = rx;
    if (p > 0) rhs.segment(n, p) = ry;
    rhs.tail(m) = rz;
    sol = lu_.solve(rhs);
    const double ref = std::max(rhs.lpNorm<Eigen::Infinity>(), 1.0);
    VectorXd err(dim_), best = sol;
    double best_res = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 6; ++pass) {
      residual(sol, rhs, err);
      const double res = err.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(res) || res >= best_res) break;  // stopped improving
      best_res = res;
      best = sol;
      if (res <= 1e-14 * ref) break;
      sol += lu_.solve(err);
    }
    sol = best;
    dx = sol.head(n);
    dy = sol.segment(n, p);
    dz = sol.tail(m);
  }

 private:
  // err = rhs - K0 sol with K0 the unregularized KKT matrix.
  void residual(const VectorXd& sol, const VectorXd& rhs, VectorXd& err) const {
    const int n = f_.n(), p = f_.p(), m = f_.m();
    const auto dx = sol.head(n);
    const auto dy = sol.segment(n, p);
    const auto dz = sol.tail(m);
    err.head(n) = rhs.head(n) - f_.G.transpose() * dz;
    if (p > 0) {
      err.head(n) -= f_.A.transpose() * dy;
      err.segment(n, p) = rhs.segment(n, p) - f_.A * dx;
    }
    VectorXd w2dz = dz;
    apply_w2(lay_, *scaling_, w2dz);
    err.tail(m) = rhs.tail(m) - f_.G * dx + w2dz;
  }

  const StandardForm& f_;
  const ConeLayout& lay_;
  const Scaling* scaling_ = nullptr;
  int dim_ = 0;
  MatrixXd kmat_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

// ---------------------------------------------------------------------------
// interior-point iteration
// ---------------------------------------------------------------------------

struct IpmResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  VectorXd x;
  double gap = 0.0;
  int iterations = 0;
};

IpmResult run_ipm(const StandardForm& f, const SocpSettings& st) {
  IpmResult result;
  const int n = f.n(), p = f.p(), m = f.m();
  if (m == 0) {
    // Only possible for degenerate inputs; nothing to anchor the embedding.
    if (p == 0 && f.c.lpNorm<Eigen::Infinity>() == 0.0) {
      result.status = SolveStatus::Optimal;
      result.x = VectorXd::Zero(n);
    } else {
      result.status = p == 0 ? SolveStatus::Unbounded : SolveStatus::NumericalFailure;
      result.x = VectorXd::Zero(n);
    }
    return result;
  }

  ConeLayout lay{f.nlp, f.soc_dims};
  KktSolver kkt(f, lay);

  // Identity-scaling initialization.
  Scaling w;
  w.lp_w2 = VectorXd::Ones(f.nlp);
  w.lp_w2_inv = VectorXd::Ones(f.nlp);
  w.socs.resize(f.soc_dims.size());
  for (std::size_t k = 0; k < f.soc_dims.size(); ++k) {
    w.socs[k].eta = 1.0;
    w.socs[k].a = 1.0;
    w.socs[k].q = VectorXd::Zero(f.soc_dims[k] - 1);
  }
  if (!kkt.factor(w)) return result;

  VectorXd x(n), y(p), z(m), s(m);
  {
    VectorXd dx, dy, dz;
    kkt.solve(VectorXd::Zero(n), f.b, f.h, dx, dy, dz);
    x = dx;
    s = -dz;
    bring_to_cone(lay, s);
    kkt.solve(-f.c, VectorXd::Zero(p), VectorXd::Zero(m), dx, dy, dz);
    y = dy;
    z = dz;
    bring_to_cone(lay, z);
  }
  double tau = 1.0, kappa = 1.0;

  const double cnorm = std::max(1.0, f.c.norm());
  const double bnorm = std::max(1.0, f.b.size() ? f.b.norm() : 0.0);
  const double hnorm = std::max(1.0, f.h.norm());
  const int degree = f.degree();

  VectorXd best_x;
  double best_merit = kInf;

  for (int iter = 0; iter <= st.max_iters; ++iter) {
    result.iterations = iter;

    // Residuals of the homogeneous embedding.
    VectorXd rx = f.G.transpose() * z + f.c * tau;
    if (p > 0) rx += f.A.transpose() * y;
    VectorXd ry = p > 0 ? VectorXd(f.A * x - f.b * tau) : VectorXd();
    VectorXd rz = f.G * x + s - f.h * tau;
    const double cx = f.c.dot(x);
    const double by = p > 0 ? f.b.dot(y) : 0.0;
    const double hz = f.h.dot(z);
    const double rt = kappa + cx + by + hz;

    // Convergence measured on the descaled iterate.
    const double pres = std::max(p > 0 ? ry.norm() / bnorm : 0.0, rz.norm() / hnorm) / tau;
    const double dres = rx.norm() / cnorm / tau;
    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double gap_abs = s.dot(z) / (tau * tau);
    const double relgap = gap_abs / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

#ifdef UAVCF_IPM_TRACE
    std::fprintf(stderr, "it=%2d pres=%9.2e dres=%9.2e gap=%9.2e tau=%9.2e kap=%9.2e", iter, pres, dres, gap_abs, tau, kappa);
#endif
    const double merit = std::max({pres, dres, std::min(gap_abs, relgap)});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x / tau;
      result.gap = gap_abs;
    }

    if (pres <= st.feastol && dres <= st.feastol &&
        (gap_abs <= st.abstol || relgap <= st.reltol)) {
      result.status = SolveStatus::Optimal;
      result.x = x / tau;
      result.gap = gap_abs;
      return result;
    }

    // Farkas-type certificates from the embedding. Residuals are judged
    // relative to the certificate magnitude times the data scale, otherwise a
    // merely large constraint matrix could fake a certificate.
    const double by_hz = by + hz;
    if (by_hz < 0.0) {
      VectorXd cert = f.G.transpose() * (z / -by_hz);
      double cert_scale = z.lpNorm<Eigen::Infinity>() / -by_hz;
      if (p > 0) {
        cert += f.A.transpose() * (y / -by_hz);
        cert_scale = std::max(cert_scale, y.lpNorm<Eigen::Infinity>() / -by_hz);
      }
      if (cert.lpNorm<Eigen::Infinity>() <=
          1e-9 * f.data_norm * std::max(cert_scale, 1e-30)) {
        result.status = SolveStatus::Infeasible;
        result.x = VectorXd::Zero(n);
        return result;
      }
    }
    if (cx < 0.0) {
      const double scale = -cx;
      const double r1 = p > 0 ? (f.A * x).lpNorm<Eigen::Infinity>() / scale : 0.0;
      const double r2 = (f.G * x + s).lpNorm<Eigen::Infinity>() / scale;
      const double cert_scale =
          std::max(x.lpNorm<Eigen::Infinity>(), s.lpNorm<Eigen::Infinity>()) / scale;
      if (std::max(r1, r2) <= 1e-9 * f.data_norm * std::max(cert_scale, 1e-30)) {
        result.status = SolveStatus::Unbounded;
        result.x = x / scale;
        return result;
      }
    }
    if (iter == st.max_iters) break;

    if (!compute_scaling(lay, s, z, w)) break;
    VectorXd lambda = z;
    apply_w(lay, w, lambda);
    const double mu = (s.dot(z) + tau * kappa) / (degree + 1);

    if (!kkt.factor(w)) break;

    // Static direction for the tau expansion.
    VectorXd x1, y1, z1;
    kkt.solve(-f.c, f.b, f.h, x1, y1, z1);
    const double denom = f.c.dot(x1) + (p > 0 ? f.b.dot(y1) : 0.0) + f.h.dot(z1) - kappa / tau;
    if (!std::isfinite(denom) || denom == 0.0) break;

    auto expand = [&](const VectorXd& ds_scaled, double dkap_rhs, double one_minus_sigma,
                      VectorXd& dx, VectorXd& dy, VectorXd& dz, VectorXd& ds, double& dtau,
                      double& dkappa) {
      // ds_scaled is the right-hand side of the linearized complementarity in
      // lambda space: lambda o (W dz + W^{-T} ds) = ds_scaled.
      VectorXd wds = cone_divide(lay, lambda, ds_scaled);
      apply_w(lay, w, wds);
      VectorXd rhs_z = -one_minus_sigma * rz - wds;
      VectorXd x2, y2, z2;
      kkt.solve(-one_minus_sigma * rx, p > 0 ? VectorXd(-one_minus_sigma * ry) : VectorXd(),
                rhs_z, x2, y2, z2);
      const double num = -one_minus_sigma * rt - dkap_rhs / tau - f.c.dot(x2) -
                         (p > 0 ? f.b.dot(y2) : 0.0) - f.h.dot(z2);
      dtau = num / denom;
      dx = x2 + dtau * x1;
      if (p > 0) dy = y2 + dtau * y1;
      dz = z2 + dtau * z1;
      ds = cone_divide(lay, lambda, ds_scaled);
      VectorXd w2dz = dz;
      apply_w2(lay, w, w2dz);
      apply_w(lay, w, ds);
      ds -= w2dz;
      dkappa = (dkap_rhs - kappa * dtau) / tau;
    };

    // Predictor (affine) direction.
    VectorXd dxa, dya, dza, dsa;
    double dtaua, dkappaa;
    VectorXd ds_aff = -cone_product(lay, lambda, lambda);
    expand(ds_aff, -tau * kappa, 1.0, dxa, dya, dza, dsa, dtaua, dkappaa);

    double alpha_aff = std::min(step_to_boundary(lay, s, dsa), step_to_boundary(lay, z, dza));
    if (dtaua < 0.0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
    if (dkappaa < 0.0) alpha_aff = std::min(alpha_aff, -kappa / dkappaa);
    alpha_aff = std::min(alpha_aff, 1.0);
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 1e-8, 0.9999);

    // Corrector (combined) direction with the Mehrotra second-order term.
    VectorXd ws = dsa;
    apply_w_inv(lay, w, ws);
    VectorXd wz = dza;
    apply_w(lay, w, wz);
    VectorXd ds_comb = ds_aff + sigma * mu * cone_identity(lay, m) - cone_product(lay, ws, wz);
    const double dkap_comb = -tau * kappa + sigma * mu - dtaua * dkappaa;

    VectorXd dx, dy, dz, ds;
    double dtau, dkappa;
    expand(ds_comb, dkap_comb, 1.0 - sigma, dx, dy, dz, ds, dtau, dkappa);

#ifdef UAVCF_IPM_TRACE
    {
      // verify the combined direction against the Newton equations
      VectorXd n1 = f.G.transpose() * dz + f.c * dtau + (1.0 - sigma) * rx;
      if (p > 0) n1 += f.A.transpose() * dy;
      VectorXd n3 = f.G * dx + ds - f.h * dtau + (1.0 - sigma) * rz;
      const double n4 = f.c.dot(dx) + (p > 0 ? f.b.dot(dy) : 0.0) + f.h.dot(dz) + dkappa +
                        (1.0 - sigma) * rt;
      std::fprintf(stderr, " N1=%8.1e N3=%8.1e N4=%8.1e", n1.lpNorm<Eigen::Infinity>(),
                   n3.lpNorm<Eigen::Infinity>(), std::abs(n4));
    }
#endif
    double alpha = std::min(step_to_boundary(lay, s, ds), step_to_boundary(lay, z, dz));
    if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
    if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
    alpha = std::min(0.98 * alpha, 1.0);
#ifdef UAVCF_IPM_TRACE
    std::fprintf(stderr, " aff=%8.2e sig=%8.2e a=%8.2e\n", alpha_aff, sigma, alpha);
#endif
    if (!std::isfinite(alpha) || alpha <= 1e-9) break;

    x += alpha * dx;
    if (p > 0) y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    if (tau <= 0.0 || kappa < 0.0) break;
  }

  result.status = SolveStatus::NumericalFailure;
  result.x = best_x.size() ? best_x : VectorXd::Zero(n);
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

void SocpProblem::validate() const {
  if (n_vars < 0) throw std::invalid_argument("SocpProblem: negative variable count");
  if (objective.size() != n_vars) {
    throw std::invalid_argument("SocpProblem: objective size != n_vars");
  }
  if (!bounds.empty() && static_cast<int>(bounds.size()) != n_vars) {
    throw std::invalid_argument("SocpProblem: bounds size != n_vars");
  }
  for (const auto& cone : cones) {
    if (cone.c.size() != n_vars || (cone.A.size() > 0 && cone.A.cols() != n_vars) ||
        cone.b.size() != cone.A.rows()) {
      throw std::invalid_argument("SocpProblem: inconsistent cone dimensions");
    }
  }
  for (const auto& lin : linears) {
    if (lin.row.size() != n_vars) {
      throw std::invalid_argument("SocpProblem: inconsistent linear row size");
    }
  }
  for (const int b : binary_indices) {
    if (b < 0 || b >= n_vars) throw std::invalid_argument("SocpProblem: binary index out of range");
    if (!bounds.empty() && (bounds[b].lo < -1e-12 || bounds[b].hi > 1.0 + 1e-12)) {
      throw std::invalid_argument("SocpProblem: binary variable bounds must stay within [0, 1]");
    }
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace detail {

SocpSolution solve_with_fixed(const SocpProblem& problem, const VectorXd& fixed_in,
                              const SocpSettings& settings) {
  // Variables pinned by equal bounds are substituted out; the interior-point
  // method needs a strictly feasible slack for every inequality it keeps.
  VectorXd fixed = fixed_in;
  if (!problem.bounds.empty()) {
    for (int i = 0; i < problem.n_vars; ++i) {
      if (is_free(fixed[i]) && problem.bounds[i].lo == problem.bounds[i].hi) {
        fixed[i] = problem.bounds[i].lo;
      }
    }
  }
  Standardized std_form = standardize(problem, fixed);
  SocpSolution sol;
  if (std_form.trivial.has_value()) {
    sol.status = *std_form.trivial;
    sol.x = VectorXd::Zero(problem.n_vars);
    for (int i = 0; i < problem.n_vars; ++i) {
      if (!is_free(fixed[i])) sol.x[i] = fixed[i];
    }
    if (sol.status == SolveStatus::Optimal) {
      sol.objective = problem.objective.dot(sol.x) + problem.objective_constant;
    }
    return sol;
  }
  if (std_form.form.n() == 0) {
    // Everything fixed; feasibility was established by standardize.
    sol.status = SolveStatus::Optimal;
    sol.x = fixed;
    sol.objective = std_form.objective_constant;
    return sol;
  }

  IpmResult ipm = run_ipm(std_form.form, settings);
  sol.status = ipm.status;
  sol.iterations = ipm.iterations;
  sol.gap = ipm.gap;
  sol.x = VectorXd::Zero(problem.n_vars);
  for (int i = 0; i < problem.n_vars; ++i) {
    if (!is_free(fixed[i])) sol.x[i] = fixed[i];
  }
  for (std::size_t j = 0; j < std_form.free_index.size(); ++j) {
    sol.x[std_form.free_index[j]] = ipm.x[static_cast<int>(j)];
  }
  if (sol.status == SolveStatus::Optimal) {
    sol.objective = problem.objective.dot(sol.x) + problem.objective_constant;
  }
  return sol;
}

}  // namespace detail

SocpSolution solve_socp(const SocpProblem& problem, const SocpSettings& settings) {
  problem.validate();
  if (!problem.binary_indices.empty()) {
    throw std::invalid_argument("solve_socp: binary variables present, use solve_mbsocp");
  }
  const VectorXd all_free =
      VectorXd::Constant(problem.n_vars, std::numeric_limits<double>::quiet_NaN());
  return detail::solve_with_fixed(problem, all_free, settings);
}

}  // namespace uavcf
