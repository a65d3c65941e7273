#include <Eigen/Eigenvalues>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uavcf/socp.hpp"

namespace uavcf {

namespace {

template <typename Matrix>
Matrix psd_sqrt_impl(const Matrix& c) {
  const double herm_err = (c - c.adjoint()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if (herm_err > 1e-10 * scale) {
    throw std::invalid_argument("psd_sqrt: matrix is not Hermitian");
  }
  const Matrix sym = 0.5 * (c + c.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  VectorXd ev = eig.eigenvalues();
  const double trace = std::max(0.0, ev.sum());
  const double floor = -1e-8 * std::max(trace, 0.0);
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < floor) {
      throw std::invalid_argument("psd_sqrt: matrix is significantly indefinite");
    }
    if (ev[i] < 0.0) ev[i] = 0.0;
  }
  return eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

MatrixXcd psd_sqrt(const MatrixXcd& c) { return psd_sqrt_impl(c); }
MatrixXd psd_sqrt(const MatrixXd& c) { return psd_sqrt_impl(c); }

// ---------------------------------------------------------------------------
// Plain-text problem format, one token stream:
//
//   socp-problem v1
//   nvars N
//   objective_constant X
//   objective v0 .. v{N-1}
//   bounds B            then B lines: index lo hi
//   binaries K          then K indices on one line (omitted when K = 0)
//   implication b M j0 .. j{M-1}       (zero or more lines)
//   linear S            then per constraint: sense(le|eq) rhs v0 .. v{N-1}
//   cones C             then per cone: rows R, d, c row, R lines "b_i a_i0 .. a_i{N-1}"
//
// Infinities are written as inf/-inf. Exact round trip via %.17g.
// ---------------------------------------------------------------------------

namespace {

void write_vector(std::ostream& os, const VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    os << (i ? " " : "") << buf;
  }
  os << "\n";
}

// Stream extraction of doubles rejects "inf"; route through strtod instead.
double read_double(std::istream& is) {
  std::string token;
  if (!(is >> token)) throw std::runtime_error("socp problem parse error: number");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str()) throw std::runtime_error("socp problem parse error: number");
  return v;
}

VectorXd read_vector(std::istream& is, int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = read_double(is);
  return v;
}

}  // namespace

std::string problem_to_text(const SocpProblem& prob) {
  std::ostringstream os;
  os << "socp-problem v1\n";
  os << "nvars " << prob.n_vars << "\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", prob.objective_constant);
  os << "objective_constant " << buf << "\n";
  os << "objective ";
  write_vector(os, prob.objective);
  os << "bounds " << prob.bounds.size() << "\n";
  for (std::size_t i = 0; i < prob.bounds.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", prob.bounds[i].lo);
    os << i << " " << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", prob.bounds[i].hi);
    os << " " << buf << "\n";
  }
  os << "binaries " << prob.binary_indices.size() << "\n";
  if (!prob.binary_indices.empty()) {
    for (std::size_t i = 0; i < prob.binary_indices.size(); ++i) {
      os << (i ? " " : "") << prob.binary_indices[i];
    }
    os << "\n";
  }
  for (const auto& imp : prob.implications) {
    os << "implication " << imp.binary_index << " " << imp.zero_when_off.size();
    for (const int j : imp.zero_when_off) os << " " << j;
    os << "\n";
  }
  os << "linear " << prob.linears.size() << "\n";
  for (const auto& lin : prob.linears) {
    std::snprintf(buf, sizeof(buf), "%.17g", lin.rhs);
    os << (lin.sense == Sense::Equal ? "eq " : "le ") << buf << " ";
    write_vector(os, lin.row);
  }
  os << "cones " << prob.cones.size() << "\n";
  for (const auto& cone : prob.cones) {
    std::snprintf(buf, sizeof(buf), "%.17g", cone.d);
    os << "cone " << cone.A.rows() << " " << buf << "\n";
    write_vector(os, cone.c);
    for (int r = 0; r < cone.A.rows(); ++r) {
      std::snprintf(buf, sizeof(buf), "%.17g", cone.b[r]);
      os << buf << " ";
      write_vector(os, VectorXd(cone.A.row(r)));
    }
  }
  return os.str();
}

SocpProblem problem_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string token, version;
  is >> token >> version;
  if (token != "socp-problem" || version != "v1") {
    throw std::runtime_error("socp problem parse error: bad header");
  }
  SocpProblem prob;
  auto expect = [&](const char* key) {
    is >> token;
    if (token != key) throw std::runtime_error(std::string("socp problem parse error: expected ") + key);
  };
  expect("nvars");
  is >> prob.n_vars;
  expect("objective_constant");
  prob.objective_constant = read_double(is);
  expect("objective");
  prob.objective = read_vector(is, prob.n_vars);
  expect("bounds");
  std::size_t nb = 0;
  is >> nb;
  prob.bounds.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    std::size_t idx;
    is >> idx;
    prob.bounds[idx].lo = read_double(is);
    prob.bounds[idx].hi = read_double(is);
  }
  expect("binaries");
  std::size_t nbin = 0;
  is >> nbin;
  prob.binary_indices.resize(nbin);
  for (std::size_t i = 0; i < nbin; ++i) is >> prob.binary_indices[i];
  while (is >> token && token == "implication") {
    BinaryImplication imp;
    std::size_t cnt = 0;
    is >> imp.binary_index >> cnt;
    imp.zero_when_off.resize(cnt);
    for (std::size_t i = 0; i < cnt; ++i) is >> imp.zero_when_off[i];
    prob.implications.push_back(std::move(imp));
  }
  if (token != "linear") throw std::runtime_error("socp problem parse error: expected linear");
  std::size_t nlin = 0;
  is >> nlin;
  prob.linears.resize(nlin);
  for (auto& lin : prob.linears) {
    is >> token;
    lin.sense = (token == "eq") ? Sense::Equal : Sense::LessEqual;
    lin.rhs = read_double(is);
    lin.row = read_vector(is, prob.n_vars);
  }
  expect("cones");
  std::size_t ncones = 0;
  is >> ncones;
  prob.cones.resize(ncones);
  for (auto& cone : prob.cones) {
    expect("cone");
    int rows = 0;
    is >> rows;
    cone.d = read_double(is);
    cone.c = read_vector(is, prob.n_vars);
    cone.A.resize(rows, prob.n_vars);
    cone.b.resize(rows);
    for (int r = 0; r < rows; ++r) {
      cone.b[r] = read_double(is);
      cone.A.row(r) = read_vector(is, prob.n_vars).transpose();
    }
  }
  return prob;
}

void save_problem(const SocpProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_problem: cannot open " + path);
  out << problem_to_text(problem);
}

SocpProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_problem: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_text(ss.str());
}

}  // namespace uavcf
