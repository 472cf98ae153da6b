// classify.cpp

#include "qcpo/classify.hpp"

#include "qcpo/compound.hpp"
#include "qcpo/parallel.hpp"
#include "qcpo/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcpo::classify {

using channels::ChoiMatrix;
using channels::MapDescriptor;
using linalg::BipartiteOperator;
using linalg::Slot;

namespace {

Verdict verdict_from_psd(const linalg::PsdStatus& status) {
  Verdict v;
  v.value = status.is_psd;
  v.min_eigenvalue = status.min_eigenvalue;
  v.witness = status.witness;
  return v;
}

// PSD test of a small real symmetric condition matrix inside a closed-form
// checker; 1e-12 relative floor absorbs eigensolver noise at exact-zero
// boundary instances.
bool symmetric_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const double floor = 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
  return solver.eigenvalues()(0) >= -floor;
}

}  // namespace

Verdict is_cp(const MapDescriptor& phi, double tol) {
  return verdict_from_psd(linalg::psd_status(phi.choi().op.mat, tol));
}

Verdict is_ccp(const MapDescriptor& phi, double tol) {
  const BipartiteOperator pt = linalg::partial_transpose(phi.choi().op, Slot::B);
  return verdict_from_psd(linalg::psd_status(pt.mat, tol));
}

Verdict ppt_status(const BipartiteOperator& omega, double tol) {
  linalg::PsdStatus base = linalg::psd_status(omega.mat, tol);
  if (!base.is_psd) {
    std::ostringstream os;
    os << "ppt_status: input not PSD, min eigenvalue " << base.min_eigenvalue;
    throw std::invalid_argument(os.str());
  }
  return verdict_from_psd(linalg::psd_status(linalg::partial_transpose(omega, Slot::B).mat, tol));
}

DiagFamilyParams::DiagFamilyParams(Index dim, Eigen::MatrixXd table, double shift)
    : n(dim), c(std::move(table)), mu(shift) {
  if (n <= 0) throw std::invalid_argument("DiagFamilyParams: dimension must be positive");
  if (c.rows() != n || c.cols() != n) {
    throw std::invalid_argument("DiagFamilyParams: coefficient table must be n x n");
  }
}

DiagFamilyParams DiagFamilyParams::uniform(Index n, double value, double mu) {
  return DiagFamilyParams(n, Eigen::MatrixXd::Constant(n, n, value), mu);
}

DiagFamilyParams DiagFamilyParams::split(Index n, double diag, double offdiag, double mu) {
  Eigen::MatrixXd table = Eigen::MatrixXd::Constant(n, n, offdiag);
  table.diagonal().setConstant(diag);
  return DiagFamilyParams(n, std::move(table), mu);
}

bool cp_closed_form(const DiagFamilyParams& p) {
  for (Index i = 0; i < p.n; ++i)
    for (Index j = 0; j < p.n; ++j)
      if (i != j && p.c(i, j) < 0.0) return false;
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Constant(p.n, p.n, p.mu);
  coupling.diagonal() += p.c.diagonal();
  return symmetric_psd(coupling);
}

bool ccp_inequalities(const DiagFamilyParams& p) {
  for (Index i = 0; i < p.n; ++i) {
    if (p.c(i, i) + p.mu < 0.0) return false;
  }
  for (Index i = 0; i < p.n; ++i) {
    for (Index j = i + 1; j < p.n; ++j) {
      const double sum = p.c(i, j) + p.c(j, i);
      if (sum < 2.0 * p.mu) return false;
      if (sum < -2.0 * p.mu) return false;
      if (p.c(i, j) * p.c(j, i) < p.mu * p.mu) return false;
    }
  }
  return true;
}

bool ccp_pair_blocks(const DiagFamilyParams& p) {
  for (Index i = 0; i < p.n; ++i) {
    if (p.c(i, i) + p.mu < 0.0) return false;
  }
  for (Index k = 0; k < p.n; ++k) {
    for (Index l = k + 1; l < p.n; ++l) {
      // 2x2 Hermitian pair block; PSD iff both diagonal entries and the
      // determinant are nonnegative
      const double s = 0.5 * (p.c(k, l) + p.c(l, k));
      const double d = 0.5 * (p.c(k, l) - p.c(l, k));
      if (s + p.mu < 0.0) return false;
      if (s - p.mu < 0.0) return false;
      if (s * s - p.mu * p.mu - d * d < 0.0) return false;
    }
  }
  return true;
}

bool ccp_closed_form(const DiagFamilyParams& p) {
  const bool via_inequalities = ccp_inequalities(p);
  const bool via_blocks = ccp_pair_blocks(p);
  if (via_inequalities != via_blocks) {
    std::ostringstream os;
    os << "ccp_closed_form: inequality and pair-block routes disagree ("
       << via_inequalities << " vs " << via_blocks << ")";
    throw std::logic_error(os.str());
  }
  return via_inequalities;
}

bool cp_and_ccp_closed_form(const DiagFamilyParams& p) {
  for (Index i = 0; i < p.n; ++i) {
    for (Index j = 0; j < p.n; ++j) {
      if (i == j) continue;
      if (!(p.c(i, j) > 0.0)) return false;
      if (p.c(i, j) * p.c(j, i) < p.mu * p.mu) return false;
    }
  }
  for (Index i = 0; i < p.n; ++i) {
    if (p.c(i, i) + p.mu < 0.0) return false;
  }
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Constant(p.n, p.n, p.mu);
  coupling.diagonal() += p.c.diagonal();
  return symmetric_psd(coupling);
}

bool kpos_window(Index n, int k, double c, double offdiag_ratio) {
  if (n < 2 || k < 1 || k >= n) {
    std::ostringstream os;
    os << "kpos_window: rank " << k << " outside the family for dimension " << n;
    throw std::invalid_argument(os.str());
  }
  if (!(static_cast<double>(k) <= c && c < static_cast<double>(k + 1) && k + 1 < n)) {
    return false;
  }
  const double lower = static_cast<double>(k) / static_cast<double>(n - k);
  const double upper = static_cast<double>(k + 1) / static_cast<double>(n - k - 1);
  return offdiag_ratio >= lower && offdiag_ratio < upper;
}

namespace {

// One see-saw descent from a random start. ψ is tracked through its n x n
// reshape M(p,b) = ψ(p n + b); each half-step fixes the orthonormal factor
// family on one side (from the SVD of M) and solves the smallest-eigenvector
// problem for the other side.
struct SeesawState {
  Vector psi;
  double value = 0.0;
};

Matrix reshape_to_matrix(const Vector& psi, Index n) {
  Matrix m(n, n);
  for (Index p = 0; p < n; ++p)
    for (Index b = 0; b < n; ++b) m(p, b) = psi(p * n + b);
  return m;
}

double rayleigh(const Matrix& c, const Vector& psi) {
  return std::real(Complex(psi.adjoint() * c * psi));
}

// left family fixed: rows of the reduced problem are (r, b) pairs
Vector solve_right_step(const Matrix& c, const Matrix& u, Index n, int k) {
  Matrix reduced = Matrix::Zero(k * n, k * n);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s)
      for (Index b = 0; b < n; ++b)
        for (Index d = 0; d < n; ++d) {
          Complex sum = 0.0;
          for (Index p = 0; p < n; ++p)
            for (Index q = 0; q < n; ++q)
              sum += std::conj(u(p, r)) * c(p * n + b, q * n + d) * u(q, s);
          reduced(r * n + b, s * n + d) = sum;
        }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (reduced + reduced.adjoint()));
  const Vector w = solver.eigenvectors().col(0);
  Vector psi = Vector::Zero(n * n);
  for (int r = 0; r < k; ++r)
    for (Index p = 0; p < n; ++p)
      for (Index b = 0; b < n; ++b) psi(p * n + b) += u(p, r) * w(r * n + b);
  return psi;
}

// right family fixed: rows of the reduced problem are (r, p) pairs
Vector solve_left_step(const Matrix& c, const Matrix& v, Index n, int k) {
  Matrix reduced = Matrix::Zero(k * n, k * n);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s)
      for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q) {
          Complex sum = 0.0;
          for (Index b = 0; b < n; ++b)
            for (Index d = 0; d < n; ++d)
              sum += std::conj(v(b, r)) * c(p * n + b, q * n + d) * v(d, s);
          reduced(r * n + p, s * n + q) = sum;
        }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (reduced + reduced.adjoint()));
  const Vector w = solver.eigenvectors().col(0);
  Vector psi = Vector::Zero(n * n);
  for (int r = 0; r < k; ++r)
    for (Index p = 0; p < n; ++p)
      for (Index b = 0; b < n; ++b) psi(p * n + b) += w(r * n + p) * v(b, r);
  return psi;
}

SeesawState seesaw_descent(const Matrix& c, Index n, int k, std::uint64_t seed) {
  rng::Generator gen(seed);
  // random orthonormal right family
  Matrix start = rng::random_matrix(gen, n, k);
  Eigen::HouseholderQR<Matrix> qr(start);
  Matrix v = qr.householderQ() * Matrix::Identity(n, k);

  SeesawState state;
  state.psi = solve_left_step(c, v, n, k);
  state.value = rayleigh(c, state.psi);

  constexpr int kMaxIter = 80;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const double previous = state.value;
    Eigen::JacobiSVD<Matrix> svd(reshape_to_matrix(state.psi, n),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix u = svd.matrixU().leftCols(k);
    state.psi = solve_right_step(c, u, n, k);

    Eigen::JacobiSVD<Matrix> svd2(reshape_to_matrix(state.psi, n),
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix vnew = svd2.matrixV().conjugate().leftCols(k);
    state.psi = solve_left_step(c, vnew, n, k);
    state.value = rayleigh(c, state.psi);
    if (previous - state.value <= 1e-13 * (1.0 + std::abs(state.value))) break;
  }
  state.psi.normalize();
  state.value = rayleigh(c, state.psi);
  return state;
}

}  // namespace

FalsifierResult schmidt_falsifier(const ChoiMatrix& choi, int schmidt_rank, int restarts,
                                  std::uint64_t seed) {
  const Index n = choi.dim;
  if (schmidt_rank < 1 || schmidt_rank > n) {
    throw std::invalid_argument("schmidt_falsifier: rank must lie in [1, n]");
  }
  if (restarts < 1) {
    throw std::invalid_argument("schmidt_falsifier: need at least one restart");
  }
  const Matrix& c = choi.op.mat;

  if (schmidt_rank == static_cast<int>(n)) {
    // unconstrained: the global smallest eigenpair
    linalg::EigResult eig = linalg::eig_hermitian(c);
    FalsifierResult out;
    out.min_value = eig.values(0);
    out.witness = eig.vectors.col(0);
    out.best_restart = 0;
    return out;
  }

  std::vector<SeesawState> runs(static_cast<std::size_t>(restarts));
  par::parallel_for(runs.size(), [&](std::size_t r) {
    const std::uint64_t restart_seed = rng::Generator::derive_seed(seed, r);
    runs[r] = seesaw_descent(c, n, schmidt_rank, restart_seed);
  });

  FalsifierResult out;
  out.min_value = runs[0].value;
  out.witness = runs[0].psi;
  out.best_restart = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].value < out.min_value) {
      out.min_value = runs[r].value;
      out.witness = runs[r].psi;
      out.best_restart = static_cast<int>(r);
    }
  }
  return out;
}

KposScan kpos_scan(const ChoiMatrix& choi, int restarts, std::uint64_t seed, double tol) {
  KposScan scan;
  scan.method = "falsifier";
  const Index n = choi.dim;
  scan.k_positive_up_to = 0;
  bool still_positive = true;
  for (int k = 1; k <= static_cast<int>(n); ++k) {
    FalsifierResult result = schmidt_falsifier(choi, k, restarts, seed);
    scan.min_values.push_back(result.min_value);
    if (still_positive && result.min_value >= -tol) {
      scan.k_positive_up_to = k;
    } else {
      still_positive = false;
    }
  }
  return scan;
}

ClassificationReport classify_state(const BipartiteOperator& omega, double tol) {
  ClassificationReport report;
  report.kind = "state";
  report.dim_a = omega.dim_a;
  report.dim_b = omega.dim_b;
  linalg::PsdStatus base = linalg::psd_status(omega.mat, tol);
  report.min_eig = base.min_eigenvalue;
  report.is_psd = base.is_psd;
  if (!base.is_psd) {
    std::ostringstream os;
    os << "classify_state: input not PSD, min eigenvalue " << base.min_eigenvalue;
    throw std::invalid_argument(os.str());
  }
  Verdict ppt = verdict_from_psd(
      linalg::psd_status(linalg::partial_transpose(omega, Slot::B).mat, tol));
  report.pt_min_eig = ppt.min_eigenvalue;
  report.is_ppt_state = ppt.value;
  report.is_npt_state = !ppt.value;
  if (!ppt.value) report.witness = ppt.witness;
  return report;
}

ClassificationReport classify_qcpo(const BipartiteOperator& pi, double tol) {
  ClassificationReport report;
  report.kind = "qcpo";
  report.dim_a = pi.dim_a;
  report.dim_b = pi.dim_b;
  compound::QcpoReport validation = compound::validate_qcpo(pi, tol);
  report.min_eig = validation.min_eigenvalue;
  report.is_psd = validation.positive;
  report.marginal_deviation = validation.marginal_deviation;
  report.is_qcpo = validation.ok();
  if (!validation.positive) report.witness = validation.witness;

  linalg::PsdStatus pt = linalg::psd_status(linalg::partial_transpose(pi, Slot::B).mat, tol);
  report.pt_min_eig = pt.min_eigenvalue;
  report.cp = validation.positive;   // the operator is the block form of its map
  report.ccp = pt.is_psd;
  report.unital = validation.marginal_ok;
  return report;
}

ClassificationReport classify_choi(const ChoiMatrix& choi, double tol, bool with_kpos,
                                   int restarts, std::uint64_t seed) {
  ClassificationReport report;
  report.kind = "choi";
  report.dim_a = choi.op.dim_a;
  report.dim_b = choi.op.dim_b;
  MapDescriptor phi = MapDescriptor::from_choi(choi);
  Verdict cp = is_cp(phi, tol);
  Verdict ccp_v = is_ccp(phi, tol);
  report.min_eig = cp.min_eigenvalue;
  report.is_psd = cp.value;
  report.pt_min_eig = ccp_v.min_eigenvalue;
  report.cp = cp.value;
  report.ccp = ccp_v.value;
  report.unital = phi.is_unital(std::max(tol, 1e-10));
  report.trace_preserving = phi.is_trace_preserving(std::max(tol, 1e-10));
  if (!cp.value) {
    report.witness = cp.witness;
  } else if (!ccp_v.value) {
    report.witness = ccp_v.witness;
  }
  if (with_kpos) report.kpos = kpos_scan(choi, restarts, seed, tol);
  return report;
}

ClassificationReport classify_matrix(const Matrix& m, double tol) {
  ClassificationReport report;
  report.kind = "matrix";
  report.dim_a = m.rows();
  report.dim_b = m.cols();
  if (m.rows() == m.cols() && linalg::is_hermitian(m, 1e-10)) {
    linalg::PsdStatus status = linalg::psd_status(m, tol);
    report.min_eig = status.min_eigenvalue;
    report.is_psd = status.is_psd;
    if (!status.is_psd) report.witness = status.witness;
  }
  return report;
}

}  // namespace qcpo::classify
