// linalg.cpp

#include "qcpo/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcpo::linalg {

BipartiteOperator::BipartiteOperator(Index da, Index db, Matrix m)
    : dim_a(da), dim_b(db), mat(std::move(m)) {
  if (da <= 0 || db <= 0) {
    throw std::invalid_argument("BipartiteOperator: factor dimensions must be positive");
  }
  if (mat.rows() != da * db || mat.cols() != da * db) {
    std::ostringstream os;
    os << "BipartiteOperator: matrix is " << mat.rows() << "x" << mat.cols()
       << ", expected " << da * db << "x" << da * db;
    throw std::invalid_argument(os.str());
  }
}

double hermiticity_defect(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("hermiticity_defect: matrix not square");
  }
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return hermiticity_defect(a) <= tol * scale;
}

Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out = Eigen::kroneckerProduct(a, b);
  return out;
}

BipartiteOperator kron_op(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw std::invalid_argument("kron_op: factors must be square");
  }
  return BipartiteOperator(a.rows(), b.rows(), kron(a, b));
}

Matrix partial_trace(const BipartiteOperator& x, Slot slot) {
  const Index da = x.dim_a, db = x.dim_b;
  if (slot == Slot::B) {
    Matrix out = Matrix::Zero(da, da);
    for (Index i = 0; i < da; ++i) {
      for (Index j = 0; j < da; ++j) {
        Complex sum = 0.0;
        for (Index k = 0; k < db; ++k) sum += x.mat(i * db + k, j * db + k);
        out(i, j) = sum;
      }
    }
    return out;
  }
  Matrix out = Matrix::Zero(db, db);
  for (Index i = 0; i < db; ++i) {
    for (Index j = 0; j < db; ++j) {
      Complex sum = 0.0;
      for (Index k = 0; k < da; ++k) sum += x.mat(k * db + i, k * db + j);
      out(i, j) = sum;
    }
  }
  return out;
}

BipartiteOperator partial_transpose(const BipartiteOperator& x, Slot slot) {
  const Index da = x.dim_a, db = x.dim_b;
  Matrix out(da * db, da * db);
  for (Index i = 0; i < da; ++i) {
    for (Index k = 0; k < db; ++k) {
      for (Index j = 0; j < da; ++j) {
        for (Index l = 0; l < db; ++l) {
          if (slot == Slot::B) {
            out(i * db + l, j * db + k) = x.mat(i * db + k, j * db + l);
          } else {
            out(j * db + k, i * db + l) = x.mat(i * db + k, j * db + l);
          }
        }
      }
    }
  }
  return BipartiteOperator(da, db, std::move(out));
}

EigResult eig_hermitian(const Matrix& h, double herm_tol) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("eig_hermitian: matrix not square");
  }
  const double defect = hermiticity_defect(h);
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  if (defect > herm_tol * scale) {
    std::ostringstream os;
    os << "eig_hermitian: input not Hermitian, max deviation " << defect;
    throw std::invalid_argument(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(h));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  }
  return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

PsdStatus psd_status(const Matrix& h, double tol) {
  EigResult eig = eig_hermitian(h);
  PsdStatus st;
  st.min_eigenvalue = eig.values(0);
  st.witness = eig.vectors.col(0);
  st.is_psd = st.min_eigenvalue >= -tol;
  return st;
}

PsdStatus psd_status(const BipartiteOperator& x, double tol) {
  return psd_status(x.mat, tol);
}

Matrix sqrt_psd(const Matrix& h) {
  EigResult eig = eig_hermitian(h);
  const double scale = std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
  const double clip = kEigClipRel * (1.0 + scale);
  RealVector roots(eig.values.size());
  for (Index i = 0; i < eig.values.size(); ++i) {
    double v = eig.values(i);
    if (v < -clip) {
      std::ostringstream os;
      os << "sqrt_psd: input not PSD, eigenvalue " << v << " below -" << clip;
      throw std::invalid_argument(os.str());
    }
    roots(i) = std::sqrt(std::max(v, 0.0));
  }
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

Matrix inv_sqrt_pd(const Matrix& h) {
  EigResult eig = eig_hermitian(h);
  const double scale = std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
  const double floor = kEigClipRel * (1.0 + scale);
  if (eig.values(0) <= floor) {
    std::ostringstream os;
    os << "inv_sqrt_pd: input not strictly positive definite, min eigenvalue "
       << eig.values(0);
    throw std::invalid_argument(os.str());
  }
  RealVector inv_roots(eig.values.size());
  for (Index i = 0; i < eig.values.size(); ++i) {
    inv_roots(i) = 1.0 / std::sqrt(eig.values(i));
  }
  return eig.vectors * inv_roots.asDiagonal() * eig.vectors.adjoint();
}

Matrix transpose_map(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("transpose_map: matrix not square");
  }
  return a.transpose();
}

Matrix matrix_unit(Index n, Index i, Index j) {
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw std::out_of_range("matrix_unit: index out of range");
  }
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

OperatorBasis::OperatorBasis(Index n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("OperatorBasis: dimension must be positive");
}

Matrix OperatorBasis::unit(Index i, Index j) const { return matrix_unit(n_, i, j); }

Matrix OperatorBasis::sym(Index i, Index j) const {
  if (!(0 <= i && i < j && j < n_)) {
    throw std::out_of_range("OperatorBasis::sym: requires 0 <= i < j < n");
  }
  return (matrix_unit(n_, i, j) + matrix_unit(n_, j, i)) / std::sqrt(2.0);
}

Matrix OperatorBasis::antisym(Index i, Index j) const {
  if (!(0 <= i && i < j && j < n_)) {
    throw std::out_of_range("OperatorBasis::antisym: requires 0 <= i < j < n");
  }
  return Complex(0.0, -1.0) * (matrix_unit(n_, i, j) - matrix_unit(n_, j, i)) / std::sqrt(2.0);
}

Matrix OperatorBasis::diag_traceless(Index k) const {
  if (k < 0 || k >= n_ - 1) {
    throw std::out_of_range("OperatorBasis::diag_traceless: requires 0 <= k < n-1");
  }
  // Generalized Gell-Mann diagonal convention:
  //   h_k = (e_00 + ... + e_kk - (k+1) e_{k+1,k+1}) / sqrt((k+1)(k+2))
  Matrix m = Matrix::Zero(n_, n_);
  for (Index i = 0; i <= k; ++i) m(i, i) = 1.0;
  m(k + 1, k + 1) = static_cast<double>(-(k + 1));
  return m / std::sqrt(static_cast<double>((k + 1) * (k + 2)));
}

std::vector<Matrix> OperatorBasis::matrix_units() const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n_ * n_));
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < n_; ++j) out.push_back(unit(i, j));
  }
  return out;
}

std::vector<Matrix> OperatorBasis::hermitian_units() const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n_ * n_));
  for (Index i = 0; i < n_; ++i) out.push_back(unit(i, i));
  for (Index i = 0; i < n_; ++i) {
    for (Index j = i + 1; j < n_; ++j) {
      out.push_back(sym(i, j));
      out.push_back(antisym(i, j));
    }
  }
  return out;
}

}  // namespace qcpo::linalg
