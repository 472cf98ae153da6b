// linalg.hpp — dense complex linear algebra kernel: tensor products, partial
// trace/transpose, Hermitian eigendecomposition, PSD arithmetic, operator bases.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace qcpo {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

// Default tolerances, absolute on unit-normalized operators. Every entry
// point that tests positivity or marginals accepts an override.
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kEigClipRel = 1e-10;      // clip band for sqrt of marginal PSD input
inline constexpr double kDegeneracyTol = 1e-8;    // relative gap for spectral clustering

namespace linalg {

// Which factor of the two-slot tensor space an operation acts on. Slot A is
// the first factor and varies slowest: basis vector i*dim_b + j is e_i (x) e_j.
enum class Slot { A, B };

// Operator on a two-factor tensor space with recorded factor dimensions.
struct BipartiteOperator {
  Index dim_a = 0;
  Index dim_b = 0;
  Matrix mat;  // square, (dim_a*dim_b) x (dim_a*dim_b)

  BipartiteOperator() = default;
  BipartiteOperator(Index da, Index db, Matrix m);

  Index total_dim() const { return dim_a * dim_b; }
};

double hermiticity_defect(const Matrix& a);               // max |A - A†| entrywise
bool is_hermitian(const Matrix& a, double tol = kHermTol);
Matrix hermitize(const Matrix& a);                        // (A + A†)/2

Matrix kron(const Matrix& a, const Matrix& b);
BipartiteOperator kron_op(const Matrix& a, const Matrix& b);

Matrix partial_trace(const BipartiteOperator& x, Slot slot);
BipartiteOperator partial_transpose(const BipartiteOperator& x, Slot slot);

// Eigenvalues ascending, eigenvectors orthonormal in columns.
struct EigResult {
  RealVector values;
  Matrix vectors;
};
EigResult eig_hermitian(const Matrix& h, double herm_tol = kHermTol);

struct PsdStatus {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  Vector witness;  // eigenvector achieving the minimum
};
PsdStatus psd_status(const Matrix& h, double tol = kPsdTol);
PsdStatus psd_status(const BipartiteOperator& x, double tol = kPsdTol);

Matrix sqrt_psd(const Matrix& h);        // eigenvalues in (-clip, 0) treated as 0
Matrix inv_sqrt_pd(const Matrix& h);     // rejects singular or near-singular input

// Entrywise transpose in the fixed computational basis, as a map on M_n.
Matrix transpose_map(const Matrix& a);

// Trace-orthonormal operator families on M_n (0-based indices):
//   unit(i,j)           e_i (e_j, .)
//   sym(i,j), i < j     (e_ij + e_ji)/sqrt(2)
//   antisym(i,j), i < j -i (e_ij - e_ji)/sqrt(2)
//   diag_traceless(k)   traceless diagonal units, k = 0..n-2, orthogonal to
//                       every sym/antisym unit and to each other
class OperatorBasis {
 public:
  explicit OperatorBasis(Index n);

  Index dim() const { return n_; }
  Matrix unit(Index i, Index j) const;
  Matrix sym(Index i, Index j) const;
  Matrix antisym(Index i, Index j) const;
  Matrix diag_traceless(Index k) const;

  std::vector<Matrix> matrix_units() const;     // all e_ij, row-major order
  std::vector<Matrix> hermitian_units() const;  // {e_ii} + {sym} + {antisym}, n^2 elements

 private:
  Index n_;
};

Matrix matrix_unit(Index n, Index i, Index j);

}  // namespace linalg
}  // namespace qcpo
