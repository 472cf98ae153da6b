// families.cpp

#include "qcpo/families.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qcpo::families {

using channels::ChoiMatrix;
using channels::KrausChannel;
using channels::KrausTerm;
using channels::MapDescriptor;
using classify::DiagFamilyParams;
using compound::CompoundState;
using compound::Qcpo;
using linalg::BipartiteOperator;
using linalg::matrix_unit;
using linalg::OperatorBasis;

namespace {

Matrix unit_pair_sum(Index n) {
  Matrix m = Matrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      m += linalg::kron(matrix_unit(n, i, j), matrix_unit(n, i, j));
  return m;
}

}  // namespace

BipartiteOperator isotropic_qcpo(const IsotropicParams& p) {
  if (p.n < 2) throw std::invalid_argument("isotropic_qcpo: dimension must be at least 2");
  const Index n = p.n;
  Matrix m = ((1.0 - p.lambda) / static_cast<double>(n)) * Matrix::Identity(n * n, n * n) +
             p.lambda * unit_pair_sum(n);
  return BipartiteOperator(n, n, std::move(m));
}

MapDescriptor isotropic_map(const IsotropicParams& p, const MapDescriptor& psi) {
  if (psi.dim() != p.n) {
    throw std::invalid_argument("isotropic_map: reference map dimension mismatch");
  }
  if (!psi.is_unital(1e-10)) {
    std::ostringstream os;
    os << "isotropic_map: reference map not unital, ‖ψ(I) − I‖ = " << psi.unital_defect();
    throw std::invalid_argument(os.str());
  }
  const Index n = p.n;
  const double lambda = p.lambda;
  return MapDescriptor::from_action(n, [n, lambda, &psi](const Matrix& a) -> Matrix {
    return ((1.0 - lambda) / static_cast<double>(n)) * a.trace() * Matrix::Identity(n, n) +
           lambda * psi.apply(a);
  });
}

MapDescriptor isotropic_map(const IsotropicParams& p) {
  return isotropic_map(p, MapDescriptor::identity(p.n));
}

HorodeckiParams::HorodeckiParams(Index dim, double gsq) : n(dim), gamma_sq(gsq) {
  if (n < 3) throw std::invalid_argument("HorodeckiParams: dimension must be at least 3");
  if (!(gamma_sq > 0.0)) throw std::invalid_argument("HorodeckiParams: γ² must be positive");
  if (!(normalization() > 0.0)) {
    throw std::invalid_argument("HorodeckiParams: normalization not positive");
  }
}

double HorodeckiParams::normalization() const {
  return static_cast<double>(n * n) + (1.0 - 1.0 / gamma_sq) * (gamma_sq - 1.0);
}

Matrix HorodeckiParams::block(Index i, Index j) const {
  if (i != j) return static_cast<double>(n) * matrix_unit(n, i, j);
  // cyclic successor/predecessor pair, indices reduced mod n
  const Index up = (i + 1) % n;
  const Index down = (i + n - 1) % n;
  const double weight = 1.0 - 1.0 / gamma_sq;
  return weight * (gamma_sq * matrix_unit(n, up, up) - matrix_unit(n, down, down));
}

BipartiteOperator horodecki_qcpo(const HorodeckiParams& p) {
  const Index n = p.n;
  Matrix m = static_cast<double>(n) * Matrix::Identity(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      m += linalg::kron(p.block(i, j), matrix_unit(n, i, j));
  m /= p.normalization();
  return BipartiteOperator(n, n, std::move(m));
}

MapDescriptor horodecki_map(const HorodeckiParams& p) {
  return MapDescriptor::from_choi(ChoiMatrix(p.n, horodecki_qcpo(p)));
}

MapDescriptor diag_family_map(const DiagFamilyParams& p) {
  const Index n = p.n;
  const Eigen::MatrixXd c = p.c;
  const double mu = p.mu;
  return MapDescriptor::from_action(n, [n, c, mu](const Matrix& a) -> Matrix {
    Matrix out = mu * a;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        out += c(i, j) * matrix_unit(n, i, j) * a * matrix_unit(n, j, i);
    return out;
  });
}

MapDescriptor reduction_kraus_map(const ReductionFamilyParams& p) {
  if (p.k < 1 || p.k >= p.n) {
    std::ostringstream os;
    os << "reduction_kraus_map: rank " << p.k << " outside [1, " << p.n - 1 << "]";
    throw std::invalid_argument(os.str());
  }
  const Index n = p.n;
  const double low = static_cast<double>(p.k - 1);
  const double high = static_cast<double>(p.k + 1);
  OperatorBasis basis(n);
  std::vector<KrausTerm> terms;
  if (low > 0.0) {
    for (Index i = 0; i < n; ++i) terms.push_back({low, basis.unit(i, i)});
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (low > 0.0) terms.push_back({low, basis.sym(i, j)});
      terms.push_back({high, basis.antisym(i, j)});
    }
  }
  return MapDescriptor::from_kraus(KrausChannel(n, std::move(terms)));
}

CompoundState npt_compound(const ReductionFamilyParams& p, const Matrix& rho) {
  compound::require_density(rho);
  if (rho.rows() != p.n) {
    throw std::invalid_argument("npt_compound: state dimension mismatch");
  }
  linalg::EigResult eig = linalg::eig_hermitian(rho);
  if (eig.values(0) <= 1e-10) {
    std::ostringstream os;
    os << "npt_compound: full-rank state required, min eigenvalue " << eig.values(0);
    throw std::invalid_argument(os.str());
  }
  MapDescriptor normalized = channels::normalize_map(reduction_kraus_map(p));
  return compound::compound_from_qcpo(compound::qcpo_of_channel(normalized), rho);
}

MapDescriptor window_family_map(Index n, double c, const Eigen::MatrixXd& offdiag,
                                double tol) {
  if (n < 2) throw std::invalid_argument("window_family_map: dimension must be at least 2");
  if (offdiag.rows() != n || offdiag.cols() != n) {
    throw std::invalid_argument("window_family_map: off-diagonal table must be n x n");
  }
  if (!(c >= 1.0)) {
    std::ostringstream os;
    os << "window_family_map: requires c >= 1, got " << c;
    throw std::invalid_argument(os.str());
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (offdiag(i, j) * offdiag(j, i) < 1.0) {
        std::ostringstream os;
        os << "window_family_map: requires c_ij c_ji >= 1, got "
           << offdiag(i, j) * offdiag(j, i) << " at (" << i << "," << j << ")";
        throw std::invalid_argument(os.str());
      }

  OperatorBasis basis(n);
  MapDescriptor phi = MapDescriptor::from_action(n, [&](const Matrix& a) -> Matrix {
    Matrix out = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      const Matrix e = basis.unit(i, i);
      out += (c - 1.0) * e * a * e;
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const Matrix f = basis.sym(i, j);
        const Matrix g = basis.antisym(i, j);
        const double s = 0.5 * (offdiag(i, j) + offdiag(j, i));
        const Complex cross(0.0, 0.5 * (offdiag(i, j) - offdiag(j, i)));
        out += (s - 1.0) * f * a * f;
        out += (s + 1.0) * g * a * g;
        out += -cross * f * a * g;
        out += cross * g * a * f;
      }
    }
    return out;
  });

  linalg::PsdStatus status = linalg::psd_status(phi.choi().op.mat, tol);
  if (!status.is_psd) {
    std::ostringstream os;
    os << "window_family_map: parameters pass the stated conditions but the Choi "
          "matrix has eigenvalue "
       << status.min_eigenvalue;
    throw std::invalid_argument(os.str());
  }
  return phi;
}

MapDescriptor window_family_map(Index n, double c, double offdiag_uniform, double tol) {
  Eigen::MatrixXd table = Eigen::MatrixXd::Constant(n, n, offdiag_uniform);
  table.diagonal().setConstant(c);
  return window_family_map(n, c, table, tol);
}

}  // namespace qcpo::families
