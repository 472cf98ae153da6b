// compound.cpp

#include "qcpo/compound.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qcpo::compound {

using channels::ChoiMatrix;
using channels::MapDescriptor;
using linalg::BipartiteOperator;
using linalg::Slot;

Qcpo::Qcpo(BipartiteOperator pi, double tol) : op(std::move(pi)) {
  QcpoReport report = validate_qcpo(op, tol);
  if (!report.ok()) {
    std::ostringstream os;
    os << "Qcpo: invalid conditional probability operator (min eigenvalue "
       << report.min_eigenvalue << ", marginal deviation " << report.marginal_deviation
       << ")";
    throw std::invalid_argument(os.str());
  }
}

QcpoReport validate_qcpo(const BipartiteOperator& pi, double tol) {
  QcpoReport report;
  linalg::PsdStatus psd = linalg::psd_status(pi.mat, tol);
  report.min_eigenvalue = psd.min_eigenvalue;
  report.positive = psd.is_psd;
  report.witness = psd.witness;
  const Matrix marginal = linalg::partial_trace(pi, Slot::B);
  report.marginal_deviation =
      (marginal - Matrix::Identity(pi.dim_a, pi.dim_a)).norm();
  report.marginal_ok = report.marginal_deviation <= std::max(tol, 1e-10);
  return report;
}

Qcpo qcpo_from_state(const BipartiteOperator& sigma, double tol) {
  linalg::PsdStatus psd = linalg::psd_status(sigma.mat, tol);
  if (!psd.is_psd) {
    std::ostringstream os;
    os << "qcpo_from_state: input not PSD, min eigenvalue " << psd.min_eigenvalue;
    throw std::invalid_argument(os.str());
  }
  const Matrix marginal = linalg::partial_trace(sigma, Slot::B);
  Matrix conditioner;
  try {
    conditioner = linalg::inv_sqrt_pd(marginal);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(
        std::string("qcpo_from_state: slot-A marginal must be strictly positive: ") +
        e.what());
  }
  const Matrix lift = linalg::kron(conditioner, Matrix::Identity(sigma.dim_b, sigma.dim_b));
  Matrix pi = lift * sigma.mat * lift;
  return Qcpo(BipartiteOperator(sigma.dim_a, sigma.dim_b, std::move(pi)), tol);
}

MapDescriptor channel_of_qcpo(const Qcpo& pi) {
  return MapDescriptor::from_choi(ChoiMatrix(pi.dim(), pi.op));
}

Qcpo qcpo_of_channel(const MapDescriptor& phi, double tol) {
  linalg::PsdStatus psd = linalg::psd_status(phi.choi().op.mat, tol);
  if (!psd.is_psd) {
    std::ostringstream os;
    os << "qcpo_of_channel: map not completely positive, Choi min eigenvalue "
       << psd.min_eigenvalue;
    throw std::invalid_argument(os.str());
  }
  if (!phi.is_unital(std::max(tol, 1e-10))) {
    std::ostringstream os;
    os << "qcpo_of_channel: map not unital, ‖φ(I) − I‖ = " << phi.unital_defect();
    throw std::invalid_argument(os.str());
  }
  return Qcpo(phi.choi().op, tol);
}

CompoundState compound_from_qcpo(const Qcpo& pi, const Matrix& rho, double tol) {
  require_density(rho, tol);
  if (rho.rows() != pi.dim()) {
    throw std::invalid_argument("compound_from_qcpo: state dimension mismatch");
  }
  const Matrix root = linalg::sqrt_psd(rho);
  const Matrix lift = linalg::kron(root, Matrix::Identity(pi.op.dim_b, pi.op.dim_b));
  Matrix omega = lift * pi.op.mat * lift;
  CompoundState state;
  state.op = BipartiteOperator(pi.op.dim_a, pi.op.dim_b, std::move(omega));
  state.provenance = Provenance::kQcpoBased;
  state.rho = rho;
  state.source = pi.op;
  return state;
}

Matrix OhyaDecomposition::normalized_state(std::size_t k) const {
  return projectors.at(k) / static_cast<double>(multiplicities.at(k));
}

OhyaDecomposition ohya_decompose(const Matrix& rho, double degeneracy_tol) {
  require_density(rho);
  linalg::EigResult eig = linalg::eig_hermitian(rho);
  const Index n = rho.rows();
  const double scale = std::max(1.0, std::abs(eig.values(n - 1)));
  const double gap = degeneracy_tol * scale;

  OhyaDecomposition out;
  // walk the spectrum from the top, opening a new cluster at every gap
  Index k = n - 1;
  while (k >= 0) {
    const double anchor = eig.values(k);
    Matrix projector = Matrix::Zero(n, n);
    double sum = 0.0;
    Index count = 0;
    while (k >= 0 && anchor - eig.values(k) <= gap) {
      projector.noalias() += eig.vectors.col(k) * eig.vectors.col(k).adjoint();
      sum += eig.values(k);
      ++count;
      --k;
    }
    out.eigenvalues.push_back(sum / static_cast<double>(count));
    out.multiplicities.push_back(count);
    out.projectors.push_back(std::move(projector));
  }
  return out;
}

CompoundState ohya_compound(const Matrix& rho, const MapDescriptor& phi_star, double tol) {
  require_density(rho, tol);
  const Index n = rho.rows();
  if (phi_star.dim() != n) {
    throw std::invalid_argument("ohya_compound: map dimension mismatch");
  }
  OhyaDecomposition decomposition = ohya_decompose(rho);
  Matrix omega = Matrix::Zero(n * n, n * n);
  for (std::size_t k = 0; k < decomposition.size(); ++k) {
    const Matrix cluster_state = decomposition.normalized_state(k);
    const Matrix image = phi_star.apply(cluster_state);
    const double trace_err = std::abs(image.trace() - Complex(1.0, 0.0));
    if (trace_err > std::max(tol, 1e-9)) {
      std::ostringstream os;
      os << "ohya_compound: map image has trace " << image.trace().real()
         << ", not a state map";
      throw std::invalid_argument(os.str());
    }
    linalg::PsdStatus psd = linalg::psd_status(image, tol);
    if (!psd.is_psd) {
      std::ostringstream os;
      os << "ohya_compound: map image not PSD (min eigenvalue " << psd.min_eigenvalue
         << "), not a state map";
      throw std::invalid_argument(os.str());
    }
    const double weight =
        decomposition.eigenvalues[k] * static_cast<double>(decomposition.multiplicities[k]);
    omega.noalias() += weight * linalg::kron(cluster_state, image);
  }
  CompoundState state;
  state.op = BipartiteOperator(n, n, std::move(omega));
  state.provenance = Provenance::kOhya;
  state.rho = rho;
  state.source = phi_star.choi().op;
  return state;
}

void require_density(const Matrix& rho, double tol) {
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument("require_density: matrix not square");
  }
  linalg::PsdStatus psd = linalg::psd_status(rho, tol);
  if (!psd.is_psd) {
    std::ostringstream os;
    os << "require_density: not PSD, min eigenvalue " << psd.min_eigenvalue;
    throw std::invalid_argument(os.str());
  }
  const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (trace_err > std::max(tol, 1e-9)) {
    std::ostringstream os;
    os << "require_density: trace is " << rho.trace().real() << ", expected 1";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace qcpo::compound
