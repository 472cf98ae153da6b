// channels.cpp

#include "qcpo/channels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qcpo::channels {

using linalg::BipartiteOperator;
using linalg::Slot;

KrausChannel::KrausChannel(Index n, std::vector<KrausTerm> t, double ortho_tol)
    : dim(n), terms(std::move(t)) {
  if (n <= 0) throw std::invalid_argument("KrausChannel: dimension must be positive");
  if (terms.size() > static_cast<std::size_t>(n * n)) {
    throw std::invalid_argument("KrausChannel: more than n^2 terms");
  }
  for (const auto& term : terms) {
    if (term.weight < 0.0) {
      throw std::invalid_argument("KrausChannel: negative weight");
    }
    if (term.op.rows() != n || term.op.cols() != n) {
      throw std::invalid_argument("KrausChannel: operator dimension mismatch");
    }
  }
  for (std::size_t a = 0; a < terms.size(); ++a) {
    for (std::size_t b = a; b < terms.size(); ++b) {
      const Complex gram = (terms[a].op * terms[b].op.adjoint()).trace();
      const double expect = (a == b) ? 1.0 : 0.0;
      if (std::abs(gram - expect) > ortho_tol) {
        std::ostringstream os;
        os << "KrausChannel: operators not trace orthonormal, gram(" << a << "," << b
           << ") = " << gram;
        throw std::invalid_argument(os.str());
      }
    }
  }
}

Matrix KrausChannel::apply(const Matrix& a) const {
  if (a.rows() != dim || a.cols() != dim) {
    throw std::invalid_argument("KrausChannel::apply: input dimension mismatch");
  }
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& term : terms) {
    out.noalias() += term.weight * (term.op * a * term.op.adjoint());
  }
  return out;
}

ChoiMatrix::ChoiMatrix(Index n, BipartiteOperator o, double herm_tol)
    : dim(n), op(std::move(o)) {
  if (op.dim_a != n || op.dim_b != n) {
    throw std::invalid_argument("ChoiMatrix: slot dimensions must both equal n");
  }
  if (!linalg::is_hermitian(op.mat, herm_tol)) {
    throw std::invalid_argument("ChoiMatrix: operator not Hermitian");
  }
  op.mat = linalg::hermitize(op.mat);
}

Matrix ChoiMatrix::block(Index i, Index j) const {
  Matrix out(dim, dim);
  for (Index p = 0; p < dim; ++p)
    for (Index q = 0; q < dim; ++q) out(p, q) = op.mat(p * dim + i, q * dim + j);
  return out;
}

MapDescriptor::MapDescriptor(ChoiMatrix choi, std::optional<KrausChannel> kraus)
    : choi_(std::move(choi)), kraus_(std::move(kraus)) {
  const Index n = choi_.dim;
  const Matrix eye = Matrix::Identity(n, n);
  unital_defect_ = (linalg::partial_trace(choi_.op, Slot::B) - eye).norm();
  trace_defect_ = (linalg::partial_trace(choi_.op, Slot::A) - eye).norm();
}

MapDescriptor MapDescriptor::from_choi(ChoiMatrix choi) {
  return MapDescriptor(std::move(choi), std::nullopt);
}

MapDescriptor MapDescriptor::from_kraus(KrausChannel kraus) {
  const Index n = kraus.dim;
  Matrix c = Matrix::Zero(n * n, n * n);
  for (const auto& term : kraus.terms) {
    // vec(a)[p*n + i] = a(p, i); each term contributes weight * vec(a) vec(a)†
    Vector v(n * n);
    for (Index p = 0; p < n; ++p)
      for (Index i = 0; i < n; ++i) v(p * n + i) = term.op(p, i);
    c.noalias() += term.weight * (v * v.adjoint());
  }
  return MapDescriptor(ChoiMatrix(n, BipartiteOperator(n, n, std::move(c))),
                       std::move(kraus));
}

MapDescriptor MapDescriptor::from_action(Index n,
                                         const std::function<Matrix(const Matrix&)>& action) {
  Matrix c = Matrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Matrix block = action(linalg::matrix_unit(n, i, j));
      if (block.rows() != n || block.cols() != n) {
        throw std::invalid_argument("MapDescriptor::from_action: action changes dimension");
      }
      for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q) c(p * n + i, q * n + j) = block(p, q);
    }
  }
  return MapDescriptor(ChoiMatrix(n, BipartiteOperator(n, n, std::move(c))), std::nullopt);
}

MapDescriptor MapDescriptor::identity(Index n) {
  std::vector<KrausTerm> terms;
  terms.push_back({static_cast<double>(n),
                   Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n))});
  return from_kraus(KrausChannel(n, std::move(terms)));
}

MapDescriptor MapDescriptor::transpose(Index n) {
  return from_action(n, [](const Matrix& a) { return linalg::transpose_map(a); });
}

MapDescriptor MapDescriptor::depolarizing(Index n) {
  std::vector<KrausTerm> terms;
  terms.reserve(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      terms.push_back({1.0 / static_cast<double>(n), linalg::matrix_unit(n, i, j)});
  return from_kraus(KrausChannel(n, std::move(terms)));
}

Matrix MapDescriptor::apply(const Matrix& a) const {
  const Index n = dim();
  if (a.rows() != n || a.cols() != n) {
    throw std::invalid_argument("MapDescriptor::apply: input dimension mismatch");
  }
  if (kraus_) return kraus_->apply(a);
  // block contraction: φ(a)(p,q) = sum_ij a(i,j) choi(p*n+i, q*n+j)
  Matrix out = Matrix::Zero(n, n);
  const Matrix& c = choi_.op.mat;
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      Complex sum = 0.0;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) sum += a(i, j) * c(p * n + i, q * n + j);
      out(p, q) = sum;
    }
  return out;
}

ChoiMatrix choi_of(const MapDescriptor& phi) { return phi.choi(); }

KrausChannel kraus_from_choi(const ChoiMatrix& choi, double tol) {
  const Index n = choi.dim;
  linalg::EigResult eig = linalg::eig_hermitian(choi.op.mat);
  if (eig.values(0) < -tol) {
    std::ostringstream os;
    os << "kraus_from_choi: Choi matrix not PSD, min eigenvalue " << eig.values(0)
       << " (map is not completely positive)";
    throw std::invalid_argument(os.str());
  }
  std::vector<KrausTerm> terms;
  for (Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= tol) continue;
    Matrix a(n, n);
    for (Index p = 0; p < n; ++p)
      for (Index i = 0; i < n; ++i) a(p, i) = eig.vectors(p * n + i, k);
    terms.push_back({eig.values(k), std::move(a)});
  }
  return KrausChannel(n, std::move(terms));
}

MapDescriptor dual(const MapDescriptor& phi) {
  const Index n = phi.dim();
  if (phi.kraus()) {
    std::vector<KrausTerm> terms;
    terms.reserve(phi.kraus()->terms.size());
    for (const auto& term : phi.kraus()->terms) {
      terms.push_back({term.weight, term.op.adjoint()});
    }
    return MapDescriptor::from_kraus(KrausChannel(n, std::move(terms)));
  }
  const Matrix c = phi.choi().op.mat;
  return MapDescriptor::from_action(n, [n, c](const Matrix& rho) {
    // φ*(ρ)(j,i) = tr(φ(e_ij) ρ) = sum_pq choi(p*n+i, q*n+j) ρ(q,p)
    Matrix out(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        Complex sum = 0.0;
        for (Index p = 0; p < n; ++p)
          for (Index q = 0; q < n; ++q) sum += c(p * n + i, q * n + j) * rho(q, p);
        out(j, i) = sum;
      }
    return out;
  });
}

MapDescriptor precompose_transpose(const MapDescriptor& phi) {
  const Index n = phi.dim();
  return MapDescriptor::from_choi(
      ChoiMatrix(n, linalg::partial_transpose(phi.choi().op, Slot::B)));
}

MapDescriptor postcompose_transpose(const MapDescriptor& phi) {
  const Index n = phi.dim();
  return MapDescriptor::from_choi(
      ChoiMatrix(n, linalg::partial_transpose(phi.choi().op, Slot::A)));
}

MapDescriptor normalize_map(const MapDescriptor& phi) {
  const Index n = phi.dim();
  const Matrix phi_of_identity = linalg::partial_trace(phi.choi().op, Slot::B);
  Matrix scale;
  try {
    scale = linalg::inv_sqrt_pd(phi_of_identity);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("normalize_map: φ(I) must be positive definite: ") +
                                e.what());
  }
  const Matrix conj = linalg::kron(scale, Matrix::Identity(n, n));
  Matrix c = conj * phi.choi().op.mat * conj;
  return MapDescriptor::from_choi(ChoiMatrix(n, BipartiteOperator(n, n, std::move(c))));
}

BipartiteOperator apply_to_slot_a(const MapDescriptor& phi, const BipartiteOperator& x) {
  const Index n = phi.dim();
  if (x.dim_a != n) {
    throw std::invalid_argument("apply_to_slot_a: slot-A dimension mismatch");
  }
  const Index db = x.dim_b;
  Matrix out = Matrix::Zero(n * db, n * db);
  Matrix block(n, n);
  for (Index i = 0; i < db; ++i) {
    for (Index j = 0; j < db; ++j) {
      for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q) block(p, q) = x.mat(p * db + i, q * db + j);
      const Matrix mapped = phi.apply(block);
      for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q) out(p * db + i, q * db + j) = mapped(p, q);
    }
  }
  return BipartiteOperator(n, db, std::move(out));
}

}  // namespace qcpo::channels
