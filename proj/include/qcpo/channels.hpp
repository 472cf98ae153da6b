// channels.hpp — linear maps on M_n with Kraus and Choi representations,
// the map/operator duality, dual maps, and transpose composition.

#pragma once

#include "qcpo/linalg.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qcpo::channels {

// One weighted conjugation term. Across a channel the operators are
// Hilbert-Schmidt orthonormal and the weights carry the scale.
struct KrausTerm {
  double weight = 0.0;
  Matrix op;
};

struct KrausChannel {
  Index dim = 0;
  std::vector<KrausTerm> terms;

  KrausChannel() = default;
  // Validates weights >= 0, pairwise tr(a b†) = δ within tol, and <= n² terms.
  KrausChannel(Index n, std::vector<KrausTerm> t, double ortho_tol = 1e-10);

  Matrix apply(const Matrix& a) const;
};

// Block operator sum_ij φ(e_ij) (x) e_ij: slot A carries the output of the
// map, slot B the matrix-unit index.
struct ChoiMatrix {
  Index dim = 0;
  linalg::BipartiteOperator op;

  ChoiMatrix() = default;
  ChoiMatrix(Index n, linalg::BipartiteOperator o, double herm_tol = kHermTol);

  // the block φ(e_ij)
  Matrix block(Index i, Index j) const;
};

// A linear map on M_n. The Choi matrix is the canonical internal form; a
// Kraus family is carried when the construction provides one. Immutable and
// safe to share; unital/trace-preserving defects are computed once.
class MapDescriptor {
 public:
  static MapDescriptor from_choi(ChoiMatrix choi);
  static MapDescriptor from_kraus(KrausChannel kraus);
  static MapDescriptor from_action(Index n, const std::function<Matrix(const Matrix&)>& action);

  static MapDescriptor identity(Index n);
  static MapDescriptor transpose(Index n);
  static MapDescriptor depolarizing(Index n);  // a -> tr(a) I/n

  Index dim() const { return choi_.dim; }
  const ChoiMatrix& choi() const { return choi_; }
  const std::optional<KrausChannel>& kraus() const { return kraus_; }

  Matrix apply(const Matrix& a) const;

  double unital_defect() const { return unital_defect_; }          // ‖φ(I) - I‖
  double trace_defect() const { return trace_defect_; }            // ‖tr_A choi - I‖
  bool is_unital(double tol = 1e-10) const { return unital_defect_ <= tol; }
  bool is_trace_preserving(double tol = 1e-10) const { return trace_defect_ <= tol; }

 private:
  MapDescriptor(ChoiMatrix choi, std::optional<KrausChannel> kraus);

  ChoiMatrix choi_;
  std::optional<KrausChannel> kraus_;
  double unital_defect_ = 0.0;
  double trace_defect_ = 0.0;
};

ChoiMatrix choi_of(const MapDescriptor& phi);

// Spectral Kraus extraction. Rejects a Choi matrix with an eigenvalue below
// -tol (the map is not completely positive) carrying the witness eigenvalue.
KrausChannel kraus_from_choi(const ChoiMatrix& choi, double tol = kPsdTol);

// Adjoint with respect to tr(φ(a)·ρ) = tr(a·φ*(ρ)).
MapDescriptor dual(const MapDescriptor& phi);

MapDescriptor precompose_transpose(const MapDescriptor& phi);   // φ∘T
MapDescriptor postcompose_transpose(const MapDescriptor& phi);  // T∘φ

// φ(I)^{-1/2} φ(.) φ(I)^{-1/2}; requires φ(I) strictly positive definite.
MapDescriptor normalize_map(const MapDescriptor& phi);

// (φ (x) id) acting on a bipartite operator: maps every slot-A block.
linalg::BipartiteOperator apply_to_slot_a(const MapDescriptor& phi,
                                          const linalg::BipartiteOperator& x);

}  // namespace qcpo::channels
