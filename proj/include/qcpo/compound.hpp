// compound.hpp — conditional probability operators and the two compound-state
// constructions, with marginal verification.

#pragma once

#include "qcpo/channels.hpp"
#include "qcpo/linalg.hpp"

#include <vector>

namespace qcpo::compound {

// PSD two-slot operator whose slot-B partial trace is the identity on slot A.
struct Qcpo {
  linalg::BipartiteOperator op;

  // Validates both defining conditions within tol.
  explicit Qcpo(linalg::BipartiteOperator pi, double tol = kPsdTol);

  Index dim() const { return op.dim_a; }
};

struct QcpoReport {
  double min_eigenvalue = 0.0;
  double marginal_deviation = 0.0;  // ‖tr_B π − I‖
  bool positive = false;
  bool marginal_ok = false;
  Vector witness;                   // minimizing eigenvector

  bool ok() const { return positive && marginal_ok; }
};

QcpoReport validate_qcpo(const linalg::BipartiteOperator& pi, double tol = kPsdTol);

// Conditioning of a bipartite state on its slot-A marginal; requires the
// marginal to be strictly positive.
Qcpo qcpo_from_state(const linalg::BipartiteOperator& sigma, double tol = kPsdTol);

// The block correspondence between conditional probability operators and
// unital completely positive maps (mutually inverse).
channels::MapDescriptor channel_of_qcpo(const Qcpo& pi);
Qcpo qcpo_of_channel(const channels::MapDescriptor& phi, double tol = kPsdTol);

enum class Provenance { kQcpoBased, kOhya };

struct CompoundState {
  linalg::BipartiteOperator op;
  Provenance provenance = Provenance::kQcpoBased;
  Matrix rho;                        // recorded slot-A marginal input
  linalg::BipartiteOperator source;  // the conditioning operator or the channel's block form
};

// ω = (ρ^{1/2} (x) I) π (ρ^{1/2} (x) I). Rank-deficient ρ is allowed; only the
// conditioning direction needs a strictly positive marginal.
CompoundState compound_from_qcpo(const Qcpo& pi, const Matrix& rho, double tol = kPsdTol);

// Spectral decomposition into distinct eigenvalues with degeneracy clusters.
struct OhyaDecomposition {
  std::vector<double> eigenvalues;    // distinct, descending
  std::vector<Index> multiplicities;
  std::vector<Matrix> projectors;     // mutually orthogonal, sum to the identity

  std::size_t size() const { return eigenvalues.size(); }
  Matrix normalized_state(std::size_t k) const;  // projector / multiplicity
};

OhyaDecomposition ohya_decompose(const Matrix& rho, double degeneracy_tol = kDegeneracyTol);

// Separable compound state: mixes cluster states against their images under
// the state map. Rejects a map whose cluster images are not states.
CompoundState ohya_compound(const Matrix& rho, const channels::MapDescriptor& phi_star,
                            double tol = kPsdTol);

// PSD within tol and unit trace within tol.
void require_density(const Matrix& rho, double tol = kPsdTol);

}  // namespace qcpo::compound
