// families.hpp — constructors for the parametric conditional probability
// operators and maps studied by the library, each wired to closed-form
// expectations in the tests.

#pragma once

#include "qcpo/channels.hpp"
#include "qcpo/classify.hpp"
#include "qcpo/compound.hpp"
#include "qcpo/linalg.hpp"

namespace qcpo::families {

// Isotropic mixture of the identity block operator with white noise.
// Admissible parameter range is deliberately not enforced at construction;
// boundary sweeps need to cross it.
struct IsotropicParams {
  Index n = 0;
  double lambda = 0.0;
};

// π_λ = (1-λ)/n I (x) I + λ sum_ij e_ij (x) e_ij
linalg::BipartiteOperator isotropic_qcpo(const IsotropicParams& p);

// φ_λ(e_ij) = (1-λ)/n δ_ij I + λ ψ(e_ij) for a normalized positive ψ
// (unitality enforced, positivity is the caller's assertion). The block form
// of the result equals (ψ (x) id) applied to π_λ.
channels::MapDescriptor isotropic_map(const IsotropicParams& p,
                                      const channels::MapDescriptor& psi);
channels::MapDescriptor isotropic_map(const IsotropicParams& p);  // ψ = id

// One-parameter family with cyclically shifted diagonal blocks.
struct HorodeckiParams {
  Index n = 0;
  double gamma_sq = 1.0;

  HorodeckiParams(Index dim, double gsq);
  double normalization() const;       // n² + (1 - 1/γ²)(γ² - 1)
  Matrix block(Index i, Index j) const;  // a_ij
};

// π_γ = N_γ^{-1} (n I (x) I + sum_ij a_ij (x) e_ij); its slot-B partial trace
// is the identity exactly, for every γ² > 0.
linalg::BipartiteOperator horodecki_qcpo(const HorodeckiParams& p);
channels::MapDescriptor horodecki_map(const HorodeckiParams& p);

// a -> sum_ij c_ij e_ij a e_ij† + μ a
channels::MapDescriptor diag_family_map(const classify::DiagFamilyParams& p);

struct ReductionFamilyParams {
  Index n = 0;
  int k = 0;  // 1 <= k < n
};

// Manifest Kraus form with weights k-1 on the diagonal and symmetric units
// and k+1 on the antisymmetric units; composing with the transpose yields
// a -> k tr(a) I - a.
channels::MapDescriptor reduction_kraus_map(const ReductionFamilyParams& p);

// Compound state of the normalized reduction-family map against a full-rank
// state; NPT for every 1 <= k < n.
compound::CompoundState npt_compound(const ReductionFamilyParams& p, const Matrix& rho);

// The companion family whose transpose composition is the uniform-diagonal
// map (c_ii = c, μ = -1): completely positive precisely when c >= 1 and
// c_ij c_ji >= 1, with a k-positivity window decided by kpos_window.
// Rejects parameters failing the CP precondition or the Choi oracle.
channels::MapDescriptor window_family_map(Index n, double c, const Eigen::MatrixXd& offdiag,
                                          double tol = kPsdTol);
channels::MapDescriptor window_family_map(Index n, double c, double offdiag_uniform,
                                          double tol = kPsdTol);

}  // namespace qcpo::families
