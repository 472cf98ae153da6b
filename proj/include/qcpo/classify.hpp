// classify.hpp — positivity classifiers: complete positivity and copositivity
// via Choi spectra, PPT/NPT verdicts for states, closed-form condition
// checkers for the diagonal-conjugation family, and a Schmidt-rank
// block-positivity falsifier.

#pragma once

#include "qcpo/channels.hpp"
#include "qcpo/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qcpo::classify {

// Boolean answer plus the numeric certificate that reproduces it.
struct Verdict {
  bool value = false;
  double min_eigenvalue = 0.0;
  Vector witness;
};

Verdict is_cp(const channels::MapDescriptor& phi, double tol = kPsdTol);
Verdict is_ccp(const channels::MapDescriptor& phi, double tol = kPsdTol);

// PPT iff the slot-B partial transpose is PSD. Rejects input that is not a
// PSD operator to begin with.
Verdict ppt_status(const linalg::BipartiteOperator& omega, double tol = kPsdTol);

// Coefficient table of the map a -> sum_ij c_ij e_ij a e_ij† + μ a.
struct DiagFamilyParams {
  Index n = 0;
  Eigen::MatrixXd c;  // real n x n table
  double mu = 0.0;

  DiagFamilyParams(Index dim, Eigen::MatrixXd table, double shift);
  static DiagFamilyParams uniform(Index n, double value, double mu);
  static DiagFamilyParams split(Index n, double diag, double offdiag, double mu);
};

// Complete positivity of the family: nonnegative off-diagonal coefficients
// and PSD coupling matrix [c_ii δ_ij + μ].
bool cp_closed_form(const DiagFamilyParams& p);

// Complete copositivity, two algebraically equivalent routes. The combined
// entry point evaluates both and insists they agree.
bool ccp_inequalities(const DiagFamilyParams& p);
bool ccp_pair_blocks(const DiagFamilyParams& p);
bool ccp_closed_form(const DiagFamilyParams& p);

// Conjunction characterizing maps that are both CP and co-CP; note the
// off-diagonal condition here is strict, unlike cp_closed_form.
bool cp_and_ccp_closed_form(const DiagFamilyParams& p);

// Window in which the companion map of the uniform-diagonal family
// (c_ii = c, μ = -1) is k-positive but not (k+1)-positive:
//   1 <= k <= c < k+1 < n  and  k/(n-k) <= ratio < (k+1)/(n-k-1)
// where ratio = c_ij / (n - c).
bool kpos_window(Index n, int k, double c, double offdiag_ratio);

// Minimizes <ψ|C|ψ> over unit vectors of Schmidt rank <= k by alternating
// smallest-eigenvector half-steps from seeded random starts. A negative
// minimum certifies that the map is not k-positive; a nonnegative minimum is
// evidence only. Restarts run in parallel with seeds derived per restart.
struct FalsifierResult {
  double min_value = 0.0;
  Vector witness;      // unit vector achieving min_value, Schmidt rank <= k
  int best_restart = -1;
};
FalsifierResult schmidt_falsifier(const channels::ChoiMatrix& choi, int schmidt_rank,
                                  int restarts = 200, std::uint64_t seed = 1);

struct KposScan {
  int k_positive_up_to = 0;             // largest k with no negative value found
  std::string method;                   // "falsifier" or "closed-form"
  std::vector<double> min_values;       // falsifier minimum per rank 1..n
};
KposScan kpos_scan(const channels::ChoiMatrix& choi, int restarts = 200,
                   std::uint64_t seed = 1, double tol = kPsdTol);

// Aggregated verdict surface for one classified object.
struct ClassificationReport {
  std::string kind;
  Index dim_a = 0;
  Index dim_b = 0;
  std::optional<double> min_eig;
  std::optional<double> pt_min_eig;
  std::optional<bool> is_psd;
  std::optional<bool> is_qcpo;
  std::optional<double> marginal_deviation;
  std::optional<bool> cp;
  std::optional<bool> ccp;
  std::optional<bool> unital;
  std::optional<bool> trace_preserving;
  std::optional<bool> is_ppt_state;
  std::optional<bool> is_npt_state;
  std::optional<Vector> witness;        // eigenvector certifying the negative verdict
  std::optional<KposScan> kpos;
};

ClassificationReport classify_state(const linalg::BipartiteOperator& omega,
                                    double tol = kPsdTol);
ClassificationReport classify_qcpo(const linalg::BipartiteOperator& pi,
                                   double tol = kPsdTol);
ClassificationReport classify_choi(const channels::ChoiMatrix& choi, double tol = kPsdTol,
                                   bool with_kpos = false, int restarts = 200,
                                   std::uint64_t seed = 1);
ClassificationReport classify_matrix(const Matrix& m, double tol = kPsdTol);

}  // namespace qcpo::classify
