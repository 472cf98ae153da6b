// verify.cpp

#include "qcpo/verify.hpp"

#include "qcpo/channels.hpp"
#include "qcpo/classify.hpp"
#include "qcpo/compound.hpp"
#include "qcpo/families.hpp"
#include "qcpo/parallel.hpp"
#include "qcpo/rng.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace qcpo::verify {

using channels::ChoiMatrix;
using channels::MapDescriptor;
using classify::DiagFamilyParams;
using linalg::BipartiteOperator;
using linalg::matrix_unit;
using linalg::Slot;

namespace {

constexpr std::array<Index, 3> kDims = {2, 3, 4};

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3e", v);
  return buffer;
}

bool psd_within(const Matrix& m, double floor) {
  return linalg::eig_hermitian(m).values(0) >= floor;
}

// random unital CP map and its block operator, via marginal conditioning
compound::Qcpo random_qcpo(rng::Generator& g, Index n) {
  Matrix root = rng::random_matrix(g, n * n, n * n);
  Matrix psd = root * root.adjoint() + 0.05 * Matrix::Identity(n * n, n * n);
  return compound::qcpo_from_state(BipartiteOperator(n, n, psd / psd.trace().real()));
}

// random trace-preserving CP map: renormalized random Kraus family
MapDescriptor random_channel(rng::Generator& g, Index n, int nkraus = 3) {
  std::vector<Matrix> kraus;
  Matrix sum = Matrix::Zero(n, n);
  for (int i = 0; i < nkraus; ++i) {
    kraus.push_back(rng::random_matrix(g, n, n));
    sum += kraus.back().adjoint() * kraus.back();
  }
  const Matrix correction = linalg::inv_sqrt_pd(sum);
  for (auto& k : kraus) k = (k * correction).eval();
  return MapDescriptor::from_action(n, [kraus](const Matrix& rho) -> Matrix {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
  });
}

double bisect_boundary(Index n, double inside, double outside) {
  const auto admissible = [n](double lambda) {
    BipartiteOperator pi = families::isotropic_qcpo({n, lambda});
    if (!psd_within(pi.mat, -1e-12)) return false;
    return psd_within(linalg::partial_transpose(pi, Slot::B).mat, -1e-12);
  };
  double lo = inside, hi = outside;
  while (std::abs(hi - lo) > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct OracleCounts {
  int checked = 0;
  int excluded = 0;
  int disagreements = 0;
  int route_mismatches = 0;
};

DiagFamilyParams random_params(rng::Generator& g, Index n, bool bias_nonnegative) {
  Eigen::MatrixXd table(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) table(i, j) = g.uniform(-3.0, 3.0);
  if (bias_nonnegative) table = table.cwiseAbs().eval();
  return DiagFamilyParams(n, std::move(table), g.uniform(-3.0, 3.0));
}

OracleCounts oracle_sweep(Index n, std::uint64_t seed, bool copositive_side) {
  rng::Generator g(seed + static_cast<std::uint64_t>(n));
  OracleCounts counts;
  const int samples = 1200;
  for (int trial = 0; trial < samples; ++trial) {
    // a quarter of the draws biased into the CP cone so both verdicts occur
    DiagFamilyParams p = random_params(g, n, trial % 4 == 0);
    MapDescriptor phi = families::diag_family_map(p);
    Matrix probe = copositive_side
                       ? linalg::partial_transpose(phi.choi().op, Slot::B).mat
                       : phi.choi().op.mat;
    const double min_eig = linalg::eig_hermitian(probe).values(0);
    bool closed = false;
    if (copositive_side) {
      const bool routes_a = classify::ccp_inequalities(p);
      const bool routes_b = classify::ccp_pair_blocks(p);
      if (routes_a != routes_b) ++counts.route_mismatches;
      closed = routes_a;
    } else {
      closed = classify::cp_closed_form(p);
    }
    if (std::abs(min_eig) <= 1e-7) {
      ++counts.excluded;
      continue;
    }
    ++counts.checked;
    if (closed != (min_eig >= 0.0)) ++counts.disagreements;
  }
  return counts;
}

std::string run_and_capture(const std::string& command, int& exit_code) {
  std::string output;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) {
    exit_code = -1;
    return output;
  }
  char buffer[4096];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    output.append(buffer, got);
  }
  const int status = pclose(pipe);
  exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return output;
}

}  // namespace

CriterionResult boundary_interval(Index n) {
  CriterionResult result;
  result.name = "isotropic-boundary-n" + std::to_string(n);
  const double upper = bisect_boundary(n, 0.0, 1.0);
  const double lower = bisect_boundary(n, 0.0, -1.0);
  const double expect_upper = 1.0 / static_cast<double>(n + 1);
  const double expect_lower = -1.0 / static_cast<double>(n * n - 1);
  const double err = std::max(std::abs(upper - expect_upper), std::abs(lower - expect_lower));
  result.pass = err <= 1e-8;
  std::ostringstream os;
  os << "measured [" << lower << ", " << upper << "] vs [" << expect_lower << ", "
     << expect_upper << "], endpoint error " << fmt(err);
  result.detail = os.str();
  return result;
}

CriterionResult cp_oracle_equivalence(Index n, std::uint64_t seed) {
  CriterionResult result;
  result.name = "cp-oracle-n" + std::to_string(n);
  OracleCounts counts = oracle_sweep(n, seed, false);
  result.pass = counts.disagreements == 0 && counts.checked >= 1000;
  std::ostringstream os;
  os << counts.checked << " samples checked, " << counts.excluded << " boundary-excluded, "
     << counts.disagreements << " disagreements";
  result.detail = os.str();
  return result;
}

CriterionResult ccp_oracle_equivalence(Index n, std::uint64_t seed) {
  CriterionResult result;
  result.name = "ccp-oracle-n" + std::to_string(n);
  OracleCounts counts = oracle_sweep(n, seed ^ 0x9e37u, true);
  result.pass =
      counts.disagreements == 0 && counts.route_mismatches == 0 && counts.checked >= 1000;
  std::ostringstream os;
  os << counts.checked << " samples checked, " << counts.excluded << " boundary-excluded, "
     << counts.disagreements << " disagreements, " << counts.route_mismatches
     << " route mismatches";
  result.detail = os.str();
  return result;
}

CriterionResult reduction_bridge() {
  CriterionResult result;
  result.name = "reduction-bridge";
  double max_dev = 0.0;
  double min_choi_eig = 0.0;
  for (Index n : kDims) {
    for (int k = 1; k < static_cast<int>(n); ++k) {
      MapDescriptor phi = families::reduction_kraus_map({n, k});
      MapDescriptor composed = channels::postcompose_transpose(phi);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          const Matrix e = matrix_unit(n, i, j);
          const Matrix expect =
              static_cast<double>(k) * e.trace() * Matrix::Identity(n, n) - e;
          max_dev = std::max(max_dev,
                             (composed.apply(e) - expect).cwiseAbs().maxCoeff());
        }
      min_choi_eig =
          std::min(min_choi_eig, linalg::eig_hermitian(phi.choi().op.mat).values(0));
    }
  }
  result.pass = max_dev <= 1e-12 && min_choi_eig >= -1e-9;
  std::ostringstream os;
  os << "max unit deviation " << fmt(max_dev) << ", min Choi eigenvalue "
     << fmt(min_choi_eig);
  result.detail = os.str();
  return result;
}

CriterionResult falsifier_analytic_values(std::uint64_t seed) {
  CriterionResult result;
  result.name = "falsifier-values";
  double worst = 0.0;
  for (Index n : kDims) {
    Matrix pair_sum = Matrix::Zero(n * n, n * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        pair_sum += linalg::kron(matrix_unit(n, i, j), matrix_unit(n, i, j));
    for (int k = 1; k < static_cast<int>(n); ++k) {
      Matrix m = static_cast<double>(k) * Matrix::Identity(n * n, n * n) - pair_sum;
      ChoiMatrix choi(n, BipartiteOperator(n, n, std::move(m)));
      for (int r = 1; r <= static_cast<int>(n); ++r) {
        classify::FalsifierResult run = classify::schmidt_falsifier(choi, r, 200, seed);
        worst = std::max(worst, std::abs(run.min_value - static_cast<double>(k - r)));
        // soundness: the witness must reproduce the reported value
        const double direct =
            std::real(Complex(run.witness.adjoint() * choi.op.mat * run.witness));
        worst = std::max(worst, std::abs(direct - run.min_value));
      }
    }
  }
  result.pass = worst <= 1e-6;
  result.detail = "max |min - (k - r)| = " + fmt(worst);
  return result;
}

CriterionResult compound_marginals(std::uint64_t seed) {
  CriterionResult result;
  result.name = "compound-marginals";
  rng::Generator g(seed ^ 0x51u);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = kDims[trial % kDims.size()];
    compound::Qcpo pi = random_qcpo(g, n);
    const Matrix rho = rng::random_density(g, n);
    compound::CompoundState omega = compound::compound_from_qcpo(pi, rho);
    worst = std::max(worst, (linalg::partial_trace(omega.op, Slot::B) - rho).norm());
    MapDescriptor phi = compound::channel_of_qcpo(pi);
    const Matrix expected_b =
        linalg::transpose_map(channels::dual(phi).apply(rho));
    worst = std::max(worst,
                     (linalg::partial_trace(omega.op, Slot::A) - expected_b).norm());
  }
  result.pass = worst <= 1e-10;
  result.detail = "100 instances, max marginal deviation " + fmt(worst);
  return result;
}

CriterionResult ohya_construction(std::uint64_t seed) {
  CriterionResult result;
  result.name = "ohya-construction";
  rng::Generator g(seed ^ 0x0aaau);
  double worst_marginal = 0.0;
  double worst_pt = 0.0;
  int trials = 0;
  const auto check = [&](const Matrix& rho, const MapDescriptor& phi_star) {
    compound::CompoundState omega = compound::ohya_compound(rho, phi_star);
    worst_marginal =
        std::max(worst_marginal, (linalg::partial_trace(omega.op, Slot::B) - rho).norm());
    worst_marginal = std::max(
        worst_marginal,
        (linalg::partial_trace(omega.op, Slot::A) - phi_star.apply(rho)).norm());
    const double pt_min =
        linalg::eig_hermitian(linalg::partial_transpose(omega.op, Slot::B).mat).values(0);
    worst_pt = std::min(worst_pt, pt_min);
    ++trials;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = kDims[trial % kDims.size()];
    check(rng::random_density(g, n), random_channel(g, n));
  }
  // degenerate spectra: fully mixed and a rank-two degenerate state
  for (Index n : kDims) {
    check(Matrix::Identity(n, n) / static_cast<double>(n), random_channel(g, n));
    Matrix rank_two = Matrix::Zero(n, n);
    rank_two(0, 0) = 0.5;
    rank_two(1, 1) = 0.5;
    check(rank_two, random_channel(g, n));
  }
  result.pass = worst_marginal <= 1e-10 && worst_pt >= -1e-9;
  std::ostringstream os;
  os << trials << " instances, max marginal deviation " << fmt(worst_marginal)
     << ", min PT eigenvalue " << fmt(worst_pt);
  result.detail = os.str();
  return result;
}

CriterionResult npt_compound_negativity() {
  CriterionResult result;
  result.name = "npt-compound";
  double worst_min = 0.0;       // most positive of the PT minima (must stay <= -1e-3)
  double worst_witness = 0.0;   // witness reproduction error
  bool first = true;
  for (Index n : {Index(2), Index(3)}) {
    for (int k = 1; k < static_cast<int>(n); ++k) {
      compound::CompoundState omega = families::npt_compound(
          {n, k}, Matrix::Identity(n, n) / static_cast<double>(n));
      const Matrix pt = linalg::partial_transpose(omega.op, Slot::B).mat;
      linalg::EigResult eig = linalg::eig_hermitian(pt);
      const double min_eig = eig.values(0);
      if (first || min_eig > worst_min) worst_min = min_eig;
      first = false;
      const Vector witness = eig.vectors.col(0);
      const double direct = std::real(Complex(witness.adjoint() * pt * witness));
      worst_witness = std::max(worst_witness, std::abs(direct - min_eig));
    }
  }
  result.pass = worst_min <= -1e-3 && worst_witness <= 1e-10;
  std::ostringstream os;
  os << "largest PT min eigenvalue " << fmt(worst_min) << ", witness reproduction error "
     << fmt(worst_witness);
  result.detail = os.str();
  return result;
}

CriterionResult cyclic_family_structure() {
  CriterionResult result;
  result.name = "cyclic-family";
  double worst_marginal = 0.0;
  double worst_edge = 0.0;
  for (Index n : {Index(3), Index(4)}) {
    for (double gamma_sq : {0.25, 1.0, 4.0}) {
      BipartiteOperator pi = families::horodecki_qcpo({n, gamma_sq});
      const Matrix marginal = linalg::partial_trace(pi, Slot::B);
      worst_marginal = std::max(
          worst_marginal,
          (marginal - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    BipartiteOperator at_one = families::horodecki_qcpo({n, 1.0});
    worst_edge = std::min(worst_edge, linalg::eig_hermitian(at_one.mat).values(0));
    worst_edge = std::min(
        worst_edge,
        linalg::eig_hermitian(linalg::partial_transpose(at_one, Slot::B).mat).values(0));
  }
  result.pass = worst_marginal <= 1e-13 && worst_edge >= -1e-10;
  std::ostringstream os;
  os << "max marginal deviation " << fmt(worst_marginal) << ", min edge eigenvalue "
     << fmt(worst_edge);
  result.detail = os.str();
  return result;
}

CriterionResult kpos_window_consistency(std::uint64_t seed) {
  CriterionResult result;
  result.name = "kpos-window";
  const Index n = 4;
  const double c = 2.5;
  const double offdiag = 2.1;  // ratio c_ij / (n - c) = 1.4
  const double ratio = offdiag / (static_cast<double>(n) - c);

  const bool window_two = classify::kpos_window(n, 2, c, ratio);
  const bool window_one = classify::kpos_window(n, 1, c, ratio);
  const bool window_three = classify::kpos_window(n, 3, c, ratio);

  MapDescriptor companion =
      families::diag_family_map(DiagFamilyParams::split(n, c, offdiag, -1.0));
  classify::FalsifierResult rank2 = classify::schmidt_falsifier(companion.choi(), 2, 200, seed);
  classify::FalsifierResult rank3 = classify::schmidt_falsifier(companion.choi(), 3, 200, seed);

  result.pass = window_two && !window_one && !window_three &&
                rank3.min_value < -1e-4 && rank2.min_value >= -1e-9;
  std::ostringstream os;
  os << "window verdicts (k=1,2,3) = (" << window_one << "," << window_two << ","
     << window_three << "), rank-2 min " << fmt(rank2.min_value) << ", rank-3 min "
     << fmt(rank3.min_value);
  result.detail = os.str();
  return result;
}

CriterionResult representation_roundtrips(std::uint64_t seed) {
  CriterionResult result;
  result.name = "roundtrips";
  rng::Generator g(seed ^ 0x7177u);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = kDims[trial % kDims.size()];
    Matrix root = rng::random_matrix(g, n * n, n * n);
    Matrix psd = root * root.adjoint();
    ChoiMatrix choi(n, BipartiteOperator(n, n, psd));
    MapDescriptor rebuilt = MapDescriptor::from_kraus(channels::kraus_from_choi(choi));
    worst = std::max(worst, (rebuilt.choi().op.mat - psd).norm() / (1.0 + psd.norm()));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = kDims[trial % kDims.size()];
    compound::Qcpo pi = random_qcpo(g, n);
    compound::Qcpo roundtrip = compound::qcpo_of_channel(compound::channel_of_qcpo(pi));
    worst = std::max(worst, (roundtrip.op.mat - pi.op.mat).norm());
  }
  result.pass = worst <= 1e-9;
  result.detail = "200 roundtrips, max deviation " + fmt(worst);
  return result;
}

CriterionResult cli_determinism(const std::string& cli_path, std::uint64_t seed) {
  CriterionResult result;
  result.name = "cli-determinism";
  if (cli_path.empty()) {
    result.pass = false;
    result.detail = "no CLI binary path provided";
    return result;
  }
  const std::string seed_arg = " --seed " + std::to_string(seed);
  const std::vector<std::string> commands = {
      cli_path + " build pi_lambda --n 3 --lambda 0.2",
      cli_path + " build phi_k --n 3 --k 1",
      cli_path + " sweep pi_lambda --n 2 --grid lambda=-0.5:0.5:21" + seed_arg,
      cli_path + " sweep diag --n 2 --grid mu=-2:2:17 --c 1" + seed_arg,
  };
  int mismatches = 0;
  int failures = 0;
  for (const auto& command : commands) {
    int code_a = 0, code_b = 0;
    const std::string first = run_and_capture(command, code_a);
    const std::string second = run_and_capture(command, code_b);
    if (code_a != 0 || code_b != 0) ++failures;
    if (first != second || first.empty()) ++mismatches;
  }
  result.pass = mismatches == 0 && failures == 0;
  std::ostringstream os;
  os << commands.size() << " commands run twice, " << mismatches << " byte mismatches, "
     << failures << " nonzero exits";
  result.detail = os.str();
  return result;
}

std::vector<std::string> suite_names() {
  return {"marginals", "oracles", "boundaries", "kpos"};
}

std::vector<CriterionResult> run_suite(const std::string& suite, Index n_filter,
                                       std::uint64_t seed) {
  std::vector<Index> dims;
  if (n_filter == 0) {
    dims.assign(kDims.begin(), kDims.end());
  } else {
    dims.push_back(n_filter);
  }
  std::vector<CriterionResult> results;
  if (suite == "marginals") {
    results.push_back(compound_marginals(seed));
    results.push_back(ohya_construction(seed));
  } else if (suite == "oracles") {
    for (Index n : dims) results.push_back(cp_oracle_equivalence(n, seed));
    for (Index n : dims) results.push_back(ccp_oracle_equivalence(n, seed));
    results.push_back(reduction_bridge());
    results.push_back(representation_roundtrips(seed));
  } else if (suite == "boundaries") {
    for (Index n : dims) results.push_back(boundary_interval(n));
    results.push_back(cyclic_family_structure());
  } else if (suite == "kpos") {
    results.push_back(falsifier_analytic_values(seed));
    results.push_back(kpos_window_consistency(seed));
    results.push_back(npt_compound_negativity());
  } else {
    throw std::invalid_argument("run_suite: unknown suite '" + suite +
                                "' (expected marginals|oracles|boundaries|kpos)");
  }
  return results;
}

}  // namespace qcpo::verify
