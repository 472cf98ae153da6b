// verify.hpp — the acceptance checks behind `qcpo verify` and the standalone
// acceptance runner: analytic boundaries, oracle equivalences, marginal and
// roundtrip properties, falsifier consistency, and CLI determinism.

#pragma once

#include "qcpo/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qcpo::verify {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;  // measured values
};

CriterionResult boundary_interval(Index n);
CriterionResult cp_oracle_equivalence(Index n, std::uint64_t seed);
CriterionResult ccp_oracle_equivalence(Index n, std::uint64_t seed);
CriterionResult reduction_bridge();
CriterionResult falsifier_analytic_values(std::uint64_t seed);
CriterionResult compound_marginals(std::uint64_t seed);
CriterionResult ohya_construction(std::uint64_t seed);
CriterionResult npt_compound_negativity();
CriterionResult cyclic_family_structure();
CriterionResult kpos_window_consistency(std::uint64_t seed);
CriterionResult representation_roundtrips(std::uint64_t seed);
CriterionResult cli_determinism(const std::string& cli_path, std::uint64_t seed);

// Suites exposed by the command line: marginals, oracles, boundaries, kpos.
// n_filter restricts dimension-indexed checks to one n (0 keeps {2,3,4}).
std::vector<std::string> suite_names();
std::vector<CriterionResult> run_suite(const std::string& suite, Index n_filter,
                                       std::uint64_t seed);

}  // namespace qcpo::verify
