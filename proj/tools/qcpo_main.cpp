// qcpo_main.cpp — command line front end: build family objects, classify
// operators from files, run parameter sweeps, and run the verification suites.

#include "CLI11.hpp"

#include "qcpo/channels.hpp"
#include "qcpo/classify.hpp"
#include "qcpo/compound.hpp"
#include "qcpo/families.hpp"
#include "qcpo/io.hpp"
#include "qcpo/linalg.hpp"
#include "qcpo/parallel.hpp"
#include "qcpo/verify.hpp"

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qcpo;
using channels::ChoiMatrix;
using channels::MapDescriptor;
using classify::DiagFamilyParams;
using io::InputError;
using io::MatrixFile;
using io::ValidationError;
using linalg::BipartiteOperator;
using linalg::Slot;

constexpr const char* kFamilies = "pi_lambda, pi_gamma, diag, phi_k, cor5";

struct CommonOptions {
  Index n = 2;
  std::uint64_t seed = 1;
  double tol = kPsdTol;
  std::string out;
};

struct FamilyOptions {
  double lambda = 0.0;
  double gamma2 = 1.0;
  int k = 1;
  double c = 1.0;
  std::optional<double> cij;
  double mu = 0.0;
};

void emit(const CommonOptions& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
  } else {
    io::write_text_file(common.out, text);
  }
}

DiagFamilyParams diag_params(Index n, const FamilyOptions& family) {
  if (family.cij) {
    return DiagFamilyParams::split(n, family.c, *family.cij, family.mu);
  }
  return DiagFamilyParams::uniform(n, family.c, family.mu);
}

double offdiag_value(const FamilyOptions& family) {
  return family.cij ? *family.cij : family.c;
}

// ----------------------------- build --------------------------------------

MatrixFile build_object(const std::string& family_name, const CommonOptions& common,
                        const FamilyOptions& family) {
  const Index n = common.n;
  if (family_name == "pi_lambda") {
    return io::from_bipartite(MatrixFile::Kind::kQcpo,
                              families::isotropic_qcpo({n, family.lambda}));
  }
  if (family_name == "pi_gamma") {
    return io::from_bipartite(MatrixFile::Kind::kQcpo,
                              families::horodecki_qcpo({n, family.gamma2}));
  }
  if (family_name == "diag") {
    return io::from_bipartite(MatrixFile::Kind::kChoi,
                              families::diag_family_map(diag_params(n, family)).choi().op);
  }
  if (family_name == "phi_k") {
    return io::from_bipartite(MatrixFile::Kind::kChoi,
                              families::reduction_kraus_map({n, family.k}).choi().op);
  }
  if (family_name == "cor5") {
    return io::from_bipartite(
        MatrixFile::Kind::kChoi,
        families::window_family_map(n, family.c, offdiag_value(family), common.tol)
            .choi()
            .op);
  }
  throw InputError("unknown family '" + family_name + "' (expected " +
                   std::string(kFamilies) + ")");
}

MatrixFile build_compound(const std::string& family_name, const CommonOptions& common,
                          const FamilyOptions& family, const std::string& rho_path) {
  if (rho_path.empty()) {
    throw InputError("--compound requires --rho <file>");
  }
  MatrixFile rho_file = io::read_matrix_file(rho_path);
  const Matrix& rho = rho_file.data;
  const Index n = common.n;
  if (rho.rows() != n || rho.cols() != n) {
    std::ostringstream os;
    os << "dimension mismatch: --rho is " << rho.rows() << "x" << rho.cols()
       << ", expected " << n << "x" << n;
    throw InputError(os.str());
  }

  compound::CompoundState omega;
  if (family_name == "pi_lambda") {
    omega = compound::compound_from_qcpo(
        compound::Qcpo(families::isotropic_qcpo({n, family.lambda}), common.tol), rho);
  } else if (family_name == "pi_gamma") {
    omega = compound::compound_from_qcpo(
        compound::Qcpo(families::horodecki_qcpo({n, family.gamma2}), common.tol), rho);
  } else if (family_name == "diag") {
    MapDescriptor normalized =
        channels::normalize_map(families::diag_family_map(diag_params(n, family)));
    omega = compound::compound_from_qcpo(
        compound::qcpo_of_channel(normalized, common.tol), rho);
  } else if (family_name == "phi_k") {
    omega = families::npt_compound({n, family.k}, rho);
  } else if (family_name == "cor5") {
    MapDescriptor normalized = channels::normalize_map(
        families::window_family_map(n, family.c, offdiag_value(family), common.tol));
    omega = compound::compound_from_qcpo(
        compound::qcpo_of_channel(normalized, common.tol), rho);
  } else {
    throw InputError("unknown family '" + family_name + "' (expected " +
                     std::string(kFamilies) + ")");
  }
  return io::from_bipartite(MatrixFile::Kind::kState, omega.op);
}

// ----------------------------- classify -----------------------------------

int run_classify(const std::string& path, const CommonOptions& common, bool with_kpos,
                 int restarts) {
  MatrixFile file = io::read_matrix_file(path);
  classify::ClassificationReport report;
  switch (file.kind) {
    case MatrixFile::Kind::kState:
      report = classify::classify_state(io::as_bipartite(file), common.tol);
      break;
    case MatrixFile::Kind::kQcpo:
      report = classify::classify_qcpo(io::as_bipartite(file), common.tol);
      break;
    case MatrixFile::Kind::kChoi: {
      BipartiteOperator op = io::as_bipartite(file);
      if (op.dim_a != op.dim_b) {
        throw InputError("dimension mismatch: choi kind requires equal slot dimensions");
      }
      report = classify::classify_choi(ChoiMatrix(op.dim_a, op), common.tol, with_kpos,
                                       restarts, common.seed);
      break;
    }
    case MatrixFile::Kind::kMatrix:
      report = classify::classify_matrix(file.data, common.tol);
      break;
  }
  emit(common, io::report_to_json(report));
  return 0;
}

// ----------------------------- sweep ---------------------------------------

struct GridAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int steps = 0;
};

GridAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    throw InputError("invalid grid '" + spec + "': expected name=start:stop:steps");
  }
  GridAxis axis;
  axis.name = spec.substr(0, eq);
  const std::string range = spec.substr(eq + 1);
  const auto first = range.find(':');
  const auto second = range.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw InputError("invalid grid '" + spec + "': expected name=start:stop:steps");
  }
  try {
    axis.start = std::stod(range.substr(0, first));
    axis.stop = std::stod(range.substr(first + 1, second - first - 1));
    axis.steps = std::stoi(range.substr(second + 1));
  } catch (const std::exception&) {
    throw InputError("invalid grid '" + spec + "': non-numeric bounds");
  }
  if (axis.steps < 2) {
    throw InputError("invalid grid '" + spec + "': steps must be at least 2");
  }
  if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) {
    throw InputError("invalid grid '" + spec + "': bounds must be finite");
  }
  return axis;
}

struct PointOutcome {
  double min_eig = 0.0;
  double pt_min_eig = 0.0;
  bool is_qcpo = false;
  bool is_ppt = false;
  std::optional<bool> cp_closed;
  std::optional<bool> ccp_closed;
};

PointOutcome evaluate_block_operator(const BipartiteOperator& op, double tol) {
  PointOutcome out;
  linalg::EigResult eig = linalg::eig_hermitian(op.mat);
  out.min_eig = eig.values(0);
  linalg::EigResult pt =
      linalg::eig_hermitian(linalg::partial_transpose(op, Slot::B).mat);
  out.pt_min_eig = pt.values(0);
  compound::QcpoReport report = compound::validate_qcpo(op, tol);
  out.is_qcpo = report.ok();
  out.is_ppt = out.min_eig >= -tol && out.pt_min_eig >= -tol;
  return out;
}

PointOutcome evaluate_point(const std::string& family_name, Index n, double tol,
                            const FamilyOptions& point) {
  if (family_name == "pi_lambda") {
    return evaluate_block_operator(families::isotropic_qcpo({n, point.lambda}), tol);
  }
  if (family_name == "pi_gamma") {
    return evaluate_block_operator(families::horodecki_qcpo({n, point.gamma2}), tol);
  }
  if (family_name == "diag") {
    DiagFamilyParams params = diag_params(n, point);
    PointOutcome out =
        evaluate_block_operator(families::diag_family_map(params).choi().op, tol);
    out.cp_closed = classify::cp_closed_form(params);
    out.ccp_closed = classify::ccp_closed_form(params);
    return out;
  }
  if (family_name == "phi_k") {
    return evaluate_block_operator(families::reduction_kraus_map({n, point.k}).choi().op,
                                   tol);
  }
  if (family_name == "cor5") {
    // swept across the CP boundary via the transpose composition, which is
    // defined for every parameter value
    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(n, n, offdiag_value(point));
    table.diagonal().setConstant(point.c);
    DiagFamilyParams companion(n, table, -1.0);
    MapDescriptor map =
        channels::postcompose_transpose(families::diag_family_map(companion));
    PointOutcome out = evaluate_block_operator(map.choi().op, tol);
    out.cp_closed = classify::ccp_closed_form(companion);
    out.ccp_closed = classify::cp_closed_form(companion);
    return out;
  }
  throw InputError("unknown family '" + family_name + "' (expected " +
                   std::string(kFamilies) + ")");
}

int run_sweep(const std::string& family_name, const CommonOptions& common,
              const FamilyOptions& base, const std::vector<std::string>& grid_specs) {
  if (grid_specs.empty()) {
    throw InputError("sweep requires at least one --grid name=start:stop:steps");
  }
  std::vector<GridAxis> axes;
  axes.reserve(grid_specs.size());
  std::size_t total = 1;
  for (const auto& spec : grid_specs) {
    axes.push_back(parse_axis(spec));
    total *= static_cast<std::size_t>(axes.back().steps);
  }

  std::ostringstream header;
  for (const auto& axis : axes) header << axis.name << ",";
  header << "min_eig,pt_min_eig,is_qcpo,is_ppt,cp_closed,ccp_closed";

  std::vector<std::string> rows(total);
  par::parallel_for(total, [&](std::size_t flat) {
    FamilyOptions point = base;
    std::vector<double> values(axes.size());
    std::size_t remainder = flat;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto steps = static_cast<std::size_t>(axes[a].steps);
      const std::size_t idx = remainder % steps;
      remainder /= steps;
      values[a] = axes[a].start + (axes[a].stop - axes[a].start) *
                                      static_cast<double>(idx) /
                                      static_cast<double>(steps - 1);
      const std::string& name = axes[a].name;
      if (name == "lambda") point.lambda = values[a];
      else if (name == "gamma2") point.gamma2 = values[a];
      else if (name == "c") point.c = values[a];
      else if (name == "cij") point.cij = values[a];
      else if (name == "mu") point.mu = values[a];
      else if (name == "k") point.k = static_cast<int>(std::lround(values[a]));
      else throw InputError("invalid grid parameter '" + name + "'");
    }
    PointOutcome outcome = evaluate_point(family_name, common.n, common.tol, point);
    std::string row;
    for (double v : values) row += io::format_double(v) + ",";
    row += io::format_double(outcome.min_eig) + ",";
    row += io::format_double(outcome.pt_min_eig) + ",";
    row += outcome.is_qcpo ? "1," : "0,";
    row += outcome.is_ppt ? "1," : "0,";
    row += outcome.cp_closed ? (*outcome.cp_closed ? "1" : "0") : "";
    row += ",";
    row += outcome.ccp_closed ? (*outcome.ccp_closed ? "1" : "0") : "";
    rows[flat] = std::move(row);
  });

  std::string csv = header.str() + "\n";
  for (const auto& row : rows) {
    csv += row;
    csv += "\n";
  }
  emit(common, csv);
  return 0;
}

// ----------------------------- verify --------------------------------------

int run_verify(const std::string& suite, const CommonOptions& common, Index n_filter) {
  std::vector<verify::CriterionResult> results;
  try {
    results = verify::run_suite(suite, n_filter, common.seed);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  bool all_pass = true;
  std::ostringstream os;
  for (const auto& result : results) {
    all_pass = all_pass && result.pass;
    os << (result.pass ? "PASS" : "FAIL") << " " << result.name << ": " << result.detail
       << "\n";
  }
  emit(common, os.str());
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional probability operators, compound states, and PPT/NPT classifiers"};
  app.require_subcommand(1);

  CommonOptions common;
  FamilyOptions family;
  std::string input_path;
  std::string family_name;
  std::string rho_path;
  std::string suite;
  std::vector<std::string> grid_specs;
  bool with_kpos = false;
  bool make_compound = false;
  int restarts = 200;
  Index n_filter = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--n", common.n, "factor dimension");
    cmd->add_option("--seed", common.seed, "master seed for stochastic components");
    cmd->add_option("--tol", common.tol, "positivity tolerance");
    cmd->add_option("--out", common.out, "write output to file instead of stdout");
  };
  const auto add_family = [&](CLI::App* cmd) {
    cmd->add_option("--lambda", family.lambda, "isotropic mixing parameter");
    cmd->add_option("--gamma2", family.gamma2, "cyclic family parameter γ²");
    cmd->add_option("--k", family.k, "reduction family rank");
    cmd->add_option("--c", family.c, "coefficient table value");
    cmd->add_option("--cij", family.cij, "off-diagonal coefficient override");
    cmd->add_option("--mu", family.mu, "additive shift μ");
  };

  CLI::App* classify_cmd = app.add_subcommand("classify", "classify an operator file");
  classify_cmd->add_option("input", input_path, "JSON matrix file")->required();
  add_common(classify_cmd);
  classify_cmd->add_flag("--kpos", with_kpos, "run the Schmidt-rank falsifier scan");
  classify_cmd->add_option("--restarts", restarts, "falsifier restarts");

  CLI::App* build_cmd = app.add_subcommand("build", "construct a family object");
  build_cmd->add_option("family", family_name, std::string("one of: ") + kFamilies)
      ->required();
  add_common(build_cmd);
  add_family(build_cmd);
  build_cmd->add_flag("--compound", make_compound, "emit the compound state for --rho");
  build_cmd->add_option("--rho", rho_path, "density matrix file for --compound");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "evaluate a family over a grid");
  sweep_cmd->add_option("family", family_name, std::string("one of: ") + kFamilies)
      ->required();
  add_common(sweep_cmd);
  add_family(sweep_cmd);
  sweep_cmd->add_option("--grid", grid_specs, "axis as name=start:stop:steps (repeatable)");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run a verification suite (marginals|oracles|boundaries|kpos)");
  verify_cmd->add_option("suite", suite, "suite name")->required();
  verify_cmd->add_option("--n", n_filter, "restrict dimension-indexed checks to one n");
  verify_cmd->add_option("--seed", common.seed, "master seed for stochastic components");
  verify_cmd->add_option("--out", common.out, "write output to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (classify_cmd->parsed()) {
      return run_classify(input_path, common, with_kpos, restarts);
    }
    if (build_cmd->parsed()) {
      MatrixFile file = make_compound ? build_compound(family_name, common, family, rho_path)
                                      : build_object(family_name, common, family);
      emit(common, io::to_json(file));
      return 0;
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(family_name, common, family, grid_specs);
    }
    if (verify_cmd->parsed()) {
      return run_verify(suite, common, n_filter);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
