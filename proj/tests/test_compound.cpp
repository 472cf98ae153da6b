#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qcpo/compound.hpp"
#include "qcpo/rng.hpp"
#include "test_support.hpp"

using namespace qcpo;
using namespace qcpo::compound;
using channels::KrausChannel;
using channels::KrausTerm;
using channels::MapDescriptor;
using linalg::BipartiteOperator;
using linalg::matrix_unit;
using linalg::Slot;
using qcpo::test::identity;
using qcpo::test::max_abs_diff;

namespace {

BipartiteOperator unit_pair_sum(Index n) {
  Matrix m = Matrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      m += linalg::kron(matrix_unit(n, i, j), matrix_unit(n, i, j));
  return BipartiteOperator(n, n, m);
}

BipartiteOperator isotropic(Index n, double lambda) {
  Matrix m = ((1.0 - lambda) / double(n)) * Matrix::Identity(n * n, n * n) +
             lambda * unit_pair_sum(n).mat;
  return BipartiteOperator(n, n, m);
}

// random QCPO: condition a random full-rank bipartite state on its marginal
Qcpo random_qcpo(rng::Generator& g, Index n) {
  Matrix root = rng::random_matrix(g, n * n, n * n);
  Matrix psd = root * root.adjoint() + 0.1 * Matrix::Identity(n * n, n * n);
  return qcpo_from_state(BipartiteOperator(n, n, psd / psd.trace().real()));
}

}  // namespace

TEST_CASE("qcpo_from_state on a product state conditions away the first factor") {
  rng::Generator g(101);
  for (Index n : {2, 3}) {
    Matrix rho = rng::random_density(g, n, 0.2);
    Matrix tau = rng::random_density(g, n);
    Qcpo pi = qcpo_from_state(linalg::kron_op(rho, tau));
    CHECK(max_abs_diff(pi.op.mat, linalg::kron(identity(n), tau)) < 1e-10);
  }
}

TEST_CASE("qcpo_from_state on the maximally entangled projector doubles it") {
  const Index n = 2;
  BipartiteOperator sigma(n, n, unit_pair_sum(n).mat / double(n));
  Qcpo pi = qcpo_from_state(sigma);
  CHECK(max_abs_diff(pi.op.mat, 2.0 * sigma.mat) < 1e-12);
  CHECK(max_abs_diff(pi.op.mat, unit_pair_sum(n).mat) < 1e-12);
}

TEST_CASE("qcpo_from_state rejects a rank-deficient marginal") {
  BipartiteOperator sigma =
      linalg::kron_op(matrix_unit(2, 0, 0), matrix_unit(2, 0, 0));
  CHECK_THROWS_WITH_AS(qcpo_from_state(sigma), doctest::Contains("strictly positive"),
                       std::invalid_argument);
}

TEST_CASE("validate_qcpo reports on the isotropic family and the swap operator") {
  for (Index n : {2, 3}) {
    const double lambda = 1.0 / double(n + 1);
    QcpoReport report = validate_qcpo(isotropic(n, lambda));
    CHECK(report.ok());
    CHECK(report.min_eigenvalue ==
          doctest::Approx((1.0 - lambda) / double(n)).epsilon(1e-10));
    CHECK(report.marginal_deviation < 1e-12);
  }

  const Index n = 2;
  QcpoReport unscaled = validate_qcpo(BipartiteOperator(n, n, Matrix::Identity(4, 4)));
  CHECK(unscaled.positive);
  CHECK_FALSE(unscaled.marginal_ok);
  CHECK(unscaled.marginal_deviation ==
        doctest::Approx(((double(n) - 1.0) * identity(n)).norm()));

  QcpoReport scaled = validate_qcpo(
      BipartiteOperator(n, n, Matrix::Identity(4, 4) / double(n)));
  CHECK(scaled.ok());

  BipartiteOperator swap_op = linalg::partial_transpose(unit_pair_sum(2), Slot::B);
  QcpoReport sw = validate_qcpo(swap_op);
  CHECK_FALSE(sw.positive);
  CHECK(sw.min_eigenvalue == doctest::Approx(-1.0));
  Complex q = sw.witness.adjoint() * swap_op.mat * sw.witness;
  CHECK(q.real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("compound_from_qcpo closed-form cases") {
  rng::Generator g(103);
  const Index n = 3;

  // product conditioning: ω = ρ (x) τ
  Matrix tau = rng::random_density(g, n);
  Qcpo product_pi(linalg::kron_op(identity(n), tau));
  Matrix rho = rng::random_density(g, n);
  CompoundState omega = compound_from_qcpo(product_pi, rho);
  CHECK(max_abs_diff(omega.op.mat, linalg::kron(rho, tau)) < 1e-12);

  // unit-pair conditioning of the maximally mixed state
  Qcpo pair_pi(unit_pair_sum(n));
  CompoundState ent = compound_from_qcpo(pair_pi, identity(n) / double(n));
  CHECK(max_abs_diff(ent.op.mat, unit_pair_sum(n).mat / double(n)) < 1e-12);

  // pure input reads off the (0,0) diagonal block
  Qcpo pi = random_qcpo(g, n);
  CompoundState pure = compound_from_qcpo(pi, matrix_unit(n, 0, 0));
  Matrix block(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) block(i, j) = pi.op.mat(0 * n + i, 0 * n + j);
  CHECK(max_abs_diff(pure.op.mat, linalg::kron(matrix_unit(n, 0, 0), block)) < 1e-12);
  CHECK(max_abs_diff(linalg::partial_trace(pure.op, Slot::A), block) < 1e-12);
}

TEST_CASE("compound marginals match on random instances, including rank-deficient states") {
  rng::Generator g(107);
  for (Index n : {2, 3, 4}) {
    for (int trial = 0; trial < 6; ++trial) {
      Qcpo pi = random_qcpo(g, n);
      Matrix rho = rng::random_density(g, n);
      if (trial % 3 == 2) {
        // rank-deficient: zero out the smallest eigenvalue
        linalg::EigResult eig = linalg::eig_hermitian(rho);
        rho -= eig.values(0) * (eig.vectors.col(0) * eig.vectors.col(0).adjoint());
        rho /= rho.trace().real();
      }
      CompoundState omega = compound_from_qcpo(pi, rho);
      CHECK(max_abs_diff(linalg::partial_trace(omega.op, Slot::B), rho) < 1e-10);

      MapDescriptor phi = channel_of_qcpo(pi);
      Matrix expected_b = channels::dual(phi).apply(rho).transpose();
      CHECK(max_abs_diff(linalg::partial_trace(omega.op, Slot::A), expected_b) < 1e-10);

      CHECK(std::abs(omega.op.mat.trace() - Complex(1.0, 0.0)) < 1e-10);
      CHECK(linalg::psd_status(omega.op).is_psd);
    }
  }
}

TEST_CASE("conditioning the compound state recovers the qcpo for full-rank input") {
  rng::Generator g(109);
  for (Index n : {2, 3}) {
    Qcpo pi = random_qcpo(g, n);
    Matrix rho = rng::random_density(g, n, 0.3);
    CompoundState omega = compound_from_qcpo(pi, rho);
    Qcpo recovered = qcpo_from_state(omega.op);
    CHECK(max_abs_diff(recovered.op.mat, pi.op.mat) < 1e-9);
  }
}

TEST_CASE("channel_of_qcpo and qcpo_of_channel are mutually inverse") {
  const Index n = 3;
  Qcpo pair_pi(unit_pair_sum(n));
  MapDescriptor from_pairs = channel_of_qcpo(pair_pi);
  rng::Generator g(113);
  Matrix a = rng::random_matrix(g, n, n);
  CHECK(max_abs_diff(from_pairs.apply(a), a) < 1e-12);  // identity map
  CHECK(max_abs_diff(qcpo_of_channel(from_pairs).op.mat, pair_pi.op.mat) < 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    Qcpo pi = random_qcpo(g, n);
    Qcpo roundtrip = qcpo_of_channel(channel_of_qcpo(pi));
    CHECK(max_abs_diff(roundtrip.op.mat, pi.op.mat) < 1e-11);
  }
}

TEST_CASE("the noisy-identity map corresponds to the isotropic operator") {
  for (Index n : {2, 3}) {
    const double lambda = 0.2;
    MapDescriptor phi = MapDescriptor::from_action(n, [n, lambda](const Matrix& a) -> Matrix {
      return ((1.0 - lambda) / double(n)) * a.trace() * Matrix::Identity(n, n) + lambda * a;
    });
    Qcpo pi = qcpo_of_channel(phi);
    CHECK(max_abs_diff(pi.op.mat, isotropic(n, lambda).mat) < 1e-12);
  }
}

TEST_CASE("qcpo_of_channel rejects the transpose map and non-unital maps") {
  CHECK_THROWS_WITH_AS(qcpo_of_channel(MapDescriptor::transpose(2)),
                       doctest::Contains("not completely positive"), std::invalid_argument);

  std::vector<KrausTerm> compress{{1.0, matrix_unit(2, 0, 0)}};
  MapDescriptor proj = MapDescriptor::from_kraus(KrausChannel(2, std::move(compress)));
  CHECK_THROWS_WITH_AS(qcpo_of_channel(proj), doctest::Contains("not unital"),
                       std::invalid_argument);
}

TEST_CASE("ohya_decompose clusters the spectrum") {
  const Index n = 3;
  OhyaDecomposition mixed = ohya_decompose(identity(n) / double(n));
  REQUIRE(mixed.size() == 1);
  CHECK(mixed.eigenvalues[0] == doctest::Approx(1.0 / 3.0));
  CHECK(mixed.multiplicities[0] == n);
  CHECK(max_abs_diff(mixed.projectors[0], identity(n)) < 1e-12);

  Matrix two = Matrix::Zero(2, 2);
  two(0, 0) = 0.75; two(1, 1) = 0.25;
  OhyaDecomposition simple = ohya_decompose(two);
  REQUIRE(simple.size() == 2);
  CHECK(simple.eigenvalues[0] == doctest::Approx(0.75));
  CHECK(simple.eigenvalues[1] == doctest::Approx(0.25));
  CHECK(simple.multiplicities[0] == 1);
  CHECK(simple.multiplicities[1] == 1);

  Matrix degen = Matrix::Zero(3, 3);
  degen(0, 0) = 0.5; degen(1, 1) = 0.25; degen(2, 2) = 0.25;
  OhyaDecomposition clustered = ohya_decompose(degen);
  REQUIRE(clustered.size() == 2);
  CHECK(clustered.eigenvalues[0] == doctest::Approx(0.5));
  CHECK(clustered.multiplicities[0] == 1);
  CHECK(clustered.eigenvalues[1] == doctest::Approx(0.25));
  CHECK(clustered.multiplicities[1] == 2);
}

TEST_CASE("ohya_decompose invariants on random states") {
  rng::Generator g(127);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + trial % 3;
    Matrix rho = rng::random_density(g, n);
    OhyaDecomposition d = ohya_decompose(rho);
    double total = 0.0;
    Matrix recon = Matrix::Zero(n, n);
    Matrix projector_sum = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < d.size(); ++k) {
      total += d.eigenvalues[k] * double(d.multiplicities[k]);
      recon += d.eigenvalues[k] * d.projectors[k];
      projector_sum += d.projectors[k];
      // projector property and mutual orthogonality
      CHECK(max_abs_diff(d.projectors[k] * d.projectors[k], d.projectors[k]) < 1e-10);
      for (std::size_t l = k + 1; l < d.size(); ++l) {
        CHECK((d.projectors[k] * d.projectors[l]).norm() < 1e-10);
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs_diff(recon, rho) < 1e-10);
    CHECK(max_abs_diff(projector_sum, identity(n)) < 1e-10);
  }
}

TEST_CASE("ohya_compound closed-form cases") {
  rng::Generator g(131);
  const Index n = 2;
  MapDescriptor id = MapDescriptor::identity(n);

  // pure input: single spectral term
  Matrix pure = matrix_unit(n, 0, 0);
  CompoundState omega = ohya_compound(pure, id);
  CHECK(max_abs_diff(omega.op.mat, linalg::kron(pure, pure)) < 1e-12);

  // maximally mixed input: one degenerate cluster
  MapDescriptor channel = MapDescriptor::from_action(n, [n](const Matrix& a) -> Matrix {
    return 0.5 * a + 0.5 * a.trace() * Matrix::Identity(n, n) / double(n);
  });
  Matrix mixed = identity(n) / double(n);
  CompoundState degenerate = ohya_compound(mixed, channel);
  CHECK(max_abs_diff(degenerate.op.mat, linalg::kron(mixed, channel.apply(mixed))) < 1e-12);

  // classical two-point spectrum with the identity map
  Matrix two = Matrix::Zero(2, 2);
  two(0, 0) = 0.75; two(1, 1) = 0.25;
  CompoundState classical = ohya_compound(two, id);
  Matrix expect = 0.75 * linalg::kron(matrix_unit(2, 0, 0), matrix_unit(2, 0, 0)) +
                  0.25 * linalg::kron(matrix_unit(2, 1, 1), matrix_unit(2, 1, 1));
  CHECK(max_abs_diff(classical.op.mat, expect) < 1e-12);
}

TEST_CASE("ohya_compound marginals and positivity of the partial transpose") {
  rng::Generator g(137);
  for (Index n : {2, 3}) {
    for (int trial = 0; trial < 5; ++trial) {
      // random trace-preserving channel from renormalized Kraus operators
      Matrix k0 = rng::random_matrix(g, n, n);
      Matrix k1 = rng::random_matrix(g, n, n);
      Matrix s = (k0.adjoint() * k0 + k1.adjoint() * k1).eval();
      Matrix correction = linalg::inv_sqrt_pd(s);
      MapDescriptor phi_star =
          MapDescriptor::from_action(n, [&](const Matrix& rho) -> Matrix {
            return (k0 * correction) * rho * (k0 * correction).adjoint() +
                   (k1 * correction) * rho * (k1 * correction).adjoint();
          });
      Matrix rho = rng::random_density(g, n);
      CompoundState omega = ohya_compound(rho, phi_star);

      CHECK(max_abs_diff(linalg::partial_trace(omega.op, Slot::B), rho) < 1e-10);
      CHECK(max_abs_diff(linalg::partial_trace(omega.op, Slot::A), phi_star.apply(rho)) <
            1e-10);
      linalg::PsdStatus pt =
          linalg::psd_status(linalg::partial_transpose(omega.op, Slot::B));
      CHECK(pt.min_eigenvalue >= -1e-9);
    }
  }
}

TEST_CASE("ohya construction is non-linear in the state argument") {
  const Index n = 2;
  MapDescriptor id = MapDescriptor::identity(n);
  Matrix rho1 = matrix_unit(n, 0, 0);
  Matrix rho2 = matrix_unit(n, 1, 1);
  Matrix mix = 0.5 * rho1 + 0.5 * rho2;
  Matrix omega_mix = ohya_compound(mix, id).op.mat;
  Matrix omega_avg =
      0.5 * ohya_compound(rho1, id).op.mat + 0.5 * ohya_compound(rho2, id).op.mat;
  CHECK(max_abs_diff(omega_mix, omega_avg) > 1e-3);
}

TEST_CASE("ohya_compound rejects maps that do not send states to states") {
  const Index n = 2;
  Matrix rho = Matrix::Zero(n, n);
  rho(0, 0) = 0.6; rho(1, 1) = 0.4;

  MapDescriptor doubler = MapDescriptor::from_action(n, [](const Matrix& a) -> Matrix {
    return 2.0 * a;
  });
  CHECK_THROWS_WITH_AS(ohya_compound(rho, doubler), doctest::Contains("trace"),
                       std::invalid_argument);

  // trace preserving but not positive
  MapDescriptor indefinite = MapDescriptor::from_action(n, [n](const Matrix& a) -> Matrix {
    Matrix d = Matrix::Zero(n, n);
    d(0, 0) = 1.5; d(1, 1) = -0.5;
    return a.trace() * d;
  });
  CHECK_THROWS_WITH_AS(ohya_compound(rho, indefinite), doctest::Contains("not PSD"),
                       std::invalid_argument);
}

TEST_CASE("require_density error paths") {
  Matrix not_unit = Matrix::Identity(2, 2);
  CHECK_THROWS_WITH_AS(require_density(not_unit), doctest::Contains("trace"),
                       std::invalid_argument);
  Matrix indefinite = Matrix::Zero(2, 2);
  indefinite(0, 0) = 1.5; indefinite(1, 1) = -0.5;
  CHECK_THROWS_WITH_AS(require_density(indefinite), doctest::Contains("not PSD"),
                       std::invalid_argument);
}
