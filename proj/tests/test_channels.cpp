#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qcpo/channels.hpp"
#include "qcpo/rng.hpp"
#include "test_support.hpp"

using namespace qcpo;
using namespace qcpo::channels;
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

// random channel in explicitly orthonormal Kraus form: weights on a rotated
// orthonormal operator family
MapDescriptor random_kraus_map(rng::Generator& g, Index n, std::size_t nterms) {
  // orthonormalize random matrices under the HS inner product
  std::vector<Matrix> ops;
  while (ops.size() < nterms) {
    Matrix cand = rng::random_matrix(g, n, n);
    for (const auto& prev : ops) cand -= (prev.adjoint() * cand).trace() * prev;
    const double norm = cand.norm();
    if (norm < 1e-6) continue;
    ops.push_back(cand / norm);
  }
  std::vector<KrausTerm> terms;
  for (auto& op : ops) terms.push_back({g.uniform(0.1, 2.0), std::move(op)});
  return MapDescriptor::from_kraus(KrausChannel(n, std::move(terms)));
}

}  // namespace

TEST_CASE("kraus channel validation") {
  std::vector<KrausTerm> bad_weight{{-0.5, identity(2) / std::sqrt(2.0)}};
  CHECK_THROWS_AS(KrausChannel(2, bad_weight), std::invalid_argument);

  std::vector<KrausTerm> not_ortho{{1.0, identity(2)}};  // tr(I I†) = 2, not 1
  CHECK_THROWS_AS(KrausChannel(2, not_ortho), std::invalid_argument);

  std::vector<KrausTerm> too_many;
  for (int i = 0; i < 5; ++i) too_many.push_back({1.0, identity(2)});
  CHECK_THROWS_AS(KrausChannel(2, too_many), std::invalid_argument);
}

TEST_CASE("apply: identity, transpose, and the noisy-identity example") {
  rng::Generator g(3);
  MapDescriptor id = MapDescriptor::identity(3);
  Matrix a = rng::random_matrix(g, 3, 3);
  CHECK(max_abs_diff(id.apply(a), a) < 1e-13);

  MapDescriptor t = MapDescriptor::transpose(2);
  CHECK(max_abs_diff(t.apply(matrix_unit(2, 0, 1)), matrix_unit(2, 1, 0)) == 0.0);

  // a -> (1-λ)/n tr(a) I + λ a at n = 2, λ = 1/3, applied to e_00
  const double lambda = 1.0 / 3.0;
  MapDescriptor noisy = MapDescriptor::from_action(2, [lambda](const Matrix& x) -> Matrix {
    return ((1.0 - lambda) / 2.0) * x.trace() * identity(2) + lambda * x;
  });
  Matrix got = noisy.apply(matrix_unit(2, 0, 0));
  CHECK(got(0, 0).real() == doctest::Approx(2.0 / 3.0));
  CHECK(got(1, 1).real() == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(got(0, 1)) + std::abs(got(1, 0)) < 1e-15);
}

TEST_CASE("kraus and choi evaluation paths agree") {
  rng::Generator g(41);
  for (Index n : {2, 3}) {
    MapDescriptor phi = random_kraus_map(g, n, static_cast<std::size_t>(n));
    MapDescriptor choi_only = MapDescriptor::from_choi(phi.choi());
    for (int trial = 0; trial < 5; ++trial) {
      Matrix a = rng::random_matrix(g, n, n);
      CHECK(max_abs_diff(phi.apply(a), choi_only.apply(a)) < 1e-11);
    }
  }
}

TEST_CASE("choi matrices of the canonical maps") {
  const Index n = 3;
  MapDescriptor id = MapDescriptor::identity(n);
  CHECK(max_abs_diff(id.choi().op.mat, unit_pair_sum(n).mat) < 1e-12);
  linalg::EigResult eig = linalg::eig_hermitian(id.choi().op.mat);
  CHECK(eig.values(eig.values.size() - 1) == doctest::Approx(double(n)));
  for (Index k = 0; k + 1 < eig.values.size(); ++k) {
    CHECK(std::abs(eig.values(k)) < 1e-12);  // rank one
  }

  MapDescriptor t = MapDescriptor::transpose(2);
  linalg::PsdStatus st = linalg::psd_status(t.choi().op);
  CHECK_FALSE(st.is_psd);
  CHECK(st.min_eigenvalue == doctest::Approx(-1.0));

  MapDescriptor dep = MapDescriptor::depolarizing(n);
  CHECK(max_abs_diff(dep.choi().op.mat, Matrix::Identity(n * n, n * n) / double(n)) < 1e-13);
}

TEST_CASE("choi block extraction inverts the construction") {
  rng::Generator g(43);
  MapDescriptor phi = random_kraus_map(g, 3, 4);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      CHECK(max_abs_diff(phi.choi().block(i, j), phi.apply(matrix_unit(3, i, j))) < 1e-12);
    }
}

TEST_CASE("the choi matrix equals the map applied to slot A of the unit-pair sum") {
  rng::Generator g(47);
  for (Index n : {2, 3}) {
    MapDescriptor phi = random_kraus_map(g, n, 2);
    BipartiteOperator mapped = apply_to_slot_a(phi, unit_pair_sum(n));
    CHECK(max_abs_diff(mapped.mat, phi.choi().op.mat) < 1e-11);
  }
}

TEST_CASE("kraus_from_choi special cases") {
  const Index n = 3;
  KrausChannel from_pairs = kraus_from_choi(MapDescriptor::identity(n).choi());
  REQUIRE(from_pairs.terms.size() == 1);
  CHECK(from_pairs.terms[0].weight == doctest::Approx(double(n)));
  // operator is I/sqrt(n) up to a global phase
  const Matrix& op = from_pairs.terms[0].op;
  Complex phase = op(0, 0) * std::sqrt(double(n));
  CHECK(std::abs(phase) == doctest::Approx(1.0));
  CHECK(max_abs_diff(op * std::sqrt(double(n)) / phase, identity(n)) < 1e-10);

  KrausChannel max_mixed = kraus_from_choi(MapDescriptor::depolarizing(n).choi());
  REQUIRE(max_mixed.terms.size() == static_cast<std::size_t>(n * n));
  for (const auto& term : max_mixed.terms) {
    CHECK(term.weight == doctest::Approx(1.0 / double(n)));
  }

  CHECK_THROWS_WITH_AS(kraus_from_choi(MapDescriptor::transpose(2).choi()),
                       doctest::Contains("not completely positive"), std::invalid_argument);
}

TEST_CASE("kraus_from_choi roundtrip on random completely positive maps") {
  rng::Generator g(53);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 3;
    Matrix root = rng::random_matrix(g, n * n, n * n);
    Matrix psd = root * root.adjoint();
    ChoiMatrix choi(n, BipartiteOperator(n, n, psd));
    MapDescriptor rebuilt = MapDescriptor::from_kraus(kraus_from_choi(choi));
    CHECK(max_abs_diff(rebuilt.choi().op.mat, psd) < 1e-9 * (1.0 + psd.norm()));
  }
}

TEST_CASE("dual satisfies the trace pairing on units and random probes") {
  rng::Generator g(59);
  for (Index n : {2, 3}) {
    MapDescriptor phi = random_kraus_map(g, n, 3);
    MapDescriptor phi_star = dual(phi);
    linalg::OperatorBasis basis(n);
    std::vector<Matrix> probes = basis.matrix_units();
    for (int extra = 0; extra < 20; ++extra) probes.push_back(rng::random_hermitian(g, n));
    for (const auto& a : probes) {
      for (int r = 0; r < 3; ++r) {
        Matrix rho = rng::random_density(g, n);
        Complex lhs = (phi.apply(a) * rho).trace();
        Complex rhs = (a * phi_star.apply(rho)).trace();
        CHECK(std::abs(lhs - rhs) < 1e-11);
      }
    }
    CHECK(max_abs_diff(dual(phi_star).choi().op.mat, phi.choi().op.mat) < 1e-11);
  }
}

TEST_CASE("dual of a choi-only map agrees with the kraus dual") {
  rng::Generator g(61);
  MapDescriptor phi = random_kraus_map(g, 3, 3);
  MapDescriptor star_kraus = dual(phi);
  MapDescriptor star_choi = dual(MapDescriptor::from_choi(phi.choi()));
  CHECK(max_abs_diff(star_kraus.choi().op.mat, star_choi.choi().op.mat) < 1e-11);
}

TEST_CASE("dual maps: identity, conjugation, unital to trace preserving") {
  MapDescriptor id = MapDescriptor::identity(2);
  CHECK(max_abs_diff(dual(id).choi().op.mat, id.choi().op.mat) < 1e-12);

  // a -> v a v† dualizes to ρ -> v† ρ v
  rng::Generator g(67);
  Matrix v = rng::random_matrix(g, 2, 2);
  v /= v.norm();
  std::vector<KrausTerm> terms{{1.7, v}};
  MapDescriptor conj = MapDescriptor::from_kraus(KrausChannel(2, std::move(terms)));
  Matrix rho = rng::random_density(g, 2);
  CHECK(max_abs_diff(dual(conj).apply(rho), 1.7 * v.adjoint() * rho * v) < 1e-12);

  // unital map: identity-plus-swap-style mixture stays unital, dual becomes TP
  MapDescriptor noisy = MapDescriptor::from_action(3, [](const Matrix& a) -> Matrix {
    return 0.4 * a + 0.6 * a.trace() * identity(3) / 3.0;
  });
  CHECK(noisy.is_unital());
  MapDescriptor star = dual(noisy);
  CHECK(star.is_trace_preserving(1e-10));
  Matrix probe = rng::random_density(g, 3);
  CHECK(std::abs(star.apply(probe).trace() - Complex(1.0, 0.0)) < 1e-11);
}

TEST_CASE("transpose composition at the choi level") {
  MapDescriptor id = MapDescriptor::identity(2);
  MapDescriptor t = MapDescriptor::transpose(2);
  CHECK(max_abs_diff(precompose_transpose(id).choi().op.mat, t.choi().op.mat) < 1e-12);
  CHECK(max_abs_diff(precompose_transpose(t).choi().op.mat, id.choi().op.mat) < 1e-12);

  rng::Generator g(71);
  for (Index n : {2, 3}) {
    MapDescriptor phi = random_kraus_map(g, n, 3);
    MapDescriptor right = precompose_transpose(phi);
    MapDescriptor left = postcompose_transpose(phi);
    // action-level identities: (φ∘T)(a) = φ(aᵀ) and (T∘φ)(a) = φ(a)ᵀ
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        Matrix e = matrix_unit(n, i, j);
        CHECK(max_abs_diff(right.apply(e), phi.apply(e.transpose())) < 1e-12);
        CHECK(max_abs_diff(left.apply(e), phi.apply(e).transpose()) < 1e-12);
      }
    CHECK(max_abs_diff(right.choi().op.mat,
                       linalg::partial_transpose(phi.choi().op, Slot::B).mat) < 1e-12);
    CHECK(max_abs_diff(left.choi().op.mat,
                       linalg::partial_transpose(phi.choi().op, Slot::A).mat) < 1e-12);
  }
}

TEST_CASE("unitality and trace preservation flags") {
  MapDescriptor id = MapDescriptor::identity(3);
  CHECK(id.is_unital());
  CHECK(id.is_trace_preserving());

  std::vector<KrausTerm> compress{{1.0, matrix_unit(2, 0, 0)}};
  MapDescriptor proj = MapDescriptor::from_kraus(KrausChannel(2, std::move(compress)));
  CHECK_FALSE(proj.is_unital());
  CHECK_FALSE(proj.is_trace_preserving());

  // unitality defect equals ‖φ(I) − I‖ measured through apply
  rng::Generator g(73);
  MapDescriptor phi = random_kraus_map(g, 2, 2);
  const double defect = (phi.apply(identity(2)) - identity(2)).norm();
  CHECK(phi.unital_defect() == doctest::Approx(defect).epsilon(1e-9));
}

TEST_CASE("normalize_map produces a unital map and preserves unital input") {
  MapDescriptor id = MapDescriptor::identity(2);
  CHECK(max_abs_diff(normalize_map(id).choi().op.mat, id.choi().op.mat) < 1e-12);

  // uniform two-level family with c_ij = 2, μ = 0 has φ(I) = 4I
  MapDescriptor phi = MapDescriptor::from_action(2, [](const Matrix& a) -> Matrix {
    Matrix out = Matrix::Zero(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        out += 2.0 * matrix_unit(2, i, j) * a * matrix_unit(2, j, i);
    return out;
  });
  MapDescriptor normalized = normalize_map(phi);
  CHECK(normalized.is_unital(1e-10));
  CHECK(max_abs_diff(normalized.choi().op.mat, phi.choi().op.mat / 4.0) < 1e-12);

  std::vector<KrausTerm> compress{{1.0, matrix_unit(2, 0, 0)}};
  MapDescriptor proj = MapDescriptor::from_kraus(KrausChannel(2, std::move(compress)));
  CHECK_THROWS_AS(normalize_map(proj), std::invalid_argument);
}

TEST_CASE("map action is linear on random probes") {
  rng::Generator g(79);
  MapDescriptor phi = random_kraus_map(g, 3, 4);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = rng::random_matrix(g, 3, 3);
    Matrix b = rng::random_matrix(g, 3, 3);
    const Complex alpha = g.gaussian_complex();
    const Complex beta = g.gaussian_complex();
    Matrix lhs = phi.apply(alpha * a + beta * b);
    Matrix rhs = alpha * phi.apply(a) + beta * phi.apply(b);
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
  }
}
