#include <doctest.h>

#include <cmath>
#include <variant>

#include "deur/qstate.hpp"
#include "deur/sampling.hpp"
#include "oracles.hpp"

using namespace deur;
using oracle::cplx;

namespace {

CMatrixd mat2(double a, double b, double c, double d) {
  CMatrixd m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

const double kS = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("density matrix construction") {
  const auto mm = DensityMatrixd::from_matrix(CMatrixd::Identity(2, 2) / 2.0);
  CHECK(mm.purity() == doctest::Approx(0.5));

  const auto plus = DensityMatrixd::from_matrix(mat2(0.5, 0.5, 0.5, 0.5));
  CHECK(plus.purity() == doctest::Approx(1.0));

  CHECK(code_of([] { DensityMatrixd::from_matrix(mat2(0.6, 0.5, 0.5, 0.4)); }) ==
        ErrorCode::NotPositive);
  CHECK(code_of([] { DensityMatrixd::from_matrix(mat2(0.5, 0.1, 0.2, 0.5)); }) ==
        ErrorCode::NotHermitian);
  CHECK(code_of([] { DensityMatrixd::from_matrix(mat2(0.6, 0.0, 0.0, 0.5)); }) ==
        ErrorCode::TraceNotOne);
  CHECK(code_of([] { DensityMatrixd::from_matrix(CMatrixd::Ones(1, 1)); }) ==
        ErrorCode::DimensionTooSmall);
  CHECK(code_of([] { DensityMatrixd::from_matrix(CMatrixd::Zero(2, 3)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("tiny negative eigenvalues are clipped") {
  // Eigenvalues (1 + 5e-9, -5e-9): inside tolerance, so clipped to (1, 0).
  const auto rho = DensityMatrixd::from_matrix(mat2(1.0 + 5e-9, 0.0, 0.0, -5e-9));
  CHECK(rho.eigenvalues().minCoeff() >= 0.0);
  CHECK(rho.eigenvalues().sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rho.matrix()(1, 1).real() == 0.0);
}

TEST_CASE("dephase") {
  const auto plus = DensityMatrixd::from_matrix(mat2(0.5, 0.5, 0.5, 0.5));
  const auto z = OrthonormalBasisd::computational(2);
  const auto rz = dephase(plus, z);
  CHECK((rz.matrix() - CMatrixd::Identity(2, 2) / 2.0).norm() < 1e-12);

  Rng rng(11);
  for (int d = 2; d <= 4; ++d) {
    for (int t = 0; t < 50; ++t) {
      const auto rho = DensityMatrixd::from_matrix(oracle::random_state(d, rng));
      const auto a = OrthonormalBasisd::from_columns(oracle::random_unitary(d, rng));
      const auto ra = dephase(rho, a);
      // Idempotent, diagonal in A, and leaves A-statistics unchanged.
      CHECK((dephase(ra, a).matrix() - ra.matrix()).norm() < 1e-10);
      const CMatrixd in_a = a.columns().adjoint() * ra.matrix() * a.columns();
      CHECK((in_a - CMatrixd(in_a.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((outcome_dist(ra, a).probs() - outcome_dist(rho, a).probs()).norm() < 1e-12);
      // Dephasing in the eigenbasis is the identity.
      const auto e = OrthonormalBasisd::eigenbasis(rho);
      CHECK((dephase(rho, e).matrix() - rho.matrix()).norm() < 1e-10);
    }
  }
}

TEST_CASE("outcome distributions") {
  const auto plus = DensityMatrixd::from_matrix(mat2(0.5, 0.5, 0.5, 0.5));
  const auto z = OrthonormalBasisd::computational(2);
  CHECK(outcome_dist(plus, z)[0] == doctest::Approx(0.5));
  const auto zero = DensityMatrixd::from_matrix(mat2(1, 0, 0, 0));
  CHECK(outcome_dist(zero, z)[0] == 1.0);
  CHECK(outcome_dist(zero, z)[1] == 0.0);
  const auto m3 = DensityMatrixd::maximally_mixed(3);
  const auto f3 = OrthonormalBasisd::fourier(3);
  for (int i = 0; i < 3; ++i) CHECK(outcome_dist(m3, f3)[i] == doctest::Approx(1.0 / 3));
  CHECK(code_of([&] { outcome_dist(m3, z); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("overlap matrices") {
  const auto z = OrthonormalBasisd::computational(2);
  const auto x = OrthonormalBasisd::fourier(2);
  CHECK(overlap_matrix(z, z).cmax() == 1.0);
  const auto czx = overlap_matrix(z, x);
  CHECK(czx.cmax() == doctest::Approx(0.5));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(czx(i, j) == doctest::Approx(0.5));
  }
  const auto c3 = overlap_matrix(OrthonormalBasisd::computational(3), OrthonormalBasisd::fourier(3));
  CHECK(c3.cmax() == doctest::Approx(1.0 / 3));

  RMatrixd bad(2, 2);
  bad << 0.7, 0.3, 0.4, 0.6;
  CHECK(code_of([&] { OverlapMatrixd::from_entries(bad); }) == ErrorCode::NotStochastic);

  Rng rng(5);
  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + t % 3;
    const auto a = sample_haar_basis<double>(d, rng);
    const auto b = sample_haar_basis<double>(d, rng);
    const RMatrixd c = overlap_matrix(a, b).entries();
    REQUIRE((c.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-8);
    REQUIRE((c.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("orthonormal basis validation") {
  CMatrixd cols(2, 2);
  cols << 1.0, 1.0, 0.0, 1.0;
  CHECK(code_of([&] { OrthonormalBasisd::from_columns(cols); }) == ErrorCode::NotOrthonormal);
  const auto x = OrthonormalBasisd::fourier(2);
  CHECK(std::abs(x.ket(0)[0] - cplx(kS, 0)) < 1e-15);
  CHECK(std::abs(x.ket(1)[1] - cplx(-kS, 0)) < 1e-15);
}

TEST_CASE("sequential distributions") {
  const RMatrixd half = RMatrixd::Constant(2, 2, 0.5);
  const auto c = OverlapMatrixd::from_entries(half);
  const auto id = OverlapMatrixd::from_entries(RMatrixd::Identity(2, 2));
  const auto uni = ProbDistd::from_probs({0.5, 0.5});
  const auto det = ProbDistd::from_probs({1.0, 0.0});
  CHECK(sequential_dist(uni, c)[0] == doctest::Approx(0.5));
  CHECK(sequential_dist(det, id)[0] == 1.0);
  CHECK(sequential_dist(det, c)[1] == doctest::Approx(0.5));

  // Orientation: forward sums over rows (A outcomes), backward over columns.
  RMatrixd e(2, 2);
  e << 0.9, 0.1, 0.1, 0.9;
  const auto c2 = OverlapMatrixd::from_entries(e);
  const auto p = ProbDistd::from_probs({0.2, 0.8});
  CHECK(sequential_dist(p, c2)[0] == doctest::Approx(0.2 * 0.9 + 0.8 * 0.1));
  CHECK(sequential_dist(p, c2, Direction::backward)[0] ==
        doctest::Approx(0.2 * 0.9 + 0.8 * 0.1));

  Rng rng(17);
  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + t % 3;
    const auto rho = DensityMatrixd::from_matrix(oracle::random_state(d, rng));
    const auto a = OrthonormalBasisd::from_columns(oracle::random_unitary(d, rng));
    const auto b = OrthonormalBasisd::from_columns(oracle::random_unitary(d, rng));
    const RVectord lhs = outcome_dist(dephase(rho, a), b).probs();
    // q'_j = sum_i p_i |<A_i|B_j>|^2, written out directly.
    const RVectord p = outcome_dist(rho, a).probs();
    RVectord qp = RVectord::Zero(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) qp[j] += p[i] * std::norm(a.ket(i).dot(b.ket(j)));
    }
    REQUIRE((lhs - qp).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE((sequential_dist(outcome_dist(rho, a), overlap_matrix(a, b)).probs() - qp)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
  }
}

TEST_CASE("fidelity") {
  Rng rng(23);
  const auto plus = DensityMatrixd::from_matrix(mat2(0.5, 0.5, 0.5, 0.5));
  const auto mm = DensityMatrixd::maximally_mixed(2);
  CHECK(fidelity(plus, plus) == doctest::Approx(1.0));
  CHECK(fidelity(plus, mm) == doctest::Approx(kS).epsilon(1e-12));
  const auto zero = DensityMatrixd::from_matrix(mat2(1, 0, 0, 0));
  const auto one = DensityMatrixd::from_matrix(mat2(0, 0, 0, 1));
  CHECK(fidelity(zero, one) == doctest::Approx(0.0));

  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + t % 3;
    const CMatrixd m1 = oracle::random_state(d, rng);
    const CMatrixd m2 = oracle::random_state(d, rng);
    const auto r1 = DensityMatrixd::from_matrix(m1);
    const auto r2 = DensityMatrixd::from_matrix(m2);
    const double f = fidelity(r1, r2);
    REQUIRE(f >= 0.0);
    REQUIRE(f <= 1.0 + 1e-9);
    REQUIRE(f * f >= (m1 * m2).trace().real() - 1e-9);
    if (t % 10 == 0) {
      // Unitary invariance and agreement with the SVD route.
      const CMatrixd u = oracle::random_unitary(d, rng);
      REQUIRE(std::abs(fidelity(conjugate(r1, u), conjugate(r2, u)) - f) < 1e-9);
      if (r1.eigenvalues().minCoeff() > 1e-6 && r2.eigenvalues().minCoeff() > 1e-6) {
        REQUIRE(std::abs(oracle::fidelity(m1, m2) - f) < 1e-7);
      }
    }
  }
}

TEST_CASE("von Neumann entropy") {
  Rng rng(29);
  CHECK(von_neumann_entropy(DensityMatrixd::from_matrix(oracle::random_pure(3, rng))) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(von_neumann_entropy(DensityMatrixd::maximally_mixed(2)) == doctest::Approx(1.0));
  const auto r = DensityMatrixd::from_matrix(mat2(0.75, 0, 0, 0.25));
  CHECK(von_neumann_entropy(r) == doctest::Approx(oracle::binary_entropy(0.25)).epsilon(1e-12));
  CHECK(von_neumann_entropy(r) == doctest::Approx(0.811278).epsilon(1e-6));
  CHECK(von_neumann_entropy(r, LogBase::e) ==
        doctest::Approx(oracle::binary_entropy(0.25) * std::log(2.0)));
}

TEST_CASE("sampling") {
  SUBCASE("simplex mean") {
    Rng rng(31);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_simplex<double>(2, rng)[0];
    CHECK(std::abs(sum / n - 0.5) < 0.005);
  }
  SUBCASE("pure purity and determinism") {
    for (int d = 2; d <= 5; ++d) {
      const auto s1 = std::get<DensityMatrixd>(sample(SampleKind::haar_state_pure, d, 99));
      const auto s2 = std::get<DensityMatrixd>(sample(SampleKind::haar_state_pure, d, 99));
      CHECK(std::abs(s1.purity() - 1.0) < 1e-10);
      CHECK(s1.matrix() == s2.matrix());
      const auto b1 = std::get<OrthonormalBasisd>(sample(SampleKind::haar_unitary_basis, d, 7));
      const auto b2 = std::get<OrthonormalBasisd>(sample(SampleKind::haar_unitary_basis, d, 7));
      CHECK(b1.columns() == b2.columns());
      const auto m = std::get<DensityMatrixd>(sample(SampleKind::haar_state_mixed, d, 3));
      CHECK(m.eigenvalues().minCoeff() >= 0.0);
      const auto p = std::get<ProbDistd>(sample(SampleKind::simplex, d, 3));
      CHECK(p.probs().sum() == doctest::Approx(1.0));
    }
  }
  SUBCASE("Haar first-column moment") {
    // E|U_00|^2 = 1/d and E|U_00|^4 = 2/(d(d+1)) for Haar unitaries.
    Rng rng(37);
    const int d = 3;
    const int n = 40000;
    double m2 = 0.0;
    double m4 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = std::norm(haar_unitary<double>(d, rng)(0, 0));
      m2 += x;
      m4 += x * x;
    }
    CHECK(std::abs(m2 / n - 1.0 / d) < 0.01);
    CHECK(std::abs(m4 / n - 2.0 / (d * (d + 1))) < 0.01);
  }
  SUBCASE("stream split") {
    Rng a(5, 0);
    Rng b(5, 1);
    Rng c(5, 0);
    CHECK(a.next_u64() != b.next_u64());
    Rng a2(5, 0);
    CHECK(a2.next_u64() == c.next_u64());
  }
}

TEST_CASE("long double instantiation") {
  using DM = DensityMatrix<long double>;
  CMatrix<long double> m(2, 2);
  m << 0.5L, 0.5L, 0.5L, 0.5L;
  const DM plus = DM::from_matrix(m);
  const auto z = OrthonormalBasis<long double>::computational(2);
  const auto mm = dephase(plus, z);
  CHECK(static_cast<double>(fidelity(plus, mm)) == doctest::Approx(kS).epsilon(1e-15));
  CHECK(static_cast<double>(von_neumann_entropy(mm)) == doctest::Approx(1.0));
}
