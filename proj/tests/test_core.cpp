#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fockwalk/core.hpp"
#include "support.hpp"

using namespace fockwalk;
using namespace testing_support;

TEST_CASE("basis indexing puts the coin on the slow index") {
  const auto space = SystemSpace::with_n_max(4);
  CHECK(space.fock_dim == 5);
  CHECK(space.dim() == 10);
  CHECK(space.index(kExcited, 3) == 3);
  CHECK(space.index(kGround, 0) == 5);
  const CVector e3 = ops::basis_state(space, kExcited, 3);
  CHECK(e3(3) == cplx(1.0, 0.0));
  CHECK(e3.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(SystemSpace::with_n_max(-1), DimensionError);
}

TEST_CASE("kron matches the elementwise definition") {
  std::mt19937_64 rng(7);
  const CMatrix a = random_complex(rng, 2, 3);
  const CMatrix b = random_complex(rng, 4, 2);
  const CMatrix k = kron(a, b);
  REQUIRE(k.rows() == 8);
  REQUIRE(k.cols() == 6);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(k(i * 4 + r, j * 2 + c) - a(i, j) * b(r, c)));
  CHECK(worst == 0.0);
}

TEST_CASE("partial trace over the coin inverts a product state") {
  std::mt19937_64 rng(11);
  const auto space = SystemSpace::with_n_max(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix coin = random_density(rng, 2);
    const CMatrix walker = random_density(rng, space.fock_dim);
    const CMatrix joint = kron(coin, walker);
    CHECK(max_abs(partial_trace_coin(joint, space) - walker) < 1e-14);
  }
  CHECK_THROWS_AS(partial_trace_coin(CMatrix::Identity(5, 5), space), DimensionError);
}

TEST_CASE("expm agrees with the eigendecomposition for Hermitian generators") {
  std::mt19937_64 rng(3);
  for (int dim : {1, 2, 5, 17, 40}) {
    for (double scale : {1e-4, 0.3, 4.0, 60.0}) {
      const CMatrix h = random_hermitian(rng, dim);
      const CMatrix u = expm(cplx(0.0, -scale) * h);
      const double tol = 1e-12 * std::max(1.0, scale * h.norm());
      CHECK(max_abs(u - unitary_by_eigen(h, scale)) < tol);
    }
  }
}

TEST_CASE("expm of a nilpotent matrix is the truncated series") {
  CMatrix n = CMatrix::Zero(3, 3);
  n(0, 1) = cplx(2.0, 1.0);
  n(1, 2) = cplx(-0.5, 3.0);
  const CMatrix expected = CMatrix::Identity(3, 3) + n + n * n / 2.0;
  CHECK(max_abs(expm(n) - expected) < 1e-13);
  CHECK(max_abs(expm(CMatrix::Zero(4, 4)) - CMatrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("expm of a diagonal matrix exponentiates entries") {
  CMatrix d = CMatrix::Zero(4, 4);
  const cplx vals[] = {{-30.0, 0.0}, {0.0, 100.0}, {2.5, -1.0}, {1e-9, 0.0}};
  for (int i = 0; i < 4; ++i) d(i, i) = vals[i];
  const CMatrix e = expm(d);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(e(i, i) - std::exp(vals[i])) < 1e-12 * std::abs(std::exp(vals[i])) + 1e-15);
}

TEST_CASE("expm of a Pauli rotation") {
  const CMatrix sx = ops::sigma_x();
  const CMatrix expected = cplx(0.0, -1.0) * sx;
  CHECK(max_abs(expm(cplx(0.0, -std::numbers::pi / 2) * sx) - expected) < 1e-15);
}

TEST_CASE("expm keeps relative accuracy for large norms") {
  std::mt19937_64 rng(19);
  const CMatrix h = random_hermitian(rng, 6);
  const CMatrix m = cplx(0.0, -1.0) * h * (1e3 / h.operatorNorm());
  const CMatrix exact = unitary_by_eigen(h, 1e3 / h.operatorNorm());
  CHECK(max_abs(expm(m) - exact) < 1e-10);
  // Real negative spectrum: compare entries relative to the exact result.
  const CMatrix a = -(h * h.adjoint()) * (1e3 / (h * h.adjoint()).operatorNorm());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  const CMatrix exact_a =
      es.eigenvectors() * es.eigenvalues().array().exp().matrix().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  CHECK(max_abs(expm(a) - exact_a) <= 1e-12 * std::max(1.0, max_abs(exact_a)));
}

TEST_CASE("expm rejects bad input") {
  CHECK_THROWS_AS(expm(CMatrix::Zero(2, 3)), DimensionError);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(expm(bad), ValidationError);
}

TEST_CASE("density matrix construction validates") {
  CHECK_NOTHROW((void)DensityMatrix(CMatrix::Identity(3, 3) / 3.0));
  CHECK_THROWS_AS((void)DensityMatrix(CMatrix::Identity(3, 3)), ValidationError);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS((void)DensityMatrix(neg), ValidationError);
  CMatrix nonherm = CMatrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS((void)DensityMatrix(nonherm), ValidationError);
  CHECK_THROWS_AS((void)DensityMatrix(CMatrix::Zero(2, 3)), Error);

  const auto report = inspect_density(neg);
  CHECK_FALSE(report.ok());
  CHECK(report.min_eigenvalue == doctest::Approx(-0.5));
}

TEST_CASE("fidelity reference values") {
  const DensityMatrix zero(ops::fock_projector(2, 0));
  const DensityMatrix one(ops::fock_projector(2, 1));
  CHECK(fidelity(zero, zero) == doctest::Approx(1.0));
  CHECK(fidelity(zero, one) == 0.0);
  const DensityMatrix mixed(CMatrix::Identity(2, 2) / 2.0);
  CHECK(fidelity(mixed, zero) == doctest::Approx(0.5));
}

TEST_CASE("fidelity against a pure target is the overlap") {
  std::mt19937_64 rng(5);
  const CMatrix rho = random_density(rng, 6);
  for (int n = 0; n < 6; ++n) {
    const DensityMatrix target(ops::fock_projector(6, n));
    CHECK(fidelity(DensityMatrix(rho), target) == doctest::Approx(rho(n, n).real()).epsilon(1e-14));
  }
  const DensityMatrix a(random_density(rng, 4));
  CHECK(fidelity(a, a) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(fidelity(a, DensityMatrix(CMatrix::Identity(3, 3) / 3.0)), DimensionError);
}

TEST_CASE("ladder operators obey the truncated algebra") {
  const int d = 8;
  const CMatrix a = ops::annihilation(d);
  const CMatrix ad = ops::creation(d);
  CHECK(max_abs(ad * a - ops::number(d)) < 1e-14);
  const CMatrix comm = a * ad - ad * a;
  for (int n = 0; n < d - 1; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
  CHECK(std::abs(comm(d - 1, d - 1) + double(d - 1)) < 1e-13);
  CHECK(std::abs(a(2, 3) - std::sqrt(3.0)) < 1e-15);
}

TEST_CASE("coin operators follow the |e> = 0 convention") {
  const Coin2 sm = ops::sigma_minus();
  CHECK(sm(kGround, kExcited) == cplx(1.0, 0.0));
  CHECK(sm(kExcited, kGround) == cplx(0.0, 0.0));
  CHECK(max_abs(ops::sigma_plus() - sm.adjoint()) == 0.0);
  CHECK(ops::sigma_z()(kExcited, kExcited) == cplx(1.0, 0.0));
  CHECK(max_abs(ops::sigma_x() * ops::sigma_x() - Coin2::Identity()) == 0.0);
}

TEST_CASE("populations and coin marginal sum to the trace") {
  std::mt19937_64 rng(9);
  const auto space = SystemSpace::with_n_max(6);
  const CMatrix rho = random_density(rng, space.dim());
  double total = 0.0;
  for (double p : fock_populations(rho, space)) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  const double pe = coin_excited_population(rho, space);
  CHECK(pe >= 0.0);
  CHECK(pe <= 1.0);

  const DensityMatrix prod = product_state(space, kExcited, DensityMatrix(ops::fock_projector(space.fock_dim, 2)));
  CHECK(coin_excited_population(prod.mat(), space) == doctest::Approx(1.0));
  CHECK(fock_populations(prod.mat(), space)[2] == doctest::Approx(1.0));
}
