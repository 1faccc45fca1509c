#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snodelab/toeplitz.hpp"
#include "support.hpp"

using namespace snodelab;
using testsupport::Rng;
using testsupport::scalar;

namespace {

ToeplitzSpec unit_spec() {
  ToeplitzSpec spec;
  spec.p = 1;
  spec.n = 1;
  spec.s = {scalar(2.0)};
  spec.nu = scalar(0.0);
  return spec;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::BadInput;
}

}  // namespace

TEST_CASE("order-one node with s0 = 2") {
  const SNode node = build_toeplitz_node(unit_spec());
  CHECK(std::abs(node.A(0, 0) - 0.5 * kI) < 1e-15);
  CHECK(std::abs(node.Phi1(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(node.Phi2(0, 0) - 1.0) < 1e-15);
  CHECK(verify_identity(node) == 0.0);
}

TEST_CASE("node identity holds for random symbols") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + trial % 8;
    const Index p = 1 + trial % 3;
    const SNode node = build_toeplitz_node(testsupport::random_toeplitz_spec(rng, n, p));
    CHECK(identity_defect(node).norm() <= 1e-12 * node.S.norm());
  }
}

TEST_CASE("non-Hermitian s0 is rejected") {
  ToeplitzSpec spec;
  spec.p = 2;
  spec.n = 1;
  CMatrix s0 = zeros(2, 2);
  s0(0, 1) = 1.0;
  spec.s = {s0};
  spec.nu = zeros(2, 2);
  CHECK(kind_of([&] { build_toeplitz_node(spec); }) == ErrorKind::NotHermitian);
}

TEST_CASE("chain of the order-one node") {
  const DiracChain chain = toeplitz_chain(unit_spec());
  REQUIRE(chain.length() == 1);
  CHECK(std::abs(chain.t[0](0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(chain.X[0](0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(chain.Y[0](0, 0) - 0.5) < 1e-15);
  CHECK((chain.C[0] - identity(2)).norm() < 1e-14);
  CHECK(chain.rho[0].norm() < 1e-14);
}

TEST_CASE("chain invariants on random symbols") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + trial % 6;
    const Index p = 1 + trial % 3;
    const DiracChain chain = toeplitz_chain(testsupport::random_toeplitz_spec(rng, n, p));
    const CMatrix j = signature_j(p);
    for (std::size_t k = 0; k < chain.length(); ++k) {
      CHECK((chain.C[k] * j * chain.C[k] - j).norm() <= 1e-9);
      CHECK(min_eigenvalue(chain.C[k]) > 0.0);
      CHECK(spectral_norm(chain.rho[k]) < 1.0);
      CHECK(min_eigenvalue(chain.t[k]) > 0.0);
      CHECK((halmos(chain.rho[k]) - chain.C[k]).norm() <= 1e-10 * (1.0 + chain.C[k].norm()));
    }
  }
}

TEST_CASE("first non-positive order is reported") {
  ToeplitzSpec spec;
  spec.p = 1;
  spec.n = 2;
  spec.s = {scalar(1.0), scalar(2.0)};
  spec.nu = scalar(0.0);
  try {
    toeplitz_chain(spec);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
    REQUIRE(e.index().has_value());
    CHECK(*e.index() == 2);
  }
}

TEST_CASE("transfer factorization") {
  const auto factors = factorize_transfer(unit_spec(), 1.0);
  REQUIRE(factors.size() == 1);
  CMatrix xy(1, 2);
  xy << 0.5, 0.5;
  const CMatrix expect =
      identity(2) - kI / (0.5 * kI - 1.0) * signature_J(1) * xy.adjoint() * 2.0 * xy;
  CHECK((factors[0] - expect).norm() < 1e-14);

  Rng rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const Index n = 1 + trial % 6;
    const Index p = 1 + trial % 3;
    const ToeplitzSpec spec = testsupport::random_toeplitz_spec(rng, n, p);
    const SNode node = build_toeplitz_node(spec);
    for (int l = 0; l < 20; ++l) {
      const Complex lambda(testsupport::uniform(rng, -3, 3), testsupport::uniform(rng, -3, 3));
      const CMatrix wa = transfer_matrix(node, lambda);
      CHECK((factor_product(factorize_transfer(spec, lambda)) - wa).norm() <= 1e-9 * wa.norm());
    }
  }
  CHECK(kind_of([] { factorize_transfer(unit_spec(), 0.5 * kI); }) == ErrorKind::PoleAtLambda);
}

TEST_CASE("Halmos extension") {
  CHECK((halmos(zeros(2, 2)) - identity(4)).norm() < 1e-15);
  CMatrix expect(2, 2);
  expect << 1.0, 0.5, 0.5, 1.0;
  expect *= 2.0 / std::sqrt(3.0);
  CHECK((halmos(scalar(0.5)) - expect).norm() < 1e-14);
  CHECK(kind_of([] { halmos(scalar(1.0)); }) == ErrorKind::NotContractive);

  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = 1 + trial % 3;
    const CMatrix r = testsupport::random_contraction(rng, p, testsupport::uniform(rng, 0.0, 0.95));
    const CMatrix C = halmos(r);
    const CMatrix j = signature_j(p);
    CHECK((C * j * C - j).norm() < 1e-10);
    CHECK(min_eigenvalue(C) > 0.0);
    CHECK((rho_from_C(C) - r).norm() < 1e-12);
  }
}

TEST_CASE("fundamental solution") {
  const DiracChain free_chain = chain_from_verblunsky({zeros(1, 1), zeros(1, 1)});
  const Complex z(0.3, -0.7);
  CHECK((dirac_fundamental(free_chain, z, 0) - identity(2)).norm() == 0.0);
  CHECK((dirac_fundamental(free_chain, z, 1) - (identity(2) + kI * z * signature_j(1))).norm() < 1e-15);
  CHECK(kind_of([&] { dirac_fundamental(free_chain, z, 3); }) == ErrorKind::IndexOutOfRange);

  Rng rng(25);
  for (int trial = 0; trial < 12; ++trial) {
    const Index n = 1 + trial % 6;
    const Index p = 1 + trial % 3;
    const ToeplitzSpec spec = testsupport::random_toeplitz_spec(rng, n, p);
    const DiracChain chain = toeplitz_chain(spec);
    const CMatrix K = unitary_K(p);
    for (int l = 0; l < 5; ++l) {
      const Complex zz(testsupport::uniform(rng, -2, 2), testsupport::uniform(rng, -2, 2));
      for (Index k = 1; k <= n; ++k) {
        const SNode node = build_toeplitz_node(spec.truncated(k));
        const CMatrix cross = std::pow(1.0 - kI * zz, static_cast<double>(k)) * K.adjoint() *
                              transfer_matrix(node, 1.0 / (2.0 * zz)) * K;
        const CMatrix W = dirac_fundamental(chain, zz, static_cast<std::size_t>(k));
        CHECK((W - cross).norm() <= 1e-9 * (1.0 + W.norm()));
      }
    }
  }
}

TEST_CASE("frames from the chain") {
  Rng rng(26);
  const DiracChain chain = chain_from_verblunsky(
      {testsupport::random_contraction(rng, 2, 0.5), testsupport::random_contraction(rng, 2, 0.7),
       testsupport::random_contraction(rng, 2, 0.3), testsupport::random_contraction(rng, 2, 0.8)});
  const Complex z(0.4, 1.1);
  CHECK((frame_toeplitz(chain, 0, z) - identity(4)).norm() == 0.0);
  CHECK(kind_of([&] { frame_toeplitz(chain, 2, Complex(0.0, -2.0)); }) == ErrorKind::PoleAtZ);
  for (std::size_t n = 0; n <= 4; ++n) {
    const DiracChain tail = chain.slice(n, 4 - n);
    for (const Complex w : testsupport::upper_grid(rng, 20)) {
      const CMatrix lhs = frame_toeplitz(chain, n, w) * frame_toeplitz(tail, tail.length(), w);
      const CMatrix rhs = frame_toeplitz(chain, 4, w);
      CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("chain frame agrees with the node frame") {
  Rng rng(27);
  for (int trial = 0; trial < 12; ++trial) {
    const Index n = 1 + trial % 6;
    const Index p = 1 + trial % 2;
    const ToeplitzSpec spec = testsupport::random_toeplitz_spec(rng, n, p);
    const SNode node = build_toeplitz_node(spec);
    const DiracChain rebuilt = chain_from_verblunsky(toeplitz_chain(spec).rho);
    for (const Complex z : testsupport::upper_grid(rng, 10)) {
      const CMatrix a = frame_toeplitz(rebuilt, static_cast<std::size_t>(n), z);
      const CMatrix b = frame_toeplitz_node(node, z);
      CHECK((a - b).norm() <= 1e-9 * (1.0 + b.norm()));
    }
  }
}

TEST_CASE("Weyl functions of the chain are Herglotz") {
  Rng rng(28);
  const DiracChain chain = toeplitz_chain(testsupport::random_toeplitz_spec(rng, 4, 2));
  const ParamPair pair = ParamPair::constant_pair(identity(2), identity(2));
  const MatrixFunction phi = toeplitz_weyl(chain, 4, pair);
  for (const Complex z : testsupport::upper_grid(rng, 50)) {
    const CMatrix v = phi(z);
    CHECK(min_eigenvalue((v - v.adjoint()) / (2.0 * kI)) >= -1e-9);
  }
}

TEST_CASE("Taylor recovery of the symbol") {
  const DiracChain unit = toeplitz_chain(unit_spec());
  Rng rng(29);
  for (int trial = 0; trial < 3; ++trial) {
    const ParamPair pair = testsupport::random_constant_pair(rng, 1);
    const auto c = taylor_recover(toeplitz_weyl(unit, 1, pair), 1);
    CHECK(std::abs(c[0](0, 0) - 1.0) < 1e-6);
  }

  ToeplitzSpec spec;
  spec.p = 1;
  spec.n = 3;
  spec.s = {scalar(2.0), scalar(Complex(0.5, 0.3)), scalar(Complex(-0.2, 0.1))};
  spec.nu = scalar(0.25);
  const DiracChain chain = toeplitz_chain(spec);
  const ParamPair pair = ParamPair::constant_pair(identity(1), identity(1));
  const auto c = taylor_recover(toeplitz_weyl(chain, 3, pair), 6);
  CHECK(std::abs(c[0](0, 0) - (1.0 + 0.25 * kI)) < 1e-6);
  CHECK(std::abs(c[1](0, 0) - Complex(0.5, 0.3)) < 1e-6);
  CHECK(std::abs(c[2](0, 0) - Complex(-0.2, 0.1)) < 1e-6);

  ToeplitzSpec extended = spec;
  extended.n = 6;
  for (std::size_t k = 3; k < 6; ++k) extended.s.push_back(c[k]);
  CHECK(min_eigenvalue(extended.matrix()) >= -1e-7);
}

TEST_CASE("composition identity for split chains") {
  Rng rng(30);
  const std::vector<CMatrix> zero_chain(5, zeros(1, 1));
  const ParamPair unit_pair = ParamPair::constant_pair(identity(1), identity(1));
  const auto grid = testsupport::upper_grid(rng, 30);
  for (std::size_t split = 0; split <= 5; ++split) {
    CHECK(khrushchev_check(zero_chain, split, unit_pair, grid) <= 1e-10);
  }
  std::vector<CMatrix> rho;
  for (int k = 0; k < 6; ++k) rho.push_back(testsupport::random_contraction(rng, 2, 0.8));
  const ParamPair pair = ParamPair::constant_pair(identity(2), identity(2));
  CHECK(khrushchev_check(rho, 0, pair, grid) <= 1e-12);
  CHECK(khrushchev_check(rho, 3, pair, grid) <= 1e-8);
}

TEST_CASE("frames with more steps shrink the Weyl family") {
  Rng rng(31);
  const ToeplitzSpec spec = testsupport::random_toeplitz_spec(rng, 5, 1);
  const DiracChain chain = toeplitz_chain(spec);
  for (const Complex z : testsupport::upper_grid(rng, 10)) {
    for (std::size_t r = 2; r <= 5; ++r) {
      const ParamPair pair = testsupport::random_constant_pair(rng, 1);
      const CMatrix phi = lft(frame_toeplitz(chain, r, z), pair, z);
      for (std::size_t k = 1; k < r; ++k) {
        const auto [R, Q] = pullback_pair(frame_toeplitz(chain, k, z), phi);
        CHECK(min_eigenvalue(R.adjoint() * Q + Q.adjoint() * R) >= -1e-9);
      }
    }
  }
}
