#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snodelab/hankel.hpp"
#include "snodelab/snode.hpp"
#include "snodelab/toeplitz.hpp"
#include "support.hpp"

using namespace snodelab;
using testsupport::Rng;
using testsupport::scalar;

namespace {

SNode hankel_unit() {
  HankelSpec spec;
  spec.p = 1;
  spec.n = 1;
  spec.H = {scalar(1.0)};
  return build_hankel_node(spec);
}

std::vector<SNode> random_nodes(Rng& rng, int count) {
  std::vector<SNode> out;
  for (int k = 0; k < count; ++k) {
    const Index p = 1 + k % 2;
    if (k % 2 == 0) {
      out.push_back(build_toeplitz_node(testsupport::random_toeplitz_spec(rng, 1 + k % 5, p)));
    } else {
      HankelSpec spec;
      spec.p = p;
      spec.n = 1 + k % 4;
      spec.H = testsupport::random_hankel_moments(rng, spec.n, p);
      out.push_back(build_hankel_node(spec));
    }
  }
  return out;
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

CMatrix imag_part(const CMatrix& v) { return (v - v.adjoint()) / (2.0 * kI); }

}  // namespace

TEST_CASE("identity residual of built and perturbed nodes") {
  Rng rng(41);
  for (const SNode& node : random_nodes(rng, 20)) CHECK(verify_identity(node) <= 1e-12);
  SNode node = build_toeplitz_node(testsupport::random_toeplitz_spec(rng, 3, 1));
  const CMatrix E = testsupport::random_hermitian(rng, 3);
  const double expected = (node.A * E - E * node.A.adjoint()).norm() * 1e-3 / (1.0 + node.S.norm());
  node.S += 1e-3 * E;
  const double r = verify_identity(node);
  CHECK(r > 1e-6);
  CHECK(r == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("frame values") {
  const SNode h = hankel_unit();
  CHECK((frame(h, 0.0) - identity(2)).norm() == 0.0);
  const Complex z(0.3, 0.8);
  CMatrix expect(2, 2);
  expect << 1.0, 0.0, -kI * z, 1.0;
  CHECK((frame(h, z) - expect).norm() < 1e-15);
  Rng rng(42);
  for (const SNode& node : random_nodes(rng, 12)) {
    for (const Complex w : testsupport::upper_grid(rng, 5)) {
      const CMatrix a = frame(node, w);
      CHECK((a - frame_via_transfer(node, w)).norm() <= 1e-12 * (1.0 + a.norm()) * (1.0 + node.S.norm()));
    }
  }
}

TEST_CASE("frame identities") {
  Rng rng(43);
  for (const SNode& node : random_nodes(rng, 12)) {
    const CMatrix J = signature_J(node.p);
    const CMatrix pi = node.Pi();
    const Index m = node.dim();
    for (int trial = 0; trial < 4; ++trial) {
      const Complex z(testsupport::uniform(rng, -1, 1), testsupport::uniform(rng, -1, 1));
      const Complex l(testsupport::uniform(rng, -1, 1), testsupport::uniform(rng, -1, 1));
      const CMatrix lhs = frame(node, z) * J * frame(node, std::conj(l)).adjoint();
      const CMatrix inner = (identity(m) - z * node.A.adjoint())
                                .partialPivLu()
                                .solve(node.S.partialPivLu().solve(
                                    (identity(m) - l * node.A).partialPivLu().solve(pi)));
      const CMatrix rhs = J - kI * (z - l) * pi.adjoint() * inner;
      CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));

      const CMatrix inv = J * frame(node, std::conj(z)).adjoint() * J;
      CHECK((frame(node, z) * inv - identity(2 * node.p)).norm() <= 1e-10 * (1.0 + inv.norm()));

      const CMatrix a = frame(node, z.real());
      CHECK((a * J * a.adjoint() - J).norm() <= 1e-10 * (1.0 + a.squaredNorm()));
      CHECK((a.adjoint() * J * a - J).norm() <= 1e-10 * (1.0 + a.squaredNorm()));
    }
  }
}

TEST_CASE("rho characteristics") {
  const SNode h = hankel_unit();
  CHECK(std::abs(rho(h, kI)(0, 0) - 2.0) < 1e-15);
  CHECK(std::abs(rho(h, kI, Orientation::Reflected)(0, 0) + 2.0) < 1e-15);
  CHECK(kind_of([&] { rho(h, Complex(0.0, -1.0)); }) == ErrorKind::NotInUpperHalfPlane);
  Rng rng(44);
  for (const SNode& node : random_nodes(rng, 12)) {
    for (const Complex z : testsupport::upper_grid(rng, 5)) {
      const CMatrix r = rho(node, z);
      CHECK(min_eigenvalue(r) > 0.0);
      CHECK(max_eigenvalue(rho(node, z, Orientation::Reflected)) < 0.0);
      const CMatrix a = frame(node, z);
      const CMatrix a21 = block(a, 2, 1);
      const CMatrix a22 = block(a, 2, 2);
      CHECK((r - (a21 * a22.adjoint() + a22 * a21.adjoint())).norm() <= 1e-10 * (1.0 + r.norm()));
    }
  }
}

TEST_CASE("linear-fractional values") {
  const SNode h = hankel_unit();
  const MatrixFunction phi = weyl_function(h, ParamPair::constant_pair(scalar(1.0), scalar(1.0)));
  const Complex z(0.7, 0.4);
  CHECK(std::abs(phi(z)(0, 0) - kI / (1.0 - kI * z)) < 1e-15);
  CHECK(std::abs(phi(kI)(0, 0) - 0.5 * kI) < 1e-15);
  double previous = 1.0;
  for (double tau : {1.0, 10.0, 100.0, 1e4}) {
    const CMatrix v = lft(frame(h, kI), ParamPair::constant_pair(scalar(1.0), scalar(tau)), kI);
    CHECK(std::abs(v(0, 0) - kI / (1.0 + tau)) < 1e-15);
    CHECK(std::abs(v(0, 0)) < previous);
    previous = std::abs(v(0, 0));
  }
  CHECK(kind_of([&] {
          lft(frame(h, kI), ParamPair::constant_pair(scalar(0.0), scalar(0.0)), kI);
        }) == ErrorKind::InvalidPair);
}

TEST_CASE("Weyl functions are Herglotz for random pairs") {
  Rng rng(45);
  const auto nodes = random_nodes(rng, 10);
  for (int k = 0; k < 50; ++k) {
    const SNode& node = nodes[static_cast<std::size_t>(k % 10)];
    const ParamPair pair = testsupport::random_constant_pair(rng, node.p);
    const MatrixFunction phi = weyl_function(node, pair);
    for (const Complex z : testsupport::upper_grid(rng, 6)) {
      CHECK(min_eigenvalue(imag_part(phi(z))) >= -1e-9);
    }
  }
}

TEST_CASE("pair validation") {
  const PairValidation ok = validate_pair(ParamPair::constant_pair(identity(2), identity(2)));
  CHECK(ok.valid);
  CHECK(ok.points_checked == 32);
  const PairValidation bad = validate_pair(ParamPair::constant_pair(identity(1), -identity(1)));
  CHECK_FALSE(bad.valid);
}

TEST_CASE("Stieltjes inversion") {
  const MatrixFunction phi = [](Complex z) { return scalar(kI / (1.0 - kI * z)); };
  CHECK(stieltjes_density(phi, 0.0)(0, 0).real() == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-9));
  const MatrixFunction real_fn = [](Complex z) { return scalar(z * z + 1.0); };
  CHECK(std::abs(stieltjes_density(real_fn, 0.3)(0, 0)) < 1e-12);

  Rng rng(46);
  for (const SNode& node : random_nodes(rng, 6)) {
    const Complex lambda(testsupport::uniform(rng, -1, 1), testsupport::uniform(rng, 0.5, 1.5));
    const ParamPair pair = extremal_pair(node, lambda);
    const MatrixFunction weyl = weyl_function(node, pair);
    const CMatrix rl = rho(node, lambda);
    const CMatrix R = pair.R(0.0);
    const CMatrix Q = pair.Q(0.0);
    for (double t : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
      const CMatrix a = frame(node, t);
      const CMatrix F = block(a, 2, 1) * R + block(a, 2, 2) * Q;
      const CMatrix Finv = F.inverse();
      const CMatrix expect = Finv.adjoint() * rl * Finv / (2.0 * std::numbers::pi);
      CHECK((stieltjes_density(weyl, t) - expect).norm() <= 1e-8 * (1.0 + expect.norm()));
      StieltjesOptions on_axis;
      on_axis.on_axis = true;
      CHECK((stieltjes_density(weyl, t, on_axis) - expect).norm() <= 1e-10 * (1.0 + expect.norm()));
    }
  }
}

TEST_CASE("Herglotz parameters") {
  const HerglotzParams linear = herglotz_params([](Complex z) { return scalar(z); });
  CHECK(std::abs(linear.gamma(0, 0) - 1.0) < 1e-9);
  CHECK(std::abs(linear.theta(0, 0)) < 1e-12);
  CMatrix theta0(2, 2);
  theta0 << 1.0, Complex(0.5, 0.2), Complex(0.5, -0.2), -3.0;
  const HerglotzParams constant = herglotz_params([theta0](Complex) { return theta0; });
  CHECK(constant.gamma.norm() < 1e-12);
  CHECK((constant.theta - theta0).norm() < 1e-12);
  const HerglotzParams decaying = herglotz_params([](Complex z) { return scalar(-1.0 / (z + kI)); });
  CHECK(std::abs(decaying.gamma(0, 0)) < 1e-8);
  // Cauchy measure centred at 2: phi = theta + int (1/(t-z) - t/(1+t^2)) d mu with
  // int t/(1+t^2) d mu = 1/4, so theta = 0.25 + 0.25 although mu is not even.
  const MatrixFunction shifted = [](Complex z) { return scalar(0.25 - 1.0 / (z - 2.0 + kI)); };
  CHECK(std::abs(herglotz_params(shifted).theta(0, 0) - 0.5) < 1e-12);
}

TEST_CASE("interpolation residuals") {
  ToeplitzSpec spec;
  spec.p = 1;
  spec.n = 2;
  spec.s = {scalar(2.0), scalar(Complex(0.4, 0.3))};
  spec.nu = scalar(0.2);
  const SNode node = build_toeplitz_node(spec);
  const ParamPair pair = ParamPair::constant_pair(identity(1), identity(1));
  const MatrixFunction phi = weyl_function(node, pair);
  StieltjesOptions so;
  so.on_axis = true;
  const MeasureGrid mu = measure_grid(phi, 2048, so);
  const HerglotzParams hp = herglotz_params(phi);
  const InterpResidual res = interp_residual(node, hp.gamma, hp.theta, mu);
  CHECK(res.s_residual <= 1e-4);
  CHECK(res.phi1_residual <= 1e-4);

  MeasureGrid doubled = mu;
  for (auto& w : doubled.weights) w *= 2.0;
  CHECK(interp_residual(node, hp.gamma, hp.theta, doubled).s_residual >= 0.1 * node.S.norm());

  CHECK(kind_of([&] { interp_residual(hankel_unit(), hp.gamma, hp.theta, mu); }) ==
        ErrorKind::Unsupported);
}

TEST_CASE("matrix ball of the unit Hankel node") {
  const MatrixBall ball = matrix_ball(hankel_unit(), kI);
  CMatrix aleph(2, 2);
  aleph << -2.0, 1.0, 1.0, 0.0;
  CHECK((ball.aleph - aleph).norm() < 1e-12);
  CHECK(std::abs(ball.center(0, 0) - 0.5 * kI) < 1e-12);
  CHECK(std::abs(ball.left_radius(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(ball.right_radius(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK((ball_value(ball, zeros(1, 1)) - ball.center).norm() == 0.0);
  CHECK(ball.schur_residual() <= 1e-9);

  CHECK(ball_membership(ball, ball.center).norm < 1e-15);
  for (double tau : {0.1, 1.0, 10.0}) {
    const CMatrix v = lft(frame(hankel_unit(), kI), ParamPair::constant_pair(scalar(1.0), scalar(tau)), kI);
    const BallMembership m = ball_membership(ball, v);
    CHECK(m.norm <= 1.0 + 1e-10);
    CHECK(m.round_trip <= 1e-10);
    if (tau == 1.0) CHECK(m.norm < 1e-15);
  }
  const CMatrix outside = ball.center + 2.0 * ball.left_radius * ball.right_radius;
  CHECK(ball_membership(ball, outside).norm > 1.0);
}

TEST_CASE("matrix ball properties on random nodes") {
  Rng rng(47);
  for (const SNode& node : random_nodes(rng, 10)) {
    for (const Complex z : testsupport::upper_grid(rng, 3)) {
      const MatrixBall ball = matrix_ball(node, z);
      const Index p = node.p;
      CHECK(ball.schur_residual() <= 1e-9);
      CHECK((ball.aleph.topLeftCorner(p, p) - ball.rho_reflected).norm() <= 1e-9 * (1.0 + ball.aleph.norm()));
      const CMatrix L2 = ball.left_radius * ball.left_radius;
      CHECK((L2 * (-ball.rho_reflected) - identity(p)).norm() <= 1e-9);
      const CMatrix R2 = ball.right_radius * ball.right_radius;
      CHECK((R2 * ball.rho_forward - identity(p)).norm() <= 1e-9);
      const CMatrix a = frame(node, z);
      for (int k = 0; k < 5; ++k) {
        const ParamPair pair = testsupport::random_constant_pair(rng, p);
        const BallMembership m = ball_membership(ball, lft(a, pair, z));
        CHECK(m.norm <= 1.0 + 1e-8);
        CHECK(m.round_trip <= 1e-10 * (1.0 + ball.center.norm()));
      }
      for (int k = 0; k < 5; ++k) {
        const CMatrix u = testsupport::random_contraction(rng, p, testsupport::uniform(rng, 0.0, 1.0));
        const CMatrix value = ball_value(ball, u);
        const auto [R, Q] = pullback_pair(a, value);
        CHECK(min_eigenvalue(R.adjoint() * Q + Q.adjoint() * R) >= -1e-9);
        CHECK((lft(a, R, Q) - value).norm() <= 1e-9 * (1.0 + value.norm()));
      }
    }
  }
}

TEST_CASE("extremal pair") {
  const SNode h = hankel_unit();
  const ParamPair pair = extremal_pair(h, kI);
  CHECK(std::abs(pair.R(0.0)(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(pair.Q(0.0)(0, 0) - 1.0) < 1e-15);
  const CMatrix a = frame(h, kI);
  const CMatrix F = block(a, 2, 1) * pair.R(0.0) + block(a, 2, 2) * pair.Q(0.0);
  CHECK(std::abs(F(0, 0) - 2.0) < 1e-15);
  StieltjesOptions so;
  so.on_axis = true;
  const MatrixFunction phi = weyl_function(h, pair);
  for (double t : {-3.0, 0.0, 1.5}) {
    CHECK(stieltjes_density(phi, t, so)(0, 0).real() ==
          doctest::Approx(1.0 / (std::numbers::pi * (1.0 + t * t))).epsilon(1e-12));
  }

  Rng rng(48);
  for (const SNode& node : random_nodes(rng, 10)) {
    const Complex lambda(testsupport::uniform(rng, -1, 1), testsupport::uniform(rng, 0.3, 1.5));
    const ParamPair ep = extremal_pair(node, lambda);
    const CMatrix R = ep.R(0.0);
    const CMatrix Q = ep.Q(0.0);
    const CMatrix r = rho(node, lambda);
    CHECK((R.adjoint() * Q + Q.adjoint() * R - r).norm() <= 1e-10 * (1.0 + r.norm()));
    const CMatrix al = frame(node, lambda);
    CHECK((block(al, 2, 1) * R + block(al, 2, 2) * Q - r).norm() <= 1e-10 * (1.0 + r.norm()));
  }
}
