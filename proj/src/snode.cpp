#include "snodelab/snode.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "snodelab/quadrature.hpp"

namespace snodelab {

CMatrix SNode::Pi() const {
  CMatrix pi(Phi1.rows(), 2 * p);
  pi << Phi1, Phi2;
  return pi;
}

void SNode::validate() const {
  const Index m = A.rows();
  if (p <= 0 || A.cols() != m || S.rows() != m || S.cols() != m || Phi1.rows() != m ||
      Phi2.rows() != m || Phi1.cols() != p || Phi2.cols() != p) {
    std::ostringstream msg;
    msg << "node shapes: A " << A.rows() << "x" << A.cols() << ", S " << S.rows() << "x"
        << S.cols() << ", Phi1 " << Phi1.rows() << "x" << Phi1.cols() << ", Phi2 "
        << Phi2.rows() << "x" << Phi2.cols() << ", p = " << p;
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  assert_hermitian(S);
}

CMatrix identity_defect(const SNode& node) {
  node.validate();
  const CMatrix pi = node.Pi();
  return node.A * node.S - node.S * node.A.adjoint() - kI * pi * signature_J(node.p) * pi.adjoint();
}

double verify_identity(const SNode& node) {
  return identity_defect(node).norm() / (1.0 + node.S.norm());
}

namespace {

CMatrix s_solve(const SNode& node, const CMatrix& rhs) {
  return solve_checked(node.S, rhs, ErrorKind::NotPositiveDefinite);
}

// Resolvents of large |z| are legitimately ill-conditioned (nilpotent A gives
// condition numbers growing like |z|^{n-1}), so only exact singularity counts.
constexpr double kResolventRcond = 1e-300;

// (I - z A*)^{-1} rhs.
CMatrix resolvent_star(const SNode& node, Complex z, const CMatrix& rhs) {
  const CMatrix m = identity(node.dim()) - z * node.A.adjoint();
  try {
    return solve_checked(m, rhs, ErrorKind::SingularResolvent, kResolventRcond);
  } catch (Error& e) {
    throw e.at_point(z);
  }
}

// (I - z A)^{-1} rhs.
CMatrix resolvent(const SNode& node, Complex z, const CMatrix& rhs) {
  const CMatrix m = identity(node.dim()) - z * node.A;
  try {
    return solve_checked(m, rhs, ErrorKind::SingularResolvent, kResolventRcond);
  } catch (Error& e) {
    throw e.at_point(z);
  }
}

void require_upper(Complex z) {
  if (!(z.imag() > 0.0)) {
    throw Error(ErrorKind::NotInUpperHalfPlane, "point must satisfy Im z > 0").at_point(z);
  }
}

}  // namespace

CMatrix transfer_matrix(const SNode& node, Complex lambda) {
  node.validate();
  const CMatrix pi = node.Pi();
  const CMatrix shifted = node.A - lambda * identity(node.dim());
  CMatrix res;
  try {
    res = solve_checked(shifted, pi, ErrorKind::PoleAtLambda);
  } catch (Error& e) {
    throw e.at_point(lambda);
  }
  return identity(2 * node.p) - kI * signature_J(node.p) * pi.adjoint() * s_solve(node, res);
}

CMatrix frame(const SNode& node, Complex z) {
  node.validate();
  const CMatrix pi = node.Pi();
  const CMatrix J = signature_J(node.p);
  const CMatrix inner = resolvent_star(node, z, s_solve(node, pi * J));
  return identity(2 * node.p) - kI * z * pi.adjoint() * inner;
}

CMatrix frame_via_transfer(const SNode& node, Complex z) {
  if (z == Complex(0.0)) return identity(2 * node.p);
  return transfer_matrix(node, 1.0 / std::conj(z)).adjoint();
}

CMatrix block(const CMatrix& m, int i, int j) {
  const Index p = m.rows() / 2;
  return m.block((i - 1) * p, (j - 1) * p, p, p);
}

CMatrix rho(const SNode& node, Complex z, Orientation orientation) {
  require_upper(z);
  node.validate();
  if (orientation == Orientation::Forward) {
    const CMatrix v = resolvent(node, std::conj(z), node.Phi2);
    return hermitian_part(2.0 * z.imag() * v.adjoint() * s_solve(node, v));
  }
  const CMatrix u = resolvent(node, z, node.Phi2);
  return hermitian_part(-2.0 * z.imag() * u.adjoint() * s_solve(node, u));
}

ParamPair ParamPair::constant_pair(const CMatrix& r, const CMatrix& q) {
  ParamPair pair;
  pair.R = [r](Complex) { return r; };
  pair.Q = [q](Complex) { return q; };
  pair.constant = true;
  return pair;
}

void validate_pair_at(const CMatrix& r, const CMatrix& q, double tol) {
  if (r.rows() != q.rows() || r.cols() != q.cols() || r.rows() != r.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "pair blocks must be square and of equal size");
  }
  const CMatrix gram = r.adjoint() * r + q.adjoint() * q;
  const double floor = 1e-12 * (1.0 + max_abs(gram));
  const double nondeg = min_eigenvalue(gram);
  if (!(nondeg > floor)) {
    throw Error(ErrorKind::InvalidPair, "R*R + Q*Q is not positive definite").with_value(nondeg);
  }
  const double jform = min_eigenvalue(r.adjoint() * q + q.adjoint() * r);
  if (!(jform >= -tol)) {
    throw Error(ErrorKind::InvalidPair, "R*Q + Q*R has a negative eigenvalue").with_value(jform);
  }
}

PairValidation validate_pair(const ParamPair& pair, double tol) {
  PairValidation out;
  out.min_nondegeneracy = std::numeric_limits<double>::infinity();
  out.min_j_form = std::numeric_limits<double>::infinity();
  for (double y : {0.5, 2.0}) {
    for (int k = 0; k < 16; ++k) {
      const Complex z(-7.5 + static_cast<double>(k), y);
      CMatrix r, q;
      try {
        r = pair.R(z);
        q = pair.Q(z);
      } catch (const Error&) {
        continue;
      }
      if (!r.allFinite() || !q.allFinite()) continue;
      ++out.points_checked;
      const double nondeg = min_eigenvalue(r.adjoint() * r + q.adjoint() * q);
      const double jform = min_eigenvalue(r.adjoint() * q + q.adjoint() * r);
      out.min_nondegeneracy = std::min(out.min_nondegeneracy, nondeg);
      out.min_j_form = std::min(out.min_j_form, jform);
      if (!(nondeg > 1e-12) || !(jform >= -tol)) out.valid = false;
    }
  }
  if (out.points_checked == 0) out.valid = false;
  return out;
}

CMatrix lft(const CMatrix& frame_value, const CMatrix& r, const CMatrix& q) {
  const CMatrix num = block(frame_value, 1, 1) * r + block(frame_value, 1, 2) * q;
  const CMatrix den = block(frame_value, 2, 1) * r + block(frame_value, 2, 2) * q;
  // phi = i num den^{-1}, solved as den^T X^T = num^T.
  const CMatrix xt = solve_checked(den.transpose(), num.transpose(), ErrorKind::SingularDenominator);
  return kI * xt.transpose();
}

CMatrix lft(const CMatrix& frame_value, const ParamPair& pair, Complex z) {
  const CMatrix r = pair.R(z);
  const CMatrix q = pair.Q(z);
  try {
    validate_pair_at(r, q);
    return lft(frame_value, r, q);
  } catch (Error& e) {
    throw e.at_point(z);
  }
}

MatrixFunction weyl_function(const SNode& node, const ParamPair& pair) {
  node.validate();
  return [node, pair](Complex z) { return lft(frame(node, z), pair, z); };
}

std::pair<CMatrix, CMatrix> pullback_pair(const CMatrix& frame_value, const CMatrix& phi) {
  const Index p = phi.rows();
  CMatrix rhs(2 * p, p);
  rhs << -kI * phi, identity(p);
  const CMatrix rq = solve_checked(frame_value, rhs, ErrorKind::SingularResolvent);
  return {rq.topRows(p), rq.bottomRows(p)};
}

CMatrix lft_density_on_axis(const CMatrix& frame_value, const CMatrix& r, const CMatrix& q) {
  const CMatrix den = block(frame_value, 2, 1) * r + block(frame_value, 2, 2) * q;
  const CMatrix inv = inverse_checked(den, ErrorKind::SingularDenominator);
  const CMatrix middle = r.adjoint() * q + q.adjoint() * r;
  return hermitian_part(inv.adjoint() * middle * inv / (2.0 * std::numbers::pi));
}

namespace {

CMatrix density_at(const MatrixFunction& phi, Complex z) {
  const CMatrix v = phi(z);
  return hermitian_part((v - v.adjoint()) / (2.0 * std::numbers::pi * kI));
}

}  // namespace

CMatrix stieltjes_density(const MatrixFunction& phi, double t, const StieltjesOptions& options) {
  if (options.on_axis) return density_at(phi, Complex(t, 0.0));
  const auto& eps = options.eps_ladder;
  if (eps.size() < 2) {
    return density_at(phi, Complex(t, eps.empty() ? 1e-6 : eps.front()));
  }
  std::vector<CMatrix> samples;
  samples.reserve(eps.size());
  for (double e : eps) samples.push_back(density_at(phi, Complex(t, e)));
  // Linear Richardson in eps between consecutive ladder entries.
  std::vector<CMatrix> extrapolated;
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    const double e1 = eps[k];
    const double e2 = eps[k + 1];
    extrapolated.push_back((e1 * samples[k + 1] - e2 * samples[k]) / (e1 - e2));
  }
  const CMatrix& best = extrapolated.back();
  if (extrapolated.size() >= 2) {
    const double drift = (best - extrapolated[extrapolated.size() - 2]).norm();
    const double scale = std::max(best.norm(), 1e-6);
    if (!(drift <= options.acceptance * scale + 1e-12)) {
      throw Error(ErrorKind::NotConverged, "Stieltjes extrapolation drifts")
          .at_point(Complex(t, 0.0))
          .with_value(drift / scale);
    }
  }
  return hermitian_part(best);
}

HerglotzParams herglotz_params(const MatrixFunction& phi) {
  const double etas[3] = {1e2, 1e3, 1e4};
  CMatrix g[3];
  for (int k = 0; k < 3; ++k) {
    const CMatrix v = phi(Complex(0.0, etas[k]));
    g[k] = hermitian_part((v - v.adjoint()) / (2.0 * kI * etas[k]));
  }
  // g(eta) = gamma + a/eta + b/eta^2 through three samples (x = 1/eta).
  const double x0 = 1.0 / etas[0], x1 = 1.0 / etas[1], x2 = 1.0 / etas[2];
  const double l0 = x1 * x2 / ((x0 - x1) * (x0 - x2));
  const double l1 = x0 * x2 / ((x1 - x0) * (x1 - x2));
  const double l2 = x0 * x1 / ((x2 - x0) * (x2 - x1));
  const CMatrix quadratic = l0 * g[0] + l1 * g[1] + l2 * g[2];
  const CMatrix linear = (x1 * g[2] - x2 * g[1]) / (x1 - x2);
  const double drift = (quadratic - linear).norm();
  if (!(drift <= 1e-4 * (1.0 + quadratic.norm()))) {
    throw Error(ErrorKind::NotConverged, "linear-term estimate is unstable").with_value(drift);
  }
  HerglotzParams out;
  out.gamma = hermitian_part(quadratic);
  const CMatrix at_i = phi(kI);
  out.theta = hermitian_part(0.5 * (at_i + at_i.adjoint()));
  return out;
}

MeasureGrid measure_grid(const MatrixFunction& phi, std::size_t n, const StieltjesOptions& options) {
  return measure_grid([&](double t) { return stieltjes_density(phi, t, options); }, n);
}

MeasureGrid measure_grid(const std::function<CMatrix(double)>& density, std::size_t n) {
  const quad::Rule rule = quad::gauss_legendre(n, -std::numbers::pi / 2, std::numbers::pi / 2);
  MeasureGrid grid;
  grid.nodes.reserve(n);
  grid.weights.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = rule.nodes[j];
    const double c = std::cos(theta);
    const double t = std::tan(theta);
    grid.nodes.push_back(t);
    grid.weights.push_back((rule.weights[j] / (c * c)) * density(t));
  }
  return grid;
}

InterpResidual interp_residual(const SNode& node, const CMatrix& gamma, const CMatrix& theta,
                               const MeasureGrid& mu) {
  node.validate();
  const Index m = node.dim();
  Eigen::FullPivLU<CMatrix> lu(node.A);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::Unsupported, "zero is an eigenvalue of A");
  }
  CMatrix s_mu = zeros(m, m);
  CMatrix phi_mu = zeros(m, node.p);
  for (std::size_t j = 0; j < mu.nodes.size(); ++j) {
    const double t = mu.nodes[j];
    const CMatrix v = resolvent(node, t, node.Phi2);
    s_mu += v * mu.weights[j] * v.adjoint();
    const CMatrix kernel = node.A * v + (t / (1.0 + t * t)) * node.Phi2;
    phi_mu += -kI * kernel * mu.weights[j];
  }
  const CMatrix root = sqrtm_psd(gamma);
  const CMatrix F = lu.solve(node.Phi2 * root);
  InterpResidual out;
  out.S_tilde = s_mu + F * F.adjoint();
  out.Phi1_tilde = phi_mu + kI * (node.Phi2 * theta + F * root);
  out.s_residual = (node.S - out.S_tilde).norm();
  out.phi1_residual = (node.Phi1 - out.Phi1_tilde).norm();
  return out;
}

double MatrixBall::schur_residual() const {
  const Index p = center.rows();
  const CMatrix a11 = aleph.topLeftCorner(p, p);
  const CMatrix a12 = aleph.topRightCorner(p, p);
  const CMatrix a21 = aleph.bottomLeftCorner(p, p);
  const CMatrix a22 = aleph.bottomRightCorner(p, p);
  const CMatrix schur = a22 - a21 * solve_checked(a11, a12, ErrorKind::SingularResolvent);
  const CMatrix target = inverse_checked(rho_forward, ErrorKind::NotPositiveDefinite);
  return (schur - target).norm() / (1.0 + aleph.norm());
}

MatrixBall matrix_ball(const SNode& node, Complex z) {
  require_upper(z);
  const Index p = node.p;
  const CMatrix J = signature_J(p);
  const CMatrix inv = J * frame(node, std::conj(z)).adjoint() * J;
  MatrixBall ball;
  ball.z = z;
  ball.aleph = hermitian_part(inv.adjoint() * J * inv);
  ball.rho_forward = rho(node, z, Orientation::Forward);
  ball.rho_reflected = rho(node, z, Orientation::Reflected);
  const HermPD neg_reflected(-ball.rho_reflected);
  const HermPD forward(ball.rho_forward);
  ball.center = kI * neg_reflected.solve(ball.aleph.topRightCorner(p, p));
  ball.left_radius = inv_sqrtm_hpd(neg_reflected);
  ball.right_radius = inv_sqrtm_hpd(forward);
  return ball;
}

CMatrix ball_value(const MatrixBall& ball, const CMatrix& u) {
  return ball.center - ball.left_radius * u * ball.right_radius;
}

BallMembership ball_membership(const MatrixBall& ball, const CMatrix& value) {
  const Index p = ball.center.rows();
  const HermPD neg_reflected(-ball.rho_reflected);
  const HermPD forward(ball.rho_forward);
  BallMembership out;
  out.u = inv_sqrtm_hpd(neg_reflected) *
          (ball.rho_reflected * value + kI * ball.aleph.topRightCorner(p, p)) *
          sqrtm_hpd(forward);
  out.norm = spectral_norm(out.u);
  out.round_trip = (ball_value(ball, out.u) - value).norm();
  return out;
}

ParamPair extremal_pair(const SNode& node, Complex lambda) {
  const CMatrix f = frame(node, lambda);
  return ParamPair::constant_pair(block(f, 2, 2).adjoint(), block(f, 2, 1).adjoint());
}

}  // namespace snodelab
