#pragma once

// Generic finite symmetric S-nodes {A, S, Pi = [Phi1 Phi2]} with
// A S - S A* = i Pi J Pi*, their transfer functions and frames, the
// linear-fractional family of Weyl functions they generate, and the
// matrix-ball description of that family at a point.

#include <optional>
#include <vector>

#include "snodelab/matcore.hpp"

namespace snodelab {

struct SNode {
  Index p = 0;
  CMatrix A;
  CMatrix S;
  CMatrix Phi1;
  CMatrix Phi2;

  Index dim() const { return A.rows(); }
  /// [Phi1 Phi2], dim x 2p.
  CMatrix Pi() const;
  /// Throws DimensionMismatch on inconsistent shapes, NotHermitian if S != S*.
  void validate() const;
};

/// A S - S A* - i Pi J Pi*.
CMatrix identity_defect(const SNode& node);
/// ||A S - S A* - i Pi J Pi*||_F / (1 + ||S||_F).
double verify_identity(const SNode& node);

/// Transfer function w_A(lambda) = I - i J Pi* S^{-1} (A - lambda I)^{-1} Pi.
/// Throws PoleAtLambda when lambda is an eigenvalue of A.
CMatrix transfer_matrix(const SNode& node, Complex lambda);

/// Frame A(S, z) = I - i z Pi* (I - z A*)^{-1} S^{-1} Pi J, i.e. w_A(1/conj z)*.
/// Throws SingularResolvent when I - z A* is singular.
CMatrix frame(const SNode& node, Complex z);
/// The same frame computed as w_A(1/conj z)*; z must be nonzero.
CMatrix frame_via_transfer(const SNode& node, Complex z);

/// p x p block (i, j), i, j in {1, 2}, of a 2p x 2p matrix.
CMatrix block(const CMatrix& m, int i, int j);

enum class Orientation {
  /// rho(z, conj z) > 0 for z in C+.
  Forward,
  /// rho(conj z, z) < 0 for z in C+.
  Reflected,
};

/// rho(z, conj z) (Forward) or rho(conj z, z) (Reflected) for z in C+.
CMatrix rho(const SNode& node, Complex z, Orientation orientation = Orientation::Forward);

/// Parameter pair {R(z), Q(z)} of the linear-fractional family.
struct ParamPair {
  MatrixFunction R;
  MatrixFunction Q;
  /// Constant pairs give Weyl functions continuous up to the real axis.
  bool constant = false;

  static ParamPair constant_pair(const CMatrix& r, const CMatrix& q);
};

/// Checks R*R + Q*Q > 0 and R*Q + Q*R >= -tol at one point; throws InvalidPair.
void validate_pair_at(const CMatrix& r, const CMatrix& q, double tol = 1e-9);

struct PairValidation {
  bool valid = true;
  double min_nondegeneracy = 0.0;
  double min_j_form = 0.0;
  std::size_t points_checked = 0;
};

/// Validates a pair on 32 points along Im z = 0.5 and Im z = 2. Points where
/// R or Q cannot be evaluated are skipped.
PairValidation validate_pair(const ParamPair& pair, double tol = 1e-9);

/// phi = i (A11 R + A12 Q)(A21 R + A22 Q)^{-1}. Throws SingularDenominator.
CMatrix lft(const CMatrix& frame_value, const CMatrix& r, const CMatrix& q);
/// Validates the pair at z first (InvalidPair), then applies lft.
CMatrix lft(const CMatrix& frame_value, const ParamPair& pair, Complex z);

/// z -> lft(frame(node, z), pair at z).
MatrixFunction weyl_function(const SNode& node, const ParamPair& pair);

/// Inverse of a linear-fractional map: [R; Q] = frame^{-1} [-i phi; I].
std::pair<CMatrix, CMatrix> pullback_pair(const CMatrix& frame_value, const CMatrix& phi);

struct StieltjesOptions {
  /// Evaluate directly on the real axis (valid when phi is continuous there).
  bool on_axis = false;
  std::vector<double> eps_ladder{1e-4, 1e-5, 1e-6};
  double acceptance = 1e-6;
};

/// Density of the Herglotz measure, (phi(t + i eps) - phi(t + i eps)*) / (2 pi i),
/// Richardson-extrapolated along the eps ladder. Throws NotConverged.
CMatrix stieltjes_density(const MatrixFunction& phi, double t, const StieltjesOptions& options = {});

struct HerglotzParams {
  CMatrix gamma;
  CMatrix theta;
};

/// gamma = lim Im phi(i eta) / eta (Richardson over eta = 1e2, 1e3, 1e4) and
/// theta = Re phi(i). The Herglotz kernel at z = i equals i/(1+t^2), so the
/// real part of phi(i) is exactly theta. Throws NotConverged.
HerglotzParams herglotz_params(const MatrixFunction& phi);

/// Discrete measure: d mu ~ sum_j weights[j] delta(t - nodes[j]).
struct MeasureGrid {
  std::vector<double> nodes;
  std::vector<CMatrix> weights;
};

/// Absolutely continuous part of the Herglotz measure of phi sampled on the
/// tan-folded Gauss-Legendre grid with n nodes.
MeasureGrid measure_grid(const MatrixFunction& phi, std::size_t n, const StieltjesOptions& options);
/// Same grid for an already known density t -> mu'(t).
MeasureGrid measure_grid(const std::function<CMatrix(double)>& density, std::size_t n);

/// mu'(t) of phi = lft(frame, r, q) at a real point where the frame is J-unitary:
/// D^{-*} (r* q + q* r) D^{-1} / (2 pi), D = frame_21 r + frame_22 q.
/// Avoids the cancellation in Im phi when |t| is large.
CMatrix lft_density_on_axis(const CMatrix& frame_value, const CMatrix& r, const CMatrix& q);

struct InterpResidual {
  double s_residual = 0.0;
  double phi1_residual = 0.0;
  CMatrix S_tilde;
  CMatrix Phi1_tilde;
};

/// Rebuilds S and Phi1 from (gamma, theta, mu). Unsupported when A is singular.
InterpResidual interp_residual(const SNode& node, const CMatrix& gamma, const CMatrix& theta,
                               const MeasureGrid& mu);

struct MatrixBall {
  Complex z;
  CMatrix center;
  CMatrix left_radius;
  CMatrix right_radius;
  /// rho(z, conj z) > 0.
  CMatrix rho_forward;
  /// rho(conj z, z) < 0.
  CMatrix rho_reflected;
  /// (frame^{-1})* J frame^{-1}.
  CMatrix aleph;

  /// ||aleph22 - aleph21 aleph11^{-1} aleph12 - rho(z, conj z)^{-1}|| / (1 + ||aleph||).
  /// The Schur complement cancels down from the scale of aleph.
  double schur_residual() const;
};

MatrixBall matrix_ball(const SNode& node, Complex z);

/// center - L u R.
CMatrix ball_value(const MatrixBall& ball, const CMatrix& u);

struct BallMembership {
  CMatrix u;
  double norm = 0.0;
  /// ||ball_value(u) - value||_F.
  double round_trip = 0.0;
};

BallMembership ball_membership(const MatrixBall& ball, const CMatrix& value);

/// Constant pair R = A22(lambda)*, Q = A21(lambda)*; attains equality in the
/// entropy bound at lambda.
ParamPair extremal_pair(const SNode& node, Complex lambda);

}  // namespace snodelab
