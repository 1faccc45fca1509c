#pragma once

// Nested families of S-nodes, monotone rho_k trajectories, frame quotients
// across nesting, entropy integrals and outer moduli of densities, the
// entropy bound for Weyl functions, and a few determinant lemmas.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snodelab/density.hpp"
#include "snodelab/hankel.hpp"
#include "snodelab/snode.hpp"
#include "snodelab/toeplitz.hpp"

namespace snodelab {

/// Nodes of increasing order. Node k sits inside node r > k as the leading
/// dim_k coordinates (P_k = [I 0]).
struct NodeSequence {
  std::string family;
  std::vector<SNode> nodes;

  std::size_t size() const { return nodes.size(); }
};

/// Orders 1..spec.n.
NodeSequence toeplitz_sequence(const ToeplitzSpec& spec);
NodeSequence hankel_sequence(const HankelSpec& spec);
/// Scalar Hankel data H_0..H_{2n-2} from the moments of a density.
HankelSpec hankel_from_density(const DensityFn& density, Index n, const MomentQuadrature& q = {});

/// Max over r > k of the residuals of A_k = P A_r P*, S_k = P S_r P*,
/// Pi_k = P Pi_r and P A_r P_perp* = 0.
double nested_embed_check(const NodeSequence& seq);

struct RhoTrajectory {
  Complex z;
  /// rho_k(z, conj z).
  std::vector<CMatrix> forward;
  /// rho_k(conj z, z).
  std::vector<CMatrix> reflected;
  /// min_k min eig(rho_{k+1}(z, conj z) - rho_k(z, conj z)); +inf for one node.
  double forward_step = 0.0;
  /// min_k min eig(rho_k(conj z, z) - rho_{k+1}(conj z, z)).
  double reflected_step = 0.0;

  bool monotone(double tol = 1e-9) const { return forward_step >= -tol && reflected_step >= -tol; }
};

RhoTrajectory rho_trajectory(const NodeSequence& seq, Complex z);

struct FrameQuotient {
  /// {A22, T22^{-1}, T22^{-1} P_perp S_r^{-1} Pi_r}; empty when k = r.
  SNode node;
  CMatrix value;
  /// ||A(S_r, z) - A(S_k, z) value||_F.
  double product_residual = 0.0;
  /// min eig(value J value* - J), z in C+.
  double expansion = 0.0;
};

/// k < r index into seq.nodes.
FrameQuotient frame_quotient(const NodeSequence& seq, std::size_t k, std::size_t r, Complex z);

struct EntropyOptions {
  /// Integration stops at |t| = cutoff; the dropped tail is O(ln(cutoff) / cutoff).
  double cutoff = 1e12;
  double agreement = 1e-7;
  /// Grid for detecting det P = 0 on a set of positive measure.
  std::size_t scan_nodes = 1024;
};

struct EntropyValue {
  double value = 0.0;
  bool minus_infinity = false;
  double error = 0.0;
};

/// int_a^b f(t) ln det P(t) dt / (1 + t^2). Tanh-sinh on [-1, 1] in t and on
/// |t| > 1 in s = 1/t, split at breakpoints. f defaults to 1. Throws
/// QuadratureNotConverged when successive tanh-sinh levels disagree.
EntropyValue entropy_integral(const DensityFn& P, const std::function<double(double)>& f = {},
                              double a = -std::numeric_limits<double>::infinity(),
                              double b = std::numeric_limits<double>::infinity(),
                              const EntropyOptions& options = {});

/// int Im(lambda) / |t - lambda|^2 dt through the same quadrature path (= pi).
double poisson_normalization(Complex lambda, const EntropyOptions& options = {});

/// |det G(lambda)| = exp[(1/2pi) int Im(lambda) ln det P(t) / |t - lambda|^2 dt].
/// Throws SzegoViolated when the log-integral is -inf.
double outer_modulus(const DensityFn& P, Complex lambda, const EntropyOptions& options = {});

/// G(z) = (2 pi)^{-1/2} rho(lambda, conj lambda)^{1/2} F(z)^{-1},
/// F(z) = A21(z) R + A22(z) Q for the extremal pair at lambda. z may be real.
/// Throws SingularF.
CMatrix gmu_extremal(const SNode& node, Complex lambda, Complex z);

/// mu' of the Weyl function of a constant pair, from the frame on the real line.
DensityFn weyl_density(const SNode& node, const CMatrix& r, const CMatrix& q);

/// Throws HypothesisViolated unless every eigenvalue of A is 0 or lies in C-,
/// i.e. unless I - zA is invertible on the closed lower half-plane.
void require_entropy_hypothesis(const SNode& node);

struct EntropyBound {
  CMatrix lhs;
  CMatrix rhs;
  /// min eig(rhs - lhs).
  double slack = 0.0;
  bool holds = false;
  bool equality = false;
};

/// lhs = 2 pi G(lambda)* G(lambda), rhs = rho(lambda, conj lambda)^{-1}.
/// p = 1: any constant pair, G from outer_modulus of the pair's mu'.
/// p > 1: the extremal pair only (else Unsupported).
EntropyBound entropy_bound_check(const SNode& node, const CMatrix& r, const CMatrix& q,
                                 Complex lambda, double tol = 1e-6);

struct TrajectoryRow {
  std::size_t k = 0;
  CMatrix rho_inv;
  double det_rho_inv = 0.0;
  std::optional<double> target;
  std::optional<double> gap;
  double cond = 0.0;
};

struct TrajectoryReport {
  Index p = 1;
  Complex lambda;
  std::vector<TrajectoryRow> rows;
  bool monotone = false;
  bool det_positive = false;
  /// Szegő integral of the reference density is -inf.
  bool szego_minus_infinity = false;
  bool gap_decreasing = false;
  bool strictly_decreasing = false;
};

/// rho_k(lambda, conj lambda)^{-1} along the sequence, and for p = 1 with a
/// Szegő-finite reference the gap to 2 pi |G(lambda)|^2.
TrajectoryReport convergence_run(const NodeSequence& seq, Complex lambda,
                                 const std::optional<DensityFn>& reference = std::nullopt);

/// det(A + B) > det(A) (1 + margin) for B != 0; det(A + B) == det(A) for B == 0.
bool det_strict_lemma(const CMatrix& A, const CMatrix& B, double margin = 1e-12);

/// det(B1 + B2)^{1/p} - det(B1)^{1/p} - det(B2)^{1/p}.
double minkowski_det_gap(const CMatrix& B1, const CMatrix& B2);

struct GrowthSample {
  double r = 0.0;
  /// Sampled sup of ||(I - zA)^{-1}|| over r0 < |z| <= r (a lower bound).
  double M = 0.0;
  double log_ratio = 0.0;
};

struct ResolventGrowth {
  std::vector<GrowthSample> samples;
  double kappa = 0.5;
  /// Last log M / r^kappa does not exceed the max over the first half of the grid.
  bool appears_bounded = false;
};

/// 64 angles per ring. upper_only restricts to Im z > 0. Throws SingularOnGrid.
ResolventGrowth resolvent_growth(const SNode& node, const std::vector<double>& r_grid,
                                 bool upper_only = false, std::size_t angles = 64);

struct LimitDemo {
  std::vector<int> ks;
  /// int_a^b f ln det P_k / (1 + t^2) for each k.
  std::vector<double> lhs;
  double limsup = 0.0;
  /// Same integral for the density recovered from the cumulative integrals.
  double rhs = 0.0;
  /// Max deviation of the recovered density from the reference limit.
  double limit_error = 0.0;
  bool holds = false;
};

/// P(k, t) is a scalar density sequence; `limit` is the expected weak limit
/// used only to report limit_error.
LimitDemo limit_inequality_demo(const std::function<double(int, double)>& P, const std::vector<int>& ks,
                                const std::function<double(double)>& f, double a, double b,
                                const std::function<double(double)>& limit);

}  // namespace snodelab
