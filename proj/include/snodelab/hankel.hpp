#pragma once

// Block Hankel S-nodes of the truncated Hamburger moment problem, the
// omega_k factorization chain and moment recovery from Weyl functions.

#include <vector>

#include "snodelab/density.hpp"
#include "snodelab/matcore.hpp"
#include "snodelab/snode.hpp"

namespace snodelab {

struct HankelSpec {
  Index p = 1;
  Index n = 1;
  /// H_0, ..., H_{2n-2}.
  std::vector<CMatrix> H;

  void validate() const;
  /// Block (i, j) of H(order) is H_{i+j} (0-based).
  CMatrix matrix(Index order) const;
  CMatrix matrix() const { return matrix(n); }
  HankelSpec truncated(Index order) const;
};

/// A = block down-shift, Phi2 = [I; 0; ...], Phi1 = -i (0, H_0, ..., H_{n-2}).
SNode build_hankel_node(const HankelSpec& spec);

struct OmegaChain {
  Index p = 1;
  /// omega_k, k = 0..n-1 (p x 2p).
  std::vector<CMatrix> omega;
  /// t_r, r = 1..n (index r-1).
  std::vector<CMatrix> t;

  /// w_{k+1}(lambda) = I + (i/lambda) J omega_k* t_{k+1}^{-1} omega_k.
  CMatrix factor(std::size_t k, Complex lambda) const;
  /// w_n ... w_1.
  CMatrix product(Complex lambda) const;
  /// max ||omega_k J omega_k*||.
  double null_residual() const;
  /// max ||i omega_k J omega_{k-1}* - t_{k+1}||.
  double link_residual() const;
};

/// Throws NotPositiveDefinite at the first order k with H(k) not > 0.
OmegaChain hankel_chain(const HankelSpec& spec);

struct MomentQuadrature {
  std::size_t nodes = 256;
  std::size_t max_nodes = 8192;
  double agreement = 1e-8;
};

/// int t^k P(t) dt, split at breakpoints; each piece uses Gauss-Legendre
/// (finite) or t = a +- tan^2 (half-line). Doubles nodes until consecutive
/// results agree. Throws QuadratureNotConverged.
CMatrix moments_from_density(const DensityFn& density, int k, const MomentQuadrature& q = {});

struct MomentRecovery {
  /// Laurent route, H_0 .. H_{2n-3}.
  std::vector<CMatrix> laurent;
  /// Stieltjes-inversion route, H_0 .. H_{2n-2} (last entry is int t^{2n-2} d mu).
  std::vector<CMatrix> quadrature;
  double radius = 0.0;
  /// Relative change of the Laurent fit between radius R and 2R.
  double laurent_drift = 0.0;
  /// max eigenvalue of int t^{2n-2} d mu - H_{2n-2}.
  double top_excess = 0.0;
  /// max relative error of either route against the node's H_k, k <= 2n-3.
  double max_error = 0.0;
};

struct RecoveryOptions {
  std::size_t quad_nodes = 2048;
  std::size_t arc_points = 128;
  int extra_terms = 8;
  double laurent_agreement = 1e-5;
};

/// Moments of the Weyl function produced by the pair from the Hankel node's
/// frame. Throws ExtractionNotConverged or InvalidPair.
MomentRecovery recover_moments(const HankelSpec& spec, const ParamPair& pair,
                               const RecoveryOptions& options = {});

}  // namespace snodelab
