#pragma once

// Block Toeplitz S-nodes, their Schur-type chain of Dirac coefficients C_k
// and contractions rho_k, and the frames of the discrete Dirac system.

#include <vector>

#include "snodelab/matcore.hpp"
#include "snodelab/snode.hpp"

namespace snodelab {

struct ToeplitzSpec {
  Index p = 1;
  Index n = 1;
  /// s_0, s_{-1}, ..., s_{1-n}; s_k = s_{-k}* fills the upper triangle.
  std::vector<CMatrix> s;
  CMatrix nu;

  /// Throws DimensionMismatch or NotHermitian.
  void validate() const;
  /// Block (i, j) of S(order) is s_{j-i}.
  CMatrix matrix(Index order) const;
  CMatrix matrix() const { return matrix(n); }
  /// Leading order-k truncation.
  ToeplitzSpec truncated(Index order) const;
};

SNode build_toeplitz_node(const ToeplitzSpec& spec);

struct DiracChain {
  Index p = 1;
  std::vector<CMatrix> C;
  std::vector<CMatrix> rho;
  /// t_k, X_k, Y_k for k = 1..n (index k-1); empty when built from rho alone.
  std::vector<CMatrix> t;
  std::vector<CMatrix> X;
  std::vector<CMatrix> Y;

  std::size_t length() const { return C.size(); }
  /// Chain of C_k, rho_k for k in [first, first + count).
  DiracChain slice(std::size_t first, std::size_t count) const;
};

/// Throws NotPositiveDefinite at the first order k with S(k) not > 0.
DiracChain toeplitz_chain(const ToeplitzSpec& spec);
/// C_k = halmos(rho_k).
DiracChain chain_from_verblunsky(const std::vector<CMatrix>& rho);

/// Factors w_1(lambda), ..., w_n(lambda); their product w_n ... w_1 is the
/// transfer matrix of the order-n node. Throws PoleAtLambda at lambda = i/2.
std::vector<CMatrix> factorize_transfer(const ToeplitzSpec& spec, Complex lambda);
/// w_n ... w_1.
CMatrix factor_product(const std::vector<CMatrix>& factors);

/// C = D F, D = diag((I - rho rho*)^{-1/2}, (I - rho* rho)^{-1/2}),
/// F = [[I, rho], [rho*, I]]. Throws NotContractive unless ||rho|| < 1.
CMatrix halmos(const CMatrix& rho);
/// rho = C11^{-1} C12.
CMatrix rho_from_C(const CMatrix& C);

/// W_k(z) with W_0 = I and W_{m+1} = (I + i z j C_m) W_m. Throws IndexOutOfRange.
CMatrix dirac_fundamental(const DiracChain& chain, Complex z, std::size_t k);

/// A_n(z) = (1 - iz/2)^{-n} J j K W_n(-conj(z)/2)* K* j J. Throws PoleAtZ at z = -2i.
CMatrix frame_toeplitz(const DiracChain& chain, std::size_t n, Complex z);
/// The same frame from the node: J j A(S, -z) j J with A(S, .) the generic frame.
CMatrix frame_toeplitz_node(const SNode& node, Complex z);

/// z -> lft(A_n(z), pair).
MatrixFunction toeplitz_weyl(const DiracChain& chain, std::size_t n, const ParamPair& pair);

struct TaylorOptions {
  double radius = 0.5;
  std::size_t nodes = 256;
  double agreement = 1e-8;
};

/// Taylor coefficients at 0 of g(zeta) = -i phi(2i(1 - zeta)/(1 + zeta)),
/// by the trapezoid rule on |zeta| = r; accepted when N and 2N agree.
/// Throws EvaluationFailure (phi not evaluable) or NotConverged.
std::vector<CMatrix> taylor_recover(const MatrixFunction& phi, std::size_t count,
                                    const TaylorOptions& options = {});

/// max over the grid of ||phi - i(A11 (-i phi~) + A12)(A21 (-i phi~) + A22)^{-1}||,
/// with A the frame of rho_0..rho_{n-1}, phi~ the Weyl function of the tail and
/// phi that of the whole chain. Throws SingularDenominator at a grid point.
double khrushchev_check(const std::vector<CMatrix>& rho, std::size_t split, const ParamPair& pair,
                        const std::vector<Complex>& zgrid);

}  // namespace snodelab
