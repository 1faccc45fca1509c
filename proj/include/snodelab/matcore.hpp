#pragma once

// Dense complex matrix kernel shared by every other module.
//
// Matrices are small (a few dozen rows at most), so everything here favours
// determinism over speed: Cholesky for positive-definiteness certificates,
// Hermitian eigendecomposition for square roots, pivoted LU for general solves.

#include <Eigen/Dense>

#include <complex>
#include <functional>

#include "snodelab/error.hpp"

namespace snodelab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// z -> p x p matrix; Weyl functions, pair components, densities on C.
using MatrixFunction = std::function<CMatrix(Complex)>;

inline constexpr Complex kI{0.0, 1.0};

CMatrix identity(Index n);
CMatrix zeros(Index rows, Index cols);

/// J = [[0, I], [I, 0]] (2p x 2p).
CMatrix signature_J(Index p);
/// j = diag(I, -I) (2p x 2p).
CMatrix signature_j(Index p);
/// K = (1/sqrt 2) [[I, -I], [I, I]]; unitary with K* J K = j.
CMatrix unitary_K(Index p);

double max_abs(const CMatrix& m);
double spectral_norm(const CMatrix& m);

/// Default Hermitian tolerance: 1e-10 * (1 + max|M_ij|).
double hermitian_tolerance(const CMatrix& m);

/// Throws NotHermitian (value = max deviation) unless max|M - M*| <= tol.
void assert_hermitian(const CMatrix& m, double tol);
void assert_hermitian(const CMatrix& m);

CMatrix hermitian_part(const CMatrix& m);

/// Eigenvalues (ascending) of the Hermitian part of m.
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m);
double min_eigenvalue(const CMatrix& m);
double max_eigenvalue(const CMatrix& m);

/// A Hermitian matrix together with a Cholesky factor proving M > 0.
class HermPD {
 public:
  /// Throws NotHermitian or NotPositiveDefinite.
  explicit HermPD(const CMatrix& m);

  const CMatrix& matrix() const noexcept { return matrix_; }
  /// Lower-triangular L with L L* = M.
  CMatrix factor() const;
  Index size() const noexcept { return matrix_.rows(); }

  CMatrix solve(const CMatrix& rhs) const;
  CMatrix inverse() const;
  double determinant() const;
  double log_determinant() const;

 private:
  CMatrix matrix_;
  Eigen::LLT<CMatrix> llt_;
};

HermPD cholesky_pd(const CMatrix& m);

/// Hermitian R > 0 with R^2 = M.
CMatrix sqrtm_hpd(const HermPD& m);
/// M^{-1/2}.
CMatrix inv_sqrtm_hpd(const HermPD& m);
/// Square root of a positive semidefinite matrix; eigenvalues below zero
/// (rounding noise) are clipped.
CMatrix sqrtm_psd(const CMatrix& m);

/// Solves M X = B by partial-pivot LU; throws `on_singular` when the
/// reciprocal condition estimate is at or below `min_rcond`, or the solution
/// is not finite.
CMatrix solve_checked(const CMatrix& m, const CMatrix& b, ErrorKind on_singular,
                      double min_rcond = 1e-14);
CMatrix inverse_checked(const CMatrix& m, ErrorKind on_singular);

Complex determinant(const CMatrix& m);

/// Spectral-norm condition number of a Hermitian positive matrix.
double condition_number_hpd(const CMatrix& m);

/// ||a - b||_F / max(1, ||b||_F).
double relative_difference(const CMatrix& a, const CMatrix& b);

}  // namespace snodelab
