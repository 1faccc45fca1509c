#include "snodelab/matcore.hpp"

#include <cmath>
#include <sstream>

namespace snodelab {

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

CMatrix zeros(Index rows, Index cols) { return CMatrix::Zero(rows, cols); }

CMatrix signature_J(Index p) {
  CMatrix J = zeros(2 * p, 2 * p);
  J.topRightCorner(p, p) = identity(p);
  J.bottomLeftCorner(p, p) = identity(p);
  return J;
}

CMatrix signature_j(Index p) {
  CMatrix j = identity(2 * p);
  j.bottomRightCorner(p, p) *= -1.0;
  return j;
}

CMatrix unitary_K(Index p) {
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix K(2 * p, 2 * p);
  K.topLeftCorner(p, p) = s * identity(p);
  K.topRightCorner(p, p) = -s * identity(p);
  K.bottomLeftCorner(p, p) = s * identity(p);
  K.bottomRightCorner(p, p) = s * identity(p);
  return K;
}

double max_abs(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double hermitian_tolerance(const CMatrix& m) { return 1e-10 * (1.0 + max_abs(m)); }

void assert_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "Hermitian check needs a square matrix");
  }
  const double dev = max_abs(m - m.adjoint());
  if (!(dev <= tol)) {
    std::ostringstream msg;
    msg << "max |M - M*| = " << dev << " exceeds " << tol;
    throw Error(ErrorKind::NotHermitian, msg.str()).with_value(dev);
  }
}

void assert_hermitian(const CMatrix& m) { assert_hermitian(m, hermitian_tolerance(m)); }

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).minCoeff(); }

double max_eigenvalue(const CMatrix& m) { return hermitian_eigenvalues(m).maxCoeff(); }

HermPD::HermPD(const CMatrix& m) : matrix_(m) {
  assert_hermitian(m);
  matrix_ = hermitian_part(m);
  llt_.compute(matrix_);
  if (llt_.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "Cholesky pivot is not positive");
  }
  const auto diag = llt_.matrixLLT().diagonal();
  for (Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i).real() > 0.0) || !std::isfinite(diag(i).real())) {
      throw Error(ErrorKind::NotPositiveDefinite, "Cholesky pivot is not positive")
          .at_index(static_cast<long>(i));
    }
  }
}

CMatrix HermPD::factor() const { return llt_.matrixL(); }

CMatrix HermPD::solve(const CMatrix& rhs) const { return llt_.solve(rhs); }

CMatrix HermPD::inverse() const { return llt_.solve(identity(size())); }

double HermPD::log_determinant() const {
  double acc = 0.0;
  const auto diag = llt_.matrixLLT().diagonal();
  for (Index i = 0; i < diag.size(); ++i) acc += 2.0 * std::log(diag(i).real());
  return acc;
}

double HermPD::determinant() const { return std::exp(log_determinant()); }

HermPD cholesky_pd(const CMatrix& m) { return HermPD(m); }

namespace {

CMatrix spectral_function(const HermPD& m, double (*fn)(double)) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix());
  Eigen::VectorXd mapped = es.eigenvalues();
  for (Index i = 0; i < mapped.size(); ++i) {
    if (!(mapped(i) > 0.0)) {
      throw Error(ErrorKind::NotPositiveDefinite, "eigenvalue is not positive")
          .with_value(mapped(i));
    }
    mapped(i) = fn(mapped(i));
  }
  const CMatrix& v = es.eigenvectors();
  CMatrix r = v * mapped.cast<Complex>().asDiagonal() * v.adjoint();
  return hermitian_part(r);
}

}  // namespace

CMatrix sqrtm_hpd(const HermPD& m) {
  return spectral_function(m, [](double x) { return std::sqrt(x); });
}

CMatrix inv_sqrtm_hpd(const HermPD& m) {
  return spectral_function(m, [](double x) { return 1.0 / std::sqrt(x); });
}

CMatrix sqrtm_psd(const CMatrix& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  Eigen::VectorXd mapped = es.eigenvalues();
  for (Index i = 0; i < mapped.size(); ++i) mapped(i) = std::sqrt(std::max(mapped(i), 0.0));
  const CMatrix& v = es.eigenvectors();
  return hermitian_part(v * mapped.cast<Complex>().asDiagonal() * v.adjoint());
}

CMatrix solve_checked(const CMatrix& m, const CMatrix& b, ErrorKind on_singular,
                      double min_rcond) {
  if (m.rows() != m.cols() || m.rows() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "solve: incompatible shapes");
  }
  if (m.rows() == 0) return zeros(0, b.cols());
  Eigen::PartialPivLU<CMatrix> lu(m);
  const double rc = lu.rcond();
  if (!(rc > min_rcond)) {
    throw Error(on_singular, "matrix is numerically singular").with_value(rc);
  }
  CMatrix x = lu.solve(b);
  if (!x.allFinite()) throw Error(on_singular, "solution is not finite").with_value(rc);
  return x;
}

CMatrix inverse_checked(const CMatrix& m, ErrorKind on_singular) {
  return solve_checked(m, identity(m.rows()), on_singular);
}

Complex determinant(const CMatrix& m) {
  if (m.rows() == 0) return {1.0, 0.0};
  Eigen::PartialPivLU<CMatrix> lu(m);
  return lu.determinant();
}

double condition_number_hpd(const CMatrix& m) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(m);
  return ev.maxCoeff() / ev.minCoeff();
}

double relative_difference(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace snodelab
