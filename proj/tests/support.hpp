#pragma once

// Random generators and helpers shared by the test executables.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "snodelab/matcore.hpp"
#include "snodelab/snode.hpp"
#include "snodelab/toeplitz.hpp"

namespace testsupport {

using snodelab::CMatrix;
using snodelab::Complex;
using snodelab::Index;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline CMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(Rng& rng, Index n) {
  const CMatrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.adjoint());
}

inline CMatrix random_hpd(Rng& rng, Index n, double shift = 0.1) {
  const CMatrix m = random_matrix(rng, n, n);
  return m * m.adjoint() / static_cast<double>(n) + shift * snodelab::identity(n);
}

/// Contraction with spectral norm equal to `norm`.
inline CMatrix random_contraction(Rng& rng, Index p, double norm) {
  const CMatrix m = random_matrix(rng, p, p);
  return (norm / snodelab::spectral_norm(m)) * m;
}

/// Symbol of a positive measure on the circle (point masses with PSD weights)
/// plus 0.1 I, so every S(n) is positive definite.
inline snodelab::ToeplitzSpec random_toeplitz_spec(Rng& rng, Index n, Index p) {
  snodelab::ToeplitzSpec spec;
  spec.p = p;
  spec.n = n;
  spec.s.assign(static_cast<std::size_t>(n), snodelab::zeros(p, p));
  const int atoms = static_cast<int>(n) + 2;
  for (int a = 0; a < atoms; ++a) {
    const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const CMatrix weight = random_hpd(rng, p, 0.0) / static_cast<double>(atoms);
    for (Index k = 0; k < n; ++k) {
      spec.s[static_cast<std::size_t>(k)] += std::polar(1.0, -angle * static_cast<double>(k)) * weight;
    }
  }
  spec.s[0] += 0.1 * snodelab::identity(p);
  spec.s[0] = snodelab::hermitian_part(spec.s[0]);
  spec.nu = 0.3 * random_hermitian(rng, p);
  return spec;
}

/// Moments of point masses on [-1, 1] with PSD weights, plus those of the
/// uniform measure so that every H(k) is positive definite.
inline std::vector<CMatrix> random_hankel_moments(Rng& rng, Index n, Index p) {
  std::vector<CMatrix> H(static_cast<std::size_t>(2 * n - 1), snodelab::zeros(p, p));
  const int atoms = static_cast<int>(n) + 2;
  for (int a = 0; a < atoms; ++a) {
    const double t = uniform(rng, -1.0, 1.0);
    const CMatrix weight = random_hpd(rng, p, 0.05) / static_cast<double>(atoms);
    double power = 1.0;
    for (auto& h : H) {
      h += power * weight;
      power *= t;
    }
  }
  for (std::size_t k = 0; k < H.size(); k += 2) {
    H[k] += (0.2 / static_cast<double>(k + 1)) * snodelab::identity(p);
  }
  for (auto& h : H) h = snodelab::hermitian_part(h);
  return H;
}

/// Constant pair R, Q with R*Q + Q*R >= 0.
inline snodelab::ParamPair random_constant_pair(Rng& rng, Index p) {
  if (p == 1) {
    const double alpha = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double beta = alpha + uniform(rng, -0.45 * std::numbers::pi, 0.45 * std::numbers::pi);
    CMatrix r(1, 1), q(1, 1);
    r(0, 0) = std::polar(uniform(rng, 0.5, 2.0), alpha);
    q(0, 0) = std::polar(uniform(rng, 0.5, 2.0), beta);
    return snodelab::ParamPair::constant_pair(r, q);
  }
  // Q = I, R = X + iY with X > 0 Hermitian and Y Hermitian.
  const CMatrix r = random_hpd(rng, p, 0.2) + Complex(0.0, 1.0) * random_hermitian(rng, p);
  return snodelab::ParamPair::constant_pair(r, snodelab::identity(p));
}

inline std::vector<Complex> upper_grid(Rng& rng, int count, double re_max = 3.0,
                                       double im_min = 0.2, double im_max = 3.0) {
  std::vector<Complex> out;
  while (static_cast<int>(out.size()) < count) {
    const Complex z(uniform(rng, -re_max, re_max), uniform(rng, im_min, im_max));
    // Keep away from the pole of Toeplitz node frames at 2i.
    if (std::abs(z - Complex(0.0, 2.0)) < 0.2) continue;
    out.push_back(z);
  }
  return out;
}

inline CMatrix scalar(Complex v) {
  CMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace testsupport
