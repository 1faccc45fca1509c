#pragma once

// Quadrature rules used across the library.
//
// Gauss-Legendre handles smooth integrands (moments, Stieltjes densities of
// rational Weyl functions). The real line is folded onto (-pi/2, pi/2) by
// t = tan(theta). Integrands with endpoint singularities after that fold
// (log-densities with algebraic decay) go through tanh-sinh instead.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace snodelab::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]. Rules on [-1, 1] are cached.
Rule gauss_legendre(std::size_t n, double a, double b);

namespace detail {

inline double plain(double v) { return v; }
inline std::complex<double> plain(std::complex<double> v) { return v; }
// Eigen expressions may reference temporaries; force evaluation.
template <class D>
typename D::PlainObject plain(const Eigen::MatrixBase<D>& v) {
  return v.eval();
}

}  // namespace detail

/// Sum_j w_j f(x_j); works for scalar and Eigen matrix integrands.
template <class F>
auto apply(const Rule& rule, F&& f) {
  auto acc = detail::plain(rule.weights[0] * detail::plain(f(rule.nodes[0])));
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * detail::plain(f(rule.nodes[i]));
  }
  return acc;
}

/// Integral over R of f(t) dt via t = tan(theta) and n-point Gauss-Legendre.
template <class F>
auto integrate_real_line(F&& f, std::size_t n) {
  const Rule rule = gauss_legendre(n, -std::numbers::pi / 2, std::numbers::pi / 2);
  return apply(rule, [&](double theta) {
    const double c = std::cos(theta);
    return detail::plain((1.0 / (c * c)) * detail::plain(f(std::tan(theta))));
  });
}

/// Integral over [a, inf) via t = a + tan(theta)^2. Removes sqrt-type kinks at a.
template <class F>
auto integrate_half_line_up(F&& f, double a, std::size_t n) {
  const Rule rule = gauss_legendre(n, 0.0, std::numbers::pi / 2);
  return apply(rule, [&](double theta) {
    const double s = std::tan(theta);
    const double c = std::cos(theta);
    return detail::plain((2.0 * s / (c * c)) * detail::plain(f(a + s * s)));
  });
}

/// Integral over (-inf, b] via t = b - tan(theta)^2.
template <class F>
auto integrate_half_line_down(F&& f, double b, std::size_t n) {
  const Rule rule = gauss_legendre(n, 0.0, std::numbers::pi / 2);
  return apply(rule, [&](double theta) {
    const double s = std::tan(theta);
    const double c = std::cos(theta);
    return detail::plain((2.0 * s / (c * c)) * detail::plain(f(b - s * s)));
  });
}

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels of `order` points.
template <class F>
auto integrate_panels(F&& f, double a, double b, std::size_t panels, std::size_t order) {
  const double h = (b - a) / static_cast<double>(panels);
  auto acc = apply(gauss_legendre(order, a, a + h), f);
  for (std::size_t k = 1; k < panels; ++k) {
    const double lo = a + h * static_cast<double>(k);
    acc += apply(gauss_legendre(order, lo, lo + h), f);
  }
  return acc;
}

struct ScalarResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Double-exponential (tanh-sinh) quadrature on a finite interval; tolerates
/// integrable endpoint singularities. f is never evaluated at a or b.
ScalarResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                       double tolerance);

}  // namespace snodelab::quad
