#include "snodelab/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace snodelab {

double DensityFn::log_det_at(double t) const {
  if (t < lower || t > upper) return -std::numeric_limits<double>::infinity();
  if (log_det) return log_det(t);
  const Complex d = determinant(eval(t));
  if (!(d.real() > 1e-300)) return -std::numeric_limits<double>::infinity();
  return std::log(d.real());
}

namespace density {

namespace {

CMatrix one_by_one(double v) {
  CMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

DensityFn uniform(double a, double b) {
  if (!(b > a)) throw Error(ErrorKind::BadInput, "uniform density needs a < b");
  DensityFn d;
  d.name = "uniform";
  const double h = 1.0 / (b - a);
  d.eval = [a, b, h](double t) { return one_by_one(t >= a && t <= b ? h : 0.0); };
  d.log_det = [a, b, h](double t) {
    return t >= a && t <= b ? std::log(h) : -std::numeric_limits<double>::infinity();
  };
  d.lower = a;
  d.upper = b;
  d.breakpoints = {a, b};
  return d;
}

DensityFn cauchy(double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::BadInput, "cauchy density needs tau > 0");
  DensityFn d;
  d.name = "cauchy";
  d.eval = [tau](double t) { return one_by_one(tau / (std::numbers::pi * (t * t + tau * tau))); };
  d.log_det = [tau](double t) {
    return std::log(tau) - std::log(std::numbers::pi) - 2.0 * std::log(std::hypot(t, tau));
  };
  return d;
}

DensityFn exp_sqrt() {
  DensityFn d;
  d.name = "exp_sqrt";
  d.eval = [](double t) { return one_by_one(0.25 * std::exp(-std::sqrt(std::abs(t)))); };
  d.log_det = [](double t) { return std::log(0.25) - std::sqrt(std::abs(t)); };
  d.breakpoints = {0.0};
  return d;
}

DensityFn constant(const CMatrix& c) {
  assert_hermitian(c);
  DensityFn d;
  d.name = "constant";
  d.p = c.rows();
  d.eval = [c](double) { return c; };
  const Complex det = snodelab::determinant(c);
  const double ld = det.real() > 1e-300 ? std::log(det.real())
                                        : -std::numeric_limits<double>::infinity();
  d.log_det = [ld](double) { return ld; };
  return d;
}

DensityFn table(std::vector<double> t, std::vector<double> values) {
  if (t.size() < 2 || t.size() != values.size()) {
    throw Error(ErrorKind::BadInput, "table density needs at least two (t, value) samples");
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw Error(ErrorKind::BadInput, "table grid must be increasing");
  }
  for (double v : values) {
    if (!(v >= 0.0)) throw Error(ErrorKind::BadInput, "table density must be nonnegative");
  }
  DensityFn d;
  d.name = "table";
  d.lower = t.front();
  d.upper = t.back();
  d.breakpoints = t;
  d.eval = [t, values](double x) {
    if (x < t.front() || x > t.back()) return one_by_one(0.0);
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.end()) return one_by_one(values.back());
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
    return one_by_one((1.0 - w) * values[k - 1] + w * values[k]);
  };
  return d;
}

DensityFn scalar(std::string name, std::function<double(double)> f, double lower, double upper) {
  DensityFn d;
  d.name = std::move(name);
  d.lower = lower;
  d.upper = upper;
  if (std::isfinite(lower)) d.breakpoints.push_back(lower);
  if (std::isfinite(upper)) d.breakpoints.push_back(upper);
  d.eval = [f, lower, upper](double t) { return one_by_one(t >= lower && t <= upper ? f(t) : 0.0); };
  return d;
}

}  // namespace density

}  // namespace snodelab
