#pragma once

// Matrix densities on the real line: t -> p x p positive semidefinite matrix.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "snodelab/matcore.hpp"

namespace snodelab {

struct DensityFn {
  std::string name;
  Index p = 1;
  std::function<CMatrix(double)> eval;
  /// ln det of eval(t) when available in closed form; avoids underflow in
  /// entropy integrals of fast-decaying densities.
  std::function<double(double)> log_det;
  /// Support is contained in [lower, upper].
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  /// Points where the density is not smooth (quadrature splits there).
  std::vector<double> breakpoints;

  CMatrix operator()(double t) const { return eval(t); }
  /// ln det P(t); -inf where det P(t) <= 1e-300.
  double log_det_at(double t) const;
};

namespace density {

/// 1/(b - a) on [a, b].
DensityFn uniform(double a = -1.0, double b = 1.0);
/// tau / (pi (t^2 + tau^2)).
DensityFn cauchy(double tau = 1.0);
/// e^{-sqrt|t|} / 4; total mass 1.
DensityFn exp_sqrt();
/// Constant matrix c on the whole line.
DensityFn constant(const CMatrix& c);
/// Piecewise-linear interpolation of samples (scalar), zero outside the grid.
DensityFn table(std::vector<double> t, std::vector<double> values);
/// Arbitrary scalar density with optional support bounds.
DensityFn scalar(std::string name, std::function<double(double)> f,
                 double lower = -std::numeric_limits<double>::infinity(),
                 double upper = std::numeric_limits<double>::infinity());

}  // namespace density

}  // namespace snodelab
