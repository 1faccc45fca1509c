#include "snodelab/asymptotics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "snodelab/quadrature.hpp"

namespace snodelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_nonempty(const NodeSequence& seq) {
  if (seq.nodes.empty()) throw Error(ErrorKind::BadInput, "empty node sequence");
}

}  // namespace

NodeSequence toeplitz_sequence(const ToeplitzSpec& spec) {
  spec.validate();
  NodeSequence seq;
  seq.family = "toeplitz";
  for (Index k = 1; k <= spec.n; ++k) seq.nodes.push_back(build_toeplitz_node(spec.truncated(k)));
  return seq;
}

NodeSequence hankel_sequence(const HankelSpec& spec) {
  spec.validate();
  NodeSequence seq;
  seq.family = "hankel";
  for (Index k = 1; k <= spec.n; ++k) seq.nodes.push_back(build_hankel_node(spec.truncated(k)));
  return seq;
}

HankelSpec hankel_from_density(const DensityFn& density, Index n, const MomentQuadrature& q) {
  HankelSpec spec;
  spec.p = density.p;
  spec.n = n;
  for (Index k = 0; k <= 2 * n - 2; ++k) {
    spec.H.push_back(hermitian_part(moments_from_density(density, static_cast<int>(k), q)));
  }
  return spec;
}

double nested_embed_check(const NodeSequence& seq) {
  double worst = 0.0;
  for (std::size_t r = 0; r < seq.size(); ++r) {
    const SNode& big = seq.nodes[r];
    for (std::size_t k = 0; k < r; ++k) {
      const SNode& small = seq.nodes[k];
      const Index d = small.dim();
      const Index D = big.dim();
      if (d > D || small.p != big.p) {
        throw Error(ErrorKind::DimensionMismatch, "sequence is not increasing").at_index(static_cast<long>(r));
      }
      worst = std::max(worst, max_abs(big.A.topLeftCorner(d, d) - small.A));
      worst = std::max(worst, max_abs(big.S.topLeftCorner(d, d) - small.S));
      worst = std::max(worst, max_abs(big.Pi().topRows(d) - small.Pi()));
      if (D > d) worst = std::max(worst, max_abs(big.A.topRightCorner(d, D - d)));
    }
  }
  return worst;
}

RhoTrajectory rho_trajectory(const NodeSequence& seq, Complex z) {
  require_nonempty(seq);
  RhoTrajectory out;
  out.z = z;
  out.forward_step = kInf;
  out.reflected_step = kInf;
  for (const SNode& node : seq.nodes) {
    out.forward.push_back(rho(node, z, Orientation::Forward));
    out.reflected.push_back(rho(node, z, Orientation::Reflected));
  }
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    out.forward_step = std::min(out.forward_step, min_eigenvalue(out.forward[k + 1] - out.forward[k]));
    out.reflected_step =
        std::min(out.reflected_step, min_eigenvalue(out.reflected[k] - out.reflected[k + 1]));
  }
  return out;
}

FrameQuotient frame_quotient(const NodeSequence& seq, std::size_t k, std::size_t r, Complex z) {
  if (k > r || r >= seq.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "frame quotient needs k <= r < size").at_index(static_cast<long>(r));
  }
  const SNode& big = seq.nodes[r];
  const SNode& small = seq.nodes[k];
  const Index p = big.p;
  FrameQuotient out;
  const CMatrix full = frame(big, z);
  if (k == r) {
    out.value = identity(2 * p);
  } else {
    const Index d = small.dim();
    const Index m = big.dim() - d;
    const CMatrix s_inv = inverse_checked(big.S, ErrorKind::SingularResolvent);
    const CMatrix t22 = hermitian_part(s_inv.bottomRightCorner(m, m));
    const CMatrix gamma = s_inv * big.Pi();
    const CMatrix t22_inv = inverse_checked(t22, ErrorKind::SingularResolvent);
    out.node.p = p;
    out.node.A = big.A.bottomRightCorner(m, m);
    out.node.S = hermitian_part(t22_inv);
    const CMatrix pi = t22_inv * gamma.bottomRows(m);
    out.node.Phi1 = pi.leftCols(p);
    out.node.Phi2 = pi.rightCols(p);
    out.value = frame(out.node, z);
  }
  out.product_residual = (full - frame(small, z) * out.value).norm();
  const CMatrix J = signature_J(p);
  out.expansion = min_eigenvalue(hermitian_part(out.value * J * out.value.adjoint() - J));
  return out;
}

namespace {

struct Piece {
  double lo;
  double hi;
  // true: integrate in s = 1/t over [1/hi, 1/lo].
  bool inverted;
};

std::vector<Piece> pieces_for(double a, double b, const std::vector<double>& breakpoints) {
  std::vector<double> cuts{a, b};
  for (double c : {-1.0, 1.0}) {
    if (c > a && c < b) cuts.push_back(c);
  }
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Piece> out;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double lo = cuts[j];
    const double hi = cuts[j + 1];
    out.push_back({lo, hi, lo >= 1.0 || hi <= -1.0});
  }
  return out;
}

double reciprocal(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

// Narrow peaks of ln det P defeat a single tanh-sinh pass; halve the piece
// until each half settles.
quad::ScalarResult bisecting_tanh_sinh(const std::function<double(double)>& g, double lo, double hi,
                                       double agreement, int depth) {
  const quad::ScalarResult whole = quad::tanh_sinh(g, lo, hi, 1e-10);
  if (whole.error <= agreement * std::max(1.0, whole.l1) || depth >= 12) return whole;
  const double mid = 0.5 * (lo + hi);
  const quad::ScalarResult left = bisecting_tanh_sinh(g, lo, mid, agreement, depth + 1);
  const quad::ScalarResult right = bisecting_tanh_sinh(g, mid, hi, agreement, depth + 1);
  return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

}  // namespace

EntropyValue entropy_integral(const DensityFn& P, const std::function<double(double)>& f, double a,
                              double b, const EntropyOptions& options) {
  if (!(a < b)) throw Error(ErrorKind::BadInput, "entropy integral needs a < b");
  const bool closed_form = static_cast<bool>(P.log_det);
  const auto weight = [&f](double t) { return f ? f(t) : 1.0; };
  // ln det P(t); NaN marks a point beyond the cutoff that is dropped. Past the
  // cutoff only a finite closed-form value is kept.
  const auto log_det = [&](double t) {
    if (std::abs(t) <= options.cutoff) return P.log_det_at(t);
    double ld = std::numeric_limits<double>::quiet_NaN();
    if (closed_form) {
      try {
        ld = P.log_det_at(t);
      } catch (const Error&) {
        // Frame evaluation can fail far out; the point is dropped like the rest of the tail.
      }
    }
    return std::isfinite(ld) ? ld : std::numeric_limits<double>::quiet_NaN();
  };

  EntropyValue out;
  const auto pieces = pieces_for(a, b, P.breakpoints);
  for (const Piece& piece : pieces) {
    const double lo = piece.inverted ? reciprocal(piece.hi) : piece.lo;
    const double hi = piece.inverted ? reciprocal(piece.lo) : piece.hi;
    const quad::Rule scan = quad::gauss_legendre(options.scan_nodes, lo, hi);
    for (double x : scan.nodes) {
      if (piece.inverted && x == 0.0) continue;
      const double ld = log_det(piece.inverted ? 1.0 / x : x);
      if (ld == -kInf) {
        out.minus_infinity = true;
        out.value = -kInf;
        return out;
      }
    }
  }

  double l1 = 0.0;
  for (const Piece& piece : pieces) {
    bool hit_zero = false;
    std::function<double(double)> g;
    double lo = piece.lo;
    double hi = piece.hi;
    if (piece.inverted) {
      lo = reciprocal(piece.hi);
      hi = reciprocal(piece.lo);
      g = [&](double s) {
        const double t = 1.0 / s;
        const double ld = log_det(t);
        if (std::isnan(ld)) return 0.0;
        if (!std::isfinite(ld)) {
          hit_zero = true;
          return 0.0;
        }
        return weight(t) * ld / (1.0 + s * s);
      };
    } else {
      g = [&](double t) {
        const double ld = log_det(t);
        if (std::isnan(ld)) return 0.0;
        if (!std::isfinite(ld)) {
          hit_zero = true;
          return 0.0;
        }
        return weight(t) * ld / (1.0 + t * t);
      };
    }
    const quad::ScalarResult r = bisecting_tanh_sinh(g, lo, hi, options.agreement, 0);
    if (hit_zero) {
      out.minus_infinity = true;
      out.value = -kInf;
      return out;
    }
    out.value += r.value;
    out.error += r.error;
    l1 += r.l1;
  }
  if (!(out.error <= options.agreement * std::max(1.0, l1))) {
    throw Error(ErrorKind::QuadratureNotConverged, "entropy integral does not settle under refinement")
        .with_value(out.error);
  }
  return out;
}

namespace {

std::function<double(double)> poisson_weight(Complex lambda) {
  return [lambda](double t) {
    if (std::abs(t) <= 1e8) return lambda.imag() * (1.0 + t * t) / std::norm(t - lambda);
    // Same expression in s = 1/t, safe for huge |t|.
    const double s = 1.0 / t;
    return lambda.imag() * (1.0 + s * s) / std::norm(1.0 - s * lambda);
  };
}

}  // namespace

double poisson_normalization(Complex lambda, const EntropyOptions& options) {
  if (!(lambda.imag() > 0.0)) {
    throw Error(ErrorKind::NotInUpperHalfPlane, "Poisson kernel needs Im lambda > 0").at_point(lambda);
  }
  // ln det of this density is 1 everywhere.
  DensityFn unit = density::constant(identity(1) * std::numbers::e);
  unit.log_det = [](double) { return 1.0; };
  return entropy_integral(unit, poisson_weight(lambda), -kInf, kInf, options).value;
}

double outer_modulus(const DensityFn& P, Complex lambda, const EntropyOptions& options) {
  if (!(lambda.imag() > 0.0)) {
    throw Error(ErrorKind::NotInUpperHalfPlane, "outer modulus needs Im lambda > 0").at_point(lambda);
  }
  const EntropyValue v = entropy_integral(P, poisson_weight(lambda), -kInf, kInf, options);
  if (v.minus_infinity) {
    throw Error(ErrorKind::SzegoViolated, "log-integral of the density is -inf").at_point(lambda);
  }
  return std::exp(v.value / kTwoPi);
}

CMatrix gmu_extremal(const SNode& node, Complex lambda, Complex z) {
  const CMatrix at_lambda = frame(node, lambda);
  const CMatrix r = block(at_lambda, 2, 2).adjoint();
  const CMatrix q = block(at_lambda, 2, 1).adjoint();
  const CMatrix fz = frame(node, z);
  const CMatrix F = block(fz, 2, 1) * r + block(fz, 2, 2) * q;
  CMatrix f_inv;
  try {
    f_inv = inverse_checked(F, ErrorKind::SingularF);
  } catch (Error& e) {
    throw e.at_point(z);
  }
  return sqrtm_hpd(HermPD(rho(node, lambda))) * f_inv / std::sqrt(kTwoPi);
}

DensityFn weyl_density(const SNode& node, const CMatrix& r, const CMatrix& q) {
  validate_pair_at(r, q);
  DensityFn d;
  d.name = "weyl";
  d.p = node.p;
  d.eval = [node, r, q](double t) { return lft_density_on_axis(frame(node, Complex(t, 0.0)), r, q); };
  // ln det of D^{-*} (r* q + q* r) D^{-1} / (2 pi) without forming the product.
  const Complex dm = determinant(r.adjoint() * q + q.adjoint() * r);
  const double log_middle = dm.real() > 0.0 ? std::log(dm.real()) : -kInf;
  const double p = static_cast<double>(node.p);
  d.log_det = [node, r, q, log_middle, p](double t) {
    if (log_middle == -kInf) return -kInf;
    const CMatrix f = frame(node, Complex(t, 0.0));
    const CMatrix den = block(f, 2, 1) * r + block(f, 2, 2) * q;
    const double ad = std::abs(determinant(den));
    if (!(ad > 0.0)) return kInf;
    return log_middle - 2.0 * std::log(ad) - p * std::log(kTwoPi);
  };
  return d;
}

void require_entropy_hypothesis(const SNode& node) {
  node.validate();
  const Index m = node.dim();
  if (m == 0) return;
  const double scale = 1.0 + node.A.norm();
  CMatrix power = node.A;
  for (Index k = 1; k < m; ++k) power = power * node.A;
  if (power.norm() <= 1e-12 * std::pow(scale, static_cast<double>(m))) return;  // nilpotent
  Eigen::ComplexEigenSolver<CMatrix> es(node.A, false);
  for (Index k = 0; k < m; ++k) {
    const Complex alpha = es.eigenvalues()(k);
    if (std::abs(alpha) <= 1e-12 * scale) continue;
    if (!(alpha.imag() < -1e-12 * scale)) {
      throw Error(ErrorKind::HypothesisViolated,
                  "I - zA is singular somewhere in the closed lower half-plane")
          .at_point(1.0 / alpha);
    }
  }
}

EntropyBound entropy_bound_check(const SNode& node, const CMatrix& r, const CMatrix& q, Complex lambda,
                                 double tol) {
  require_entropy_hypothesis(node);
  validate_pair_at(r, q);
  EntropyBound out;
  out.rhs = hermitian_part(inverse_checked(rho(node, lambda), ErrorKind::NotPositiveDefinite));
  if (node.p == 1) {
    const double g = outer_modulus(weyl_density(node, r, q), lambda);
    out.lhs = identity(1) * (kTwoPi * g * g);
  } else {
    const ParamPair ext = extremal_pair(node, lambda);
    CMatrix stacked(2 * node.p, node.p);
    stacked << ext.R(lambda), ext.Q(lambda);
    CMatrix given(2 * node.p, node.p);
    given << r, q;
    // Same pair up to a right factor: given = stacked X.
    const CMatrix x = stacked.colPivHouseholderQr().solve(given);
    if ((stacked * x - given).norm() > 1e-9 * (1.0 + given.norm())) {
      throw Error(ErrorKind::Unsupported, "matrix case needs the extremal pair");
    }
    const CMatrix G = gmu_extremal(node, lambda, lambda);
    out.lhs = hermitian_part(kTwoPi * G.adjoint() * G);
  }
  out.slack = min_eigenvalue(out.rhs - out.lhs);
  out.holds = out.slack >= -tol;
  out.equality = (out.rhs - out.lhs).norm() <= tol;
  return out;
}

TrajectoryReport convergence_run(const NodeSequence& seq, Complex lambda,
                                 const std::optional<DensityFn>& reference) {
  require_nonempty(seq);
  TrajectoryReport out;
  out.p = seq.nodes.front().p;
  out.lambda = lambda;
  out.monotone = rho_trajectory(seq, lambda).monotone();

  std::optional<double> target;
  if (reference) {
    const EntropyValue ev = entropy_integral(*reference);
    out.szego_minus_infinity = ev.minus_infinity;
    if (!ev.minus_infinity && seq.nodes.front().p == 1) {
      const double g = outer_modulus(*reference, lambda);
      target = kTwoPi * g * g;
    }
  }

  out.det_positive = true;
  out.gap_decreasing = target.has_value();
  out.strictly_decreasing = true;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const SNode& node = seq.nodes[k];
    TrajectoryRow row;
    row.k = k + 1;
    row.rho_inv = hermitian_part(inverse_checked(rho(node, lambda), ErrorKind::NotPositiveDefinite));
    row.det_rho_inv = determinant(row.rho_inv).real();
    row.cond = condition_number_hpd(node.S);
    if (target) {
      row.target = *target;
      row.gap = row.rho_inv(0, 0).real() - *target;
    }
    out.det_positive = out.det_positive && row.det_rho_inv > 0.0;
    if (!out.rows.empty()) {
      const TrajectoryRow& prev = out.rows.back();
      if (!(max_eigenvalue(row.rho_inv - prev.rho_inv) < 0.0)) out.strictly_decreasing = false;
      if (row.gap && !(*row.gap < *prev.gap)) out.gap_decreasing = false;
    }
    out.rows.push_back(row);
  }
  return out;
}

bool det_strict_lemma(const CMatrix& A, const CMatrix& B, double margin) {
  const HermPD a(A);
  assert_hermitian(B);
  const double det_a = a.determinant();
  const double det_sum = determinant(A + B).real();
  if (B.isZero(0.0)) return det_sum == det_a;
  return det_sum > det_a * (1.0 + margin);
}

double minkowski_det_gap(const CMatrix& B1, const CMatrix& B2) {
  const double inv_p = 1.0 / static_cast<double>(B1.rows());
  const auto root = [inv_p](const CMatrix& m) {
    return std::pow(std::max(determinant(m).real(), 0.0), inv_p);
  };
  return root(B1 + B2) - root(B1) - root(B2);
}

ResolventGrowth resolvent_growth(const SNode& node, const std::vector<double>& r_grid, bool upper_only,
                                 std::size_t angles) {
  node.validate();
  std::vector<double> radii = r_grid;
  std::sort(radii.begin(), radii.end());
  ResolventGrowth out;
  const Index m = node.dim();
  double running = 0.0;
  for (double r : radii) {
    for (std::size_t j = 0; j < angles; ++j) {
      const double phase = upper_only ? std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(angles)
                                      : kTwoPi * static_cast<double>(j) / static_cast<double>(angles);
      const Complex z = std::polar(r, phase);
      CMatrix inv;
      double norm = kInf;
      try {
        inv = solve_checked(identity(m) - z * node.A, identity(m), ErrorKind::SingularOnGrid, 1e-12);
        norm = spectral_norm(inv);
      } catch (Error& e) {
        throw e.at_point(z);
      }
      if (!(norm <= 1e12)) {
        throw Error(ErrorKind::SingularOnGrid, "I - zA is singular on the sampling ring").at_point(z).with_value(norm);
      }
      running = std::max(running, norm);
    }
    out.samples.push_back({r, running, std::log(running) / std::pow(r, out.kappa)});
  }
  if (!out.samples.empty()) {
    const std::size_t half = std::max<std::size_t>(1, out.samples.size() / 2);
    double early = -kInf;
    for (std::size_t j = 0; j < half; ++j) early = std::max(early, out.samples[j].log_ratio);
    out.appears_bounded = out.samples.back().log_ratio <= early + 1e-12;
  }
  return out;
}

LimitDemo limit_inequality_demo(const std::function<double(int, double)>& P, const std::vector<int>& ks,
                                const std::function<double(double)>& f, double a, double b,
                                const std::function<double(double)>& limit) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b) || ks.empty()) {
    throw Error(ErrorKind::BadInput, "limit demo needs a finite interval and at least one k");
  }
  const auto weight = [&f](double t) { return f ? f(t) : 1.0; };
  constexpr std::size_t kOrder = 16;
  constexpr std::size_t kCells = 50;  // even, for Simpson
  const double h = (b - a) / static_cast<double>(kCells);

  LimitDemo out;
  out.ks = ks;
  std::vector<double> cell_mass(kCells, 0.0);
  for (int k : ks) {
    // Two panels per half period of sin(kt) at least.
    const std::size_t per_cell =
        std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2.0 * std::abs(k) * h / std::numbers::pi)));
    double lhs = 0.0;
    bool minus_inf = false;
    for (std::size_t c = 0; c < kCells; ++c) {
      const double lo = a + h * static_cast<double>(c);
      double mass = 0.0;
      const double panel = h / static_cast<double>(per_cell);
      for (std::size_t j = 0; j < per_cell; ++j) {
        const quad::Rule rule = quad::gauss_legendre(kOrder, lo + panel * static_cast<double>(j),
                                                     lo + panel * static_cast<double>(j + 1));
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double t = rule.nodes[q];
          const double v = P(k, t);
          const double w = rule.weights[q] / (1.0 + t * t);
          mass += w * v;
          if (v <= 1e-300) {
            minus_inf = true;
          } else {
            lhs += w * weight(t) * std::log(v);
          }
        }
      }
      if (k == ks.back()) cell_mass[c] = mass;
    }
    out.lhs.push_back(minus_inf ? -kInf : lhs);
  }
  const std::size_t n = out.lhs.size();
  // Steps that keep falling without shrinking: the integrals run off to -inf.
  bool diverging = n >= 3;
  for (std::size_t j = 2; diverging && j < n; ++j) {
    const double d1 = out.lhs[j - 1] - out.lhs[j - 2];
    const double d2 = out.lhs[j] - out.lhs[j - 1];
    diverging = d1 < 0.0 && d2 <= d1;
  }
  if (diverging || out.lhs.back() == -kInf) {
    out.limsup = -kInf;
  } else {
    if (n >= 2 && std::abs(out.lhs[n - 1] - out.lhs[n - 2]) > 1e-3) {
      throw Error(ErrorKind::NotConverged, "integrals of ln P_k do not settle")
          .with_value(out.lhs[n - 1] - out.lhs[n - 2]);
    }
    out.limsup = *std::max_element(out.lhs.begin() + static_cast<long>(n / 2), out.lhs.end());
  }

  // Density of the weak limit: derivative of the cumulative integrals of the
  // last P_k (five-point stencils), times 1 + t^2; then Simpson for its log.
  std::vector<double> cumulative(kCells + 1, 0.0);
  for (std::size_t c = 0; c < kCells; ++c) cumulative[c + 1] = cumulative[c] + cell_mass[c];
  const auto C = [&](std::ptrdiff_t j) { return cumulative[static_cast<std::size_t>(j)]; };
  const auto N = static_cast<std::ptrdiff_t>(kCells);
  double rhs = 0.0;
  bool rhs_minus_inf = false;
  for (std::ptrdiff_t j = 0; j <= N; ++j) {
    double d = 0.0;
    if (j == 0) {
      d = -25 * C(0) + 48 * C(1) - 36 * C(2) + 16 * C(3) - 3 * C(4);
    } else if (j == 1) {
      d = -3 * C(0) - 10 * C(1) + 18 * C(2) - 6 * C(3) + C(4);
    } else if (j == N - 1) {
      d = 3 * C(N) + 10 * C(N - 1) - 18 * C(N - 2) + 6 * C(N - 3) - C(N - 4);
    } else if (j == N) {
      d = 25 * C(N) - 48 * C(N - 1) + 36 * C(N - 2) - 16 * C(N - 3) + 3 * C(N - 4);
    } else {
      d = C(j - 2) - 8 * C(j - 1) + 8 * C(j + 1) - C(j + 2);
    }
    const double t = a + h * static_cast<double>(j);
    const double density = d / (12.0 * h) * (1.0 + t * t);
    if (limit) out.limit_error = std::max(out.limit_error, std::abs(density - limit(t)));
    const double simpson = (j == 0 || j == N) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    if (density <= 1e-300) {
      rhs_minus_inf = true;
    } else {
      rhs += simpson * h / 3.0 * weight(t) * std::log(density) / (1.0 + t * t);
    }
  }
  out.rhs = rhs_minus_inf ? -kInf : rhs;
  out.holds = out.limsup == -kInf || out.limsup <= out.rhs + 1e-3;
  return out;
}

}  // namespace snodelab
