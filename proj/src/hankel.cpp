#include "snodelab/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "snodelab/quadrature.hpp"

namespace snodelab {

void HankelSpec::validate() const {
  if (p <= 0 || n <= 0 || static_cast<Index>(H.size()) < 2 * n - 1) {
    std::ostringstream msg;
    msg << "Hankel data needs p, n > 0 and 2n-1 blocks; got p = " << p << ", n = " << n << ", "
        << H.size() << " blocks";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  for (std::size_t k = 0; k < H.size(); ++k) {
    if (H[k].rows() != p || H[k].cols() != p) {
      throw Error(ErrorKind::DimensionMismatch, "moment block has the wrong size")
          .at_index(static_cast<long>(k));
    }
    try {
      assert_hermitian(H[k]);
    } catch (Error& e) {
      throw e.at_index(static_cast<long>(k));
    }
  }
}

CMatrix HankelSpec::matrix(Index order) const {
  CMatrix M(order * p, order * p);
  for (Index i = 0; i < order; ++i)
    for (Index j = 0; j < order; ++j) M.block(i * p, j * p, p, p) = H[static_cast<std::size_t>(i + j)];
  return M;
}

HankelSpec HankelSpec::truncated(Index order) const {
  if (order <= 0 || order > n) {
    throw Error(ErrorKind::IndexOutOfRange, "truncation order").at_index(static_cast<long>(order));
  }
  HankelSpec out = *this;
  out.n = order;
  out.H.resize(static_cast<std::size_t>(2 * order - 1));
  return out;
}

SNode build_hankel_node(const HankelSpec& spec) {
  spec.validate();
  const Index p = spec.p;
  const Index n = spec.n;
  SNode node;
  node.p = p;
  node.A = zeros(n * p, n * p);
  for (Index i = 1; i < n; ++i) node.A.block(i * p, (i - 1) * p, p, p) = identity(p);
  node.S = spec.matrix();
  node.Phi1 = zeros(n * p, p);
  node.Phi2 = zeros(n * p, p);
  node.Phi2.topRows(p) = identity(p);
  for (Index i = 1; i < n; ++i) {
    node.Phi1.block(i * p, 0, p, p) = -kI * spec.H[static_cast<std::size_t>(i - 1)];
  }
  return node;
}

CMatrix OmegaChain::factor(std::size_t k, Complex lambda) const {
  if (k >= omega.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "factor index").at_index(static_cast<long>(k));
  }
  if (std::abs(lambda) <= 1e-14) {
    throw Error(ErrorKind::PoleAtLambda, "factors have a pole at 0").at_point(lambda);
  }
  const CMatrix q = omega[k].adjoint() * HermPD(t[k]).solve(omega[k]);
  return identity(2 * p) + (kI / lambda) * signature_J(p) * q;
}

CMatrix OmegaChain::product(Complex lambda) const {
  CMatrix prod = identity(2 * p);
  for (std::size_t k = 0; k < omega.size(); ++k) prod = factor(k, lambda) * prod;
  return prod;
}

double OmegaChain::null_residual() const {
  const CMatrix J = signature_J(p);
  double worst = 0.0;
  for (const CMatrix& w : omega) worst = std::max(worst, (w * J * w.adjoint()).norm());
  return worst;
}

double OmegaChain::link_residual() const {
  const CMatrix J = signature_J(p);
  double worst = 0.0;
  for (std::size_t k = 1; k < omega.size(); ++k) {
    const CMatrix link = kI * omega[k] * J * omega[k - 1].adjoint();
    worst = std::max(worst, (link - t[k]).norm());
  }
  return worst;
}

OmegaChain hankel_chain(const HankelSpec& spec) {
  const SNode node = build_hankel_node(spec);
  const Index p = spec.p;
  const CMatrix pi = node.Pi();
  OmegaChain chain;
  chain.p = p;
  for (Index r = 1; r <= spec.n; ++r) {
    const Index m = r * p;
    std::optional<HermPD> hr;
    try {
      hr.emplace(node.S.topLeftCorner(m, m));
    } catch (Error& e) {
      if (e.kind() == ErrorKind::NotPositiveDefinite) throw e.at_index(static_cast<long>(r));
      throw;
    }
    CMatrix unit = zeros(m, p);
    unit.bottomRows(p) = identity(p);
    const CMatrix last_row = hr->solve(unit).adjoint();
    chain.t.push_back(hermitian_part(last_row.rightCols(p)));
    chain.omega.push_back(last_row * pi.topRows(m));
  }
  return chain;
}

namespace {

struct Piece {
  double a;
  double b;
};

template <class F>
CMatrix integrate_pieces(const std::vector<Piece>& pieces, F&& f, std::size_t nodes) {
  CMatrix acc;
  bool first = true;
  for (const Piece& piece : pieces) {
    CMatrix part;
    if (std::isinf(piece.a) && std::isinf(piece.b)) {
      part = quad::integrate_real_line(f, nodes);
    } else if (std::isinf(piece.a)) {
      part = quad::integrate_half_line_down(f, piece.b, nodes);
    } else if (std::isinf(piece.b)) {
      part = quad::integrate_half_line_up(f, piece.a, nodes);
    } else {
      part = quad::apply(quad::gauss_legendre(nodes, piece.a, piece.b), f);
    }
    if (first) {
      acc = part;
      first = false;
    } else {
      acc += part;
    }
  }
  return acc;
}

std::vector<Piece> split_support(const DensityFn& density) {
  std::vector<double> cuts;
  for (double b : density.breakpoints) {
    if (std::isfinite(b) && b >= density.lower && b <= density.upper) cuts.push_back(b);
  }
  if (std::isfinite(density.lower)) cuts.push_back(density.lower);
  if (std::isfinite(density.upper)) cuts.push_back(density.upper);
  if (cuts.empty()) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Piece> pieces;
  if (!std::isfinite(density.lower)) pieces.push_back({density.lower, cuts.front()});
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) pieces.push_back({cuts[k], cuts[k + 1]});
  if (!std::isfinite(density.upper)) pieces.push_back({cuts.back(), density.upper});
  return pieces;
}

}  // namespace

CMatrix moments_from_density(const DensityFn& density, int k, const MomentQuadrature& q) {
  const std::vector<Piece> pieces = split_support(density);
  auto moment = [&](double t) -> CMatrix { return std::pow(t, k) * density(t); };
  auto absolute = [&](double t) -> CMatrix { return std::pow(std::abs(t), k) * density(t); };
  std::size_t nodes = q.nodes;
  CMatrix previous = integrate_pieces(pieces, moment, nodes);
  while (nodes < q.max_nodes) {
    nodes *= 2;
    const CMatrix current = integrate_pieces(pieces, moment, nodes);
    const double scale = std::max(integrate_pieces(pieces, absolute, nodes).norm(), 1e-300);
    if ((current - previous).norm() <= q.agreement * scale) return current;
    previous = current;
  }
  throw Error(ErrorKind::QuadratureNotConverged, "moment integral does not settle")
      .at_index(static_cast<long>(k));
}

namespace {

// Fits -phi(z) = sum_{k=1}^{L} c_k z^{-k} on the upper semicircle |z| = R.
std::vector<CMatrix> laurent_fit(const MatrixFunction& phi, double radius, int terms,
                                 std::size_t points) {
  const std::size_t m = points;
  Eigen::MatrixXcd design(static_cast<Index>(m), terms);
  std::vector<CMatrix> values;
  values.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double angle = std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    const Complex w = std::polar(1.0, angle);
    for (int k = 0; k < terms; ++k) design(static_cast<Index>(j), k) = std::pow(w, -(k + 1));
    values.push_back(-phi(radius * w));
  }
  const Index p = values.front().rows();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(design);
  std::vector<CMatrix> coeffs(static_cast<std::size_t>(terms), CMatrix(p, p));
  for (Index a = 0; a < p; ++a) {
    for (Index b = 0; b < p; ++b) {
      Eigen::VectorXcd rhs(static_cast<Index>(m));
      for (std::size_t j = 0; j < m; ++j) rhs(static_cast<Index>(j)) = values[j](a, b);
      const Eigen::VectorXcd d = qr.solve(rhs);
      for (int k = 0; k < terms; ++k) {
        coeffs[static_cast<std::size_t>(k)](a, b) = d(k) * std::pow(radius, k + 1);
      }
    }
  }
  return coeffs;
}

}  // namespace

MomentRecovery recover_moments(const HankelSpec& spec, const ParamPair& pair,
                               const RecoveryOptions& options) {
  const SNode node = build_hankel_node(spec);
  const PairValidation pv = validate_pair(pair);
  if (!pv.valid) {
    throw Error(ErrorKind::InvalidPair, "pair fails the property-J test on the validation grid")
        .with_value(std::min(pv.min_nondegeneracy, pv.min_j_form));
  }
  const MatrixFunction phi = weyl_function(node, pair);
  const int n = static_cast<int>(spec.n);
  const int known = 2 * n - 2;  // H_0 .. H_{2n-3}

  double scale = 0.0;
  const double h0 = std::max(spec.H[0].norm(), 1e-300);
  for (int k = 1; k <= 2 * n - 2; ++k) {
    scale = std::max(scale, std::pow(spec.H[static_cast<std::size_t>(k)].norm() / h0, 1.0 / k));
  }

  MomentRecovery out;
  out.radius = 50.0 * (1.0 + scale);
  if (known > 0) {
    const int terms = known + options.extra_terms;
    const auto fit_r = laurent_fit(phi, out.radius, terms, options.arc_points);
    const auto fit_2r = laurent_fit(phi, 2.0 * out.radius, terms, options.arc_points);
    for (int k = 0; k < known; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      out.laurent_drift = std::max(out.laurent_drift, relative_difference(fit_r[idx], fit_2r[idx]));
      out.laurent.push_back(fit_2r[idx]);
    }
    if (!(out.laurent_drift <= options.laurent_agreement)) {
      throw Error(ErrorKind::ExtractionNotConverged, "Laurent fits at R and 2R disagree")
          .with_value(out.laurent_drift);
    }
  }

  // Constant pairs: the frame is J-unitary on the real line, so mu' has a
  // closed form without the cancellation in Im phi at large |t|.
  std::function<CMatrix(double)> density;
  if (pair.constant) {
    const CMatrix r = pair.R(kI);
    const CMatrix q = pair.Q(kI);
    density = [&node, r, q](double t) { return lft_density_on_axis(frame(node, Complex(t, 0.0)), r, q); };
  } else {
    density = [&phi](double t) { return stieltjes_density(phi, t); };
  }
  auto moments_on = [&](std::size_t nodes) {
    const MeasureGrid grid = measure_grid(density, nodes);
    std::vector<CMatrix> m(static_cast<std::size_t>(known + 1), zeros(spec.p, spec.p));
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
      double power = 1.0;
      for (int k = 0; k <= known; ++k) {
        m[static_cast<std::size_t>(k)] += power * grid.weights[j];
        power *= grid.nodes[j];
      }
    }
    return m;
  };
  const auto coarse = moments_on(options.quad_nodes);
  const auto fine = moments_on(2 * options.quad_nodes);
  for (int k = 0; k <= known; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double drift = relative_difference(coarse[idx], fine[idx]);
    if (!(drift <= 1e-7)) {
      throw Error(ErrorKind::ExtractionNotConverged, "moment quadrature changes under node doubling")
          .at_index(k)
          .with_value(drift);
    }
    out.quadrature.push_back(hermitian_part(fine[idx]));
  }

  for (int k = 0; k < known; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    out.max_error = std::max(out.max_error, relative_difference(out.laurent[idx], spec.H[idx]));
    out.max_error = std::max(out.max_error, relative_difference(out.quadrature[idx], spec.H[idx]));
  }
  out.top_excess = max_eigenvalue(out.quadrature.back() - spec.H[static_cast<std::size_t>(known)]);
  return out;
}

}  // namespace snodelab
