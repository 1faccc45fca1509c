#include "snodelab/toeplitz.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace snodelab {

void ToeplitzSpec::validate() const {
  if (p <= 0 || n <= 0 || static_cast<Index>(s.size()) < n) {
    std::ostringstream msg;
    msg << "Toeplitz data needs p, n > 0 and n blocks; got p = " << p << ", n = " << n << ", "
        << s.size() << " blocks";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].rows() != p || s[k].cols() != p) {
      throw Error(ErrorKind::DimensionMismatch, "symbol block has the wrong size")
          .at_index(static_cast<long>(k));
    }
  }
  if (nu.rows() != p || nu.cols() != p) {
    throw Error(ErrorKind::DimensionMismatch, "nu must be p x p");
  }
  assert_hermitian(s[0]);
  assert_hermitian(nu);
}

CMatrix ToeplitzSpec::matrix(Index order) const {
  CMatrix S(order * p, order * p);
  for (Index i = 0; i < order; ++i) {
    for (Index j = 0; j < order; ++j) {
      const Index d = j - i;
      S.block(i * p, j * p, p, p) = d <= 0 ? s[static_cast<std::size_t>(-d)]
                                           : CMatrix(s[static_cast<std::size_t>(d)].adjoint());
    }
  }
  return S;
}

ToeplitzSpec ToeplitzSpec::truncated(Index order) const {
  if (order <= 0 || order > n) {
    throw Error(ErrorKind::IndexOutOfRange, "truncation order").at_index(static_cast<long>(order));
  }
  ToeplitzSpec out = *this;
  out.n = order;
  out.s.resize(static_cast<std::size_t>(order));
  return out;
}

SNode build_toeplitz_node(const ToeplitzSpec& spec) {
  spec.validate();
  const Index p = spec.p;
  const Index n = spec.n;
  SNode node;
  node.p = p;
  node.A = zeros(n * p, n * p);
  for (Index i = 0; i < n; ++i) {
    node.A.block(i * p, i * p, p, p) = 0.5 * kI * identity(p);
    for (Index j = 0; j < i; ++j) node.A.block(i * p, j * p, p, p) = kI * identity(p);
  }
  node.S = spec.matrix();
  node.Phi1 = CMatrix(n * p, p);
  node.Phi2 = CMatrix(n * p, p);
  CMatrix partial = 0.5 * spec.s[0];
  for (Index i = 0; i < n; ++i) {
    if (i > 0) partial += spec.s[static_cast<std::size_t>(i)];
    node.Phi1.block(i * p, 0, p, p) = identity(p);
    node.Phi2.block(i * p, 0, p, p) = partial + kI * spec.nu;
  }
  return node;
}

DiracChain DiracChain::slice(std::size_t first, std::size_t count) const {
  if (first + count > C.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "chain slice").at_index(static_cast<long>(first + count));
  }
  DiracChain out;
  out.p = p;
  out.C.assign(C.begin() + first, C.begin() + first + count);
  out.rho.assign(rho.begin() + first, rho.begin() + first + count);
  return out;
}

DiracChain toeplitz_chain(const ToeplitzSpec& spec) {
  const SNode node = build_toeplitz_node(spec);
  const Index p = spec.p;
  const CMatrix K = unitary_K(p);
  const CMatrix j = signature_j(p);
  const CMatrix pi = node.Pi();
  DiracChain chain;
  chain.p = p;
  for (Index k = 1; k <= spec.n; ++k) {
    const Index m = k * p;
    std::optional<HermPD> sk;
    try {
      sk.emplace(node.S.topLeftCorner(m, m));
    } catch (Error& e) {
      if (e.kind() == ErrorKind::NotPositiveDefinite) throw e.at_index(static_cast<long>(k));
      throw;
    }
    // Last block row of S(k)^{-1}: S(k) is Hermitian, so solve with the unit block column.
    CMatrix unit = zeros(m, p);
    unit.bottomRows(p) = identity(p);
    const CMatrix last_row = sk->solve(unit).adjoint();
    const CMatrix t = hermitian_part(last_row.rightCols(p));
    const CMatrix xy = last_row * pi.topRows(m);
    chain.t.push_back(t);
    chain.X.push_back(xy.leftCols(p));
    chain.Y.push_back(xy.rightCols(p));
    const CMatrix beta = inv_sqrtm_hpd(HermPD(t)) * xy;
    const CMatrix bk = beta * K;
    const CMatrix C = hermitian_part(2.0 * bk.adjoint() * bk - j);
    chain.C.push_back(C);
    chain.rho.push_back(rho_from_C(C));
  }
  return chain;
}

DiracChain chain_from_verblunsky(const std::vector<CMatrix>& rho) {
  DiracChain chain;
  chain.p = rho.empty() ? 1 : rho.front().rows();
  for (const CMatrix& r : rho) {
    chain.C.push_back(halmos(r));
    chain.rho.push_back(r);
  }
  return chain;
}

std::vector<CMatrix> factorize_transfer(const ToeplitzSpec& spec, Complex lambda) {
  const Complex denom = 0.5 * kI - lambda;
  if (std::abs(denom) <= 1e-14) {
    throw Error(ErrorKind::PoleAtLambda, "factors have a pole at i/2").at_point(lambda);
  }
  const DiracChain chain = toeplitz_chain(spec);
  const Index p = spec.p;
  const CMatrix J = signature_J(p);
  std::vector<CMatrix> factors;
  for (std::size_t k = 0; k < chain.t.size(); ++k) {
    CMatrix xy(p, 2 * p);
    xy << chain.X[k], chain.Y[k];
    const CMatrix q = xy.adjoint() * HermPD(chain.t[k]).solve(xy);
    factors.push_back(identity(2 * p) - (kI / denom) * J * q);
  }
  return factors;
}

CMatrix factor_product(const std::vector<CMatrix>& factors) {
  if (factors.empty()) throw Error(ErrorKind::DimensionMismatch, "no factors");
  CMatrix prod = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) prod = factors[k] * prod;
  return prod;
}

CMatrix halmos(const CMatrix& rho) {
  const Index p = rho.rows();
  if (rho.cols() != p) throw Error(ErrorKind::DimensionMismatch, "rho must be square");
  const double norm = spectral_norm(rho);
  if (!(norm < 1.0 - 1e-12)) {
    throw Error(ErrorKind::NotContractive, "||rho|| must be below 1").with_value(norm);
  }
  CMatrix D = zeros(2 * p, 2 * p);
  D.topLeftCorner(p, p) = inv_sqrtm_hpd(HermPD(identity(p) - rho * rho.adjoint()));
  D.bottomRightCorner(p, p) = inv_sqrtm_hpd(HermPD(identity(p) - rho.adjoint() * rho));
  CMatrix F(2 * p, 2 * p);
  F << identity(p), rho, rho.adjoint(), identity(p);
  return D * F;
}

CMatrix rho_from_C(const CMatrix& C) {
  const Index p = C.rows() / 2;
  return solve_checked(C.topLeftCorner(p, p), C.topRightCorner(p, p),
                       ErrorKind::NotPositiveDefinite);
}

CMatrix dirac_fundamental(const DiracChain& chain, Complex z, std::size_t k) {
  if (k > chain.length()) {
    throw Error(ErrorKind::IndexOutOfRange, "fundamental solution index exceeds chain length")
        .at_index(static_cast<long>(k));
  }
  const Index p = chain.p;
  const CMatrix j = signature_j(p);
  CMatrix W = identity(2 * p);
  for (std::size_t m = 0; m < k; ++m) W = (identity(2 * p) + kI * z * j * chain.C[m]) * W;
  return W;
}

CMatrix frame_toeplitz(const DiracChain& chain, std::size_t n, Complex z) {
  const Index p = chain.p;
  if (n == 0) return identity(2 * p);
  const Complex pre = 1.0 - 0.5 * kI * z;
  if (std::abs(pre) <= 1e-14) {
    throw Error(ErrorKind::PoleAtZ, "frame prefactor has a pole at -2i").at_point(z);
  }
  const CMatrix J = signature_J(p);
  const CMatrix j = signature_j(p);
  const CMatrix K = unitary_K(p);
  const CMatrix W = dirac_fundamental(chain, -0.5 * std::conj(z), n);
  return std::pow(pre, -static_cast<double>(n)) * (J * j * K * W.adjoint() * K.adjoint() * j * J);
}

CMatrix frame_toeplitz_node(const SNode& node, Complex z) {
  const CMatrix Jj = signature_J(node.p) * signature_j(node.p);
  return Jj * frame(node, -z) * Jj.adjoint();
}

MatrixFunction toeplitz_weyl(const DiracChain& chain, std::size_t n, const ParamPair& pair) {
  return [chain, n, pair](Complex z) { return lft(frame_toeplitz(chain, n, z), pair, z); };
}

std::vector<CMatrix> taylor_recover(const MatrixFunction& phi, std::size_t count,
                                    const TaylorOptions& options) {
  auto coefficients = [&](std::size_t nodes) {
    std::vector<CMatrix> samples;
    samples.reserve(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nodes);
      const Complex zeta = std::polar(options.radius, angle);
      const Complex z = 2.0 * kI * (1.0 - zeta) / (1.0 + zeta);
      CMatrix v;
      try {
        v = -kI * phi(z);
      } catch (const Error& e) {
        throw Error(ErrorKind::EvaluationFailure, e.what()).at_point(z);
      }
      if (!v.allFinite()) {
        throw Error(ErrorKind::EvaluationFailure, "non-finite value on the circle").at_point(z);
      }
      samples.push_back(v);
    }
    std::vector<CMatrix> out;
    for (std::size_t k = 0; k < count; ++k) {
      CMatrix acc = zeros(samples.front().rows(), samples.front().cols());
      for (std::size_t j = 0; j < nodes; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j * k % nodes) /
                             static_cast<double>(nodes);
        acc += std::polar(1.0, -angle) * samples[j];
      }
      out.push_back(acc / (static_cast<double>(nodes) * std::pow(options.radius, static_cast<double>(k))));
    }
    return out;
  };
  const std::vector<CMatrix> coarse = coefficients(options.nodes);
  const std::vector<CMatrix> fine = coefficients(2 * options.nodes);
  for (std::size_t k = 0; k < count; ++k) {
    const double drift = relative_difference(coarse[k], fine[k]);
    if (!(drift <= options.agreement)) {
      throw Error(ErrorKind::NotConverged, "Taylor coefficient changes under node doubling")
          .at_index(static_cast<long>(k))
          .with_value(drift);
    }
  }
  return fine;
}

double khrushchev_check(const std::vector<CMatrix>& rho, std::size_t split, const ParamPair& pair,
                        const std::vector<Complex>& zgrid) {
  if (split > rho.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "split exceeds chain length")
        .at_index(static_cast<long>(split));
  }
  const DiracChain full = chain_from_verblunsky(rho);
  const DiracChain tail = full.slice(split, rho.size() - split);
  const Index p = full.p;
  double worst = 0.0;
  for (const Complex z : zgrid) {
    try {
      const CMatrix phi = lft(frame_toeplitz(full, full.length(), z), pair, z);
      const CMatrix phi_tail = lft(frame_toeplitz(tail, tail.length(), z), pair, z);
      const CMatrix composed = lft(frame_toeplitz(full, split, z), -kI * phi_tail, identity(p));
      worst = std::max(worst, (phi - composed).norm());
    } catch (Error& e) {
      throw e.at_point(z);
    }
  }
  return worst;
}

}  // namespace snodelab
