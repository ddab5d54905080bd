#pragma once

// Seeded random instances: trigonometric polynomials, dense matrices and
// finite-rank operators supported on the first layers of a box.

#include "hardy/lattice.hpp"
#include "hardy/operators.hpp"
#include "hardy/symbols.hpp"

#include <random>

namespace hardy {

template <typename Scalar = Complex, typename Rng>
Scalar random_scalar(Rng& rng) {
  std::normal_distribution<typename Eigen::NumTraits<Scalar>::Real> dist(0, 1);
  const auto re = dist(rng);
  const auto im = dist(rng);
  return Scalar(re, im);
}

template <typename Scalar = Complex, typename Rng>
MatrixX<Scalar> random_matrix(long rows, long cols, Rng& rng) {
  MatrixX<Scalar> m(rows, cols);
  for (long c = 0; c < cols; ++c)
    for (long r = 0; r < rows; ++r) m(r, c) = random_scalar<Scalar>(rng);
  return m;
}

/// Coefficients on frequencies in [lo, hi]^n, each kept with probability 1/2 (the zero
/// frequency always), Gaussian entries.
template <typename Scalar = Complex, typename Rng>
TorusSymbol<Scalar> random_trig_polynomial(int n, int p, int lo, int hi, Rng& rng) {
  std::vector<int> caps(static_cast<std::size_t>(n), hi - lo);
  const Box range(caps);
  std::bernoulli_distribution keep(0.5);
  typename TorusSymbol<Scalar>::CoefficientMap map;
  for (long j = 0; j < range.size(); ++j) {
    MultiIndex f = range.index_at(j);
    for (int i = 0; i < n; ++i) f[i] += lo;
    const bool take = keep(rng) || f == MultiIndex::zero(n);
    if (take) map.emplace(std::move(f), random_matrix<Scalar>(p, p, rng));
  }
  return TorusSymbol<Scalar>(n, p, std::move(map));
}

/// Random operator whose blocks vanish unless both monomials lie in the layer cube k_i < m0.
template <typename Scalar = Complex, typename Rng>
TruncatedOperator<Scalar> random_layer_operator(const Box& box, int p, int m0, Rng& rng) {
  const long N = box.size();
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(N * p, N * p);
  std::vector<long> inside;
  for (long pos = 0; pos < N; ++pos) {
    const MultiIndex k = box.index_at(pos);
    bool in = true;
    for (int i = 0; i < k.size(); ++i) in = in && k[i] < m0;
    if (in) inside.push_back(pos);
  }
  for (long c : inside)
    for (long r : inside) m.block(r * p, c * p, p, p) = random_matrix<Scalar>(p, p, rng);
  return TruncatedOperator<Scalar>(box, p, std::move(m));
}

/// Tensor flip J[l, k] = prod_i delta(l_i, d_i - k_i), blockwise identity.
template <typename Scalar = Complex>
TruncatedOperator<Scalar> flip_operator(const Box& box, int p = 1) {
  const long N = box.size();
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(N * p, N * p);
  for (long col = 0; col < N; ++col) {
    MultiIndex l = box.index_at(col);
    for (int i = 0; i < l.size(); ++i) l[i] = box.cap(i) - l[i];
    m.block(box.position(l) * p, col * p, p, p).setIdentity();
  }
  return TruncatedOperator<Scalar>(box, p, std::move(m));
}

}  // namespace hardy
