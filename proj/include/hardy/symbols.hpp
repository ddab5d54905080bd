#pragma once

// Finitely supported Fourier representations of (block) functions on the
// torus T^n. A symbol stores its p x p coefficient blocks keyed by frequency,
// plus a sup-norm bound on whatever was truncated away (zero for exact
// trigonometric polynomials).

#include "hardy/lattice.hpp"
#include "hardy/linalg.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hardy {

template <typename Scalar = Complex>
class TorusSymbol {
 public:
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Block = MatrixX<Scalar>;
  using CoefficientMap = std::map<MultiIndex, Block>;

  TorusSymbol(int n, int p, CoefficientMap coefficients = {}, Real tail_bound = 0)
      : n_(n), p_(p), coefficients_(std::move(coefficients)), tail_bound_(tail_bound) {
    if (n_ < 1) throw std::invalid_argument("TorusSymbol: dimension must be at least 1");
    if (p_ < 1) throw std::invalid_argument("TorusSymbol: block size must be at least 1");
    if (!(tail_bound_ >= 0)) throw std::invalid_argument("TorusSymbol: tail bound must be nonnegative");
    for (const auto& [k, c] : coefficients_) {
      if (k.size() != n_) throw std::invalid_argument("TorusSymbol: frequency has wrong dimension");
      if (c.rows() != p_ || c.cols() != p_) throw std::invalid_argument("TorusSymbol: coefficient block has wrong size");
    }
  }

  int dimension() const { return n_; }
  int block_size() const { return p_; }
  Real tail_bound() const { return tail_bound_; }
  const CoefficientMap& coefficients() const { return coefficients_; }

  Block coefficient(const MultiIndex& k) const {
    auto it = coefficients_.find(k);
    return it == coefficients_.end() ? Block::Zero(p_, p_) : it->second;
  }

  /// Scalar coefficient; only meaningful for p == 1.
  Scalar scalar_coefficient(const MultiIndex& k) const {
    auto it = coefficients_.find(k);
    return it == coefficients_.end() ? Scalar(0) : it->second(0, 0);
  }

  bool is_analytic() const {
    for (const auto& entry : coefficients_)
      if (!entry.first.nonnegative()) return false;
    return true;
  }

  /// sum_k ||c_k||, a bound on the sup norm of the represented polynomial part.
  Real coefficient_sum() const {
    Real s = 0;
    for (const auto& entry : coefficients_) s += spectral_norm(entry.second);
    return s;
  }

  Real sup_norm_estimate() const { return coefficient_sum() + tail_bound_; }

  /// Per-variable [min, max] frequency over the support; {0,0} for an empty support.
  std::vector<std::pair<int, int>> frequency_range() const {
    std::vector<std::pair<int, int>> r(static_cast<std::size_t>(n_), {0, 0});
    bool first = true;
    for (const auto& entry : coefficients_) {
      for (int i = 0; i < n_; ++i) {
        auto& [lo, hi] = r[static_cast<std::size_t>(i)];
        const int v = entry.first[i];
        if (first || v < lo) lo = v;
        if (first || v > hi) hi = v;
      }
      first = false;
    }
    return r;
  }

  TorusSymbol adjoint() const {
    CoefficientMap out;
    for (const auto& [k, c] : coefficients_) out.emplace(-k, c.adjoint());
    return TorusSymbol(n_, p_, std::move(out), tail_bound_);
  }

 private:
  int n_;
  int p_;
  CoefficientMap coefficients_;
  Real tail_bound_;
};

using Symbol = TorusSymbol<Complex>;

template <typename Scalar = Complex>
TorusSymbol<Scalar> from_coefficients(int n, int p, const std::vector<std::pair<MultiIndex, MatrixX<Scalar>>>& entries) {
  typename TorusSymbol<Scalar>::CoefficientMap map;
  for (const auto& [k, c] : entries) {
    if (k.size() != n) throw std::invalid_argument("from_coefficients: frequency has wrong dimension");
    if (c.rows() != p || c.cols() != p) throw std::invalid_argument("from_coefficients: coefficient block is not p x p");
    if (!map.emplace(k, c).second) throw std::invalid_argument("from_coefficients: duplicate frequency");
  }
  return TorusSymbol<Scalar>(n, p, std::move(map));
}

template <typename Scalar = Complex>
TorusSymbol<Scalar> from_scalar_coefficients(int n, const std::vector<std::pair<MultiIndex, Scalar>>& entries) {
  std::vector<std::pair<MultiIndex, MatrixX<Scalar>>> blocks;
  blocks.reserve(entries.size());
  for (const auto& [k, c] : entries) blocks.emplace_back(k, MatrixX<Scalar>::Constant(1, 1, c));
  return from_coefficients<Scalar>(n, 1, blocks);
}

template <typename Scalar = Complex>
TorusSymbol<Scalar> monomial(const MultiIndex& k, int p = 1) {
  typename TorusSymbol<Scalar>::CoefficientMap map;
  map.emplace(k, MatrixX<Scalar>::Identity(p, p));
  return TorusSymbol<Scalar>(k.size(), p, std::move(map));
}

template <typename Scalar = Complex>
TorusSymbol<Scalar> constant_symbol(int n, int p = 1) {
  return monomial<Scalar>(MultiIndex::zero(n), p);
}

/// Uniform grid on the torus: point j has angles 2*pi*j_i/G_i.
struct TorusGrid {
  std::vector<int> sizes;

  long size() const {
    long s = 1;
    for (int g : sizes) s *= g;
    return s;
  }
  Box as_box() const {
    std::vector<int> caps;
    for (int g : sizes) caps.push_back(g - 1);
    return Box(std::move(caps));
  }
  std::vector<double> angles(long j) const {
    const MultiIndex idx = as_box().index_at(j);
    std::vector<double> out(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i)
      out[i] = 2.0 * std::numbers::pi * idx[static_cast<int>(i)] / sizes[i];
    return out;
  }
};

/// Twice the frequency span plus one, rounded up to a power of two, per variable.
template <typename Scalar>
TorusGrid default_grid(const TorusSymbol<Scalar>& sym) {
  TorusGrid g;
  for (auto [lo, hi] : sym.frequency_range()) g.sizes.push_back(next_pow2(2 * (hi - lo) + 1));
  return g;
}

template <typename Scalar>
MatrixX<Scalar> evaluate(const TorusSymbol<Scalar>& sym, const std::vector<double>& angles) {
  using Real = typename TorusSymbol<Scalar>::Real;
  if (static_cast<int>(angles.size()) != sym.dimension()) throw std::invalid_argument("evaluate: point has wrong dimension");
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(sym.block_size(), sym.block_size());
  for (const auto& [k, c] : sym.coefficients()) {
    Real phase = 0;
    for (int i = 0; i < sym.dimension(); ++i) phase += static_cast<Real>(k[i]) * static_cast<Real>(angles[static_cast<std::size_t>(i)]);
    out += Scalar(std::cos(phase), std::sin(phase)) * c;
  }
  return out;
}

/// Samples on every grid point, row-major over the grid.
template <typename Scalar>
std::vector<MatrixX<Scalar>> evaluate_on_grid(const TorusSymbol<Scalar>& sym, const TorusGrid& grid) {
  if (static_cast<int>(grid.sizes.size()) != sym.dimension()) throw std::invalid_argument("evaluate_on_grid: grid has wrong dimension");
  std::vector<MatrixX<Scalar>> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (long j = 0; j < grid.size(); ++j) out.push_back(evaluate(sym, grid.angles(j)));
  return out;
}

/// Recovers the Fourier coefficients with |k_i| <= half_widths[i] from samples on a uniform grid.
/// Requires G_i >= 2*half_widths[i] + 1 so that the declared support does not alias.
/// Coefficients below 64 eps times the largest one are dropped.
template <typename Scalar>
TorusSymbol<Scalar> coefficients_from_samples(const std::vector<MatrixX<Scalar>>& samples, const TorusGrid& grid,
                                              const std::vector<int>& half_widths, typename TorusSymbol<Scalar>::Real tail_bound = 0) {
  using Real = typename TorusSymbol<Scalar>::Real;
  const int n = static_cast<int>(grid.sizes.size());
  if (n < 1 || static_cast<int>(half_widths.size()) != n) throw std::invalid_argument("coefficients_from_samples: support dimension mismatch");
  if (static_cast<long>(samples.size()) != grid.size()) throw std::invalid_argument("coefficients_from_samples: sample count does not match grid");
  for (int i = 0; i < n; ++i) {
    if (half_widths[static_cast<std::size_t>(i)] < 0) throw std::invalid_argument("coefficients_from_samples: negative support width");
    if (grid.sizes[static_cast<std::size_t>(i)] < 2 * half_widths[static_cast<std::size_t>(i)] + 1)
      throw std::invalid_argument("coefficients_from_samples: grid of size " + std::to_string(grid.sizes[static_cast<std::size_t>(i)]) +
                                  " aliases the declared support in variable " + std::to_string(i));
  }
  const int p = static_cast<int>(samples.front().rows());
  std::vector<std::vector<Scalar>> spectra(static_cast<std::size_t>(p * p));
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      auto& data = spectra[static_cast<std::size_t>(a * p + b)];
      data.resize(samples.size());
      for (std::size_t j = 0; j < samples.size(); ++j) data[j] = samples[j](a, b);
      fft_nd(data, grid.sizes, false);
    }
  }
  const Real scale = Real(1) / static_cast<Real>(grid.size());
  const Box grid_box = grid.as_box();
  std::vector<int> caps;
  for (int w : half_widths) caps.push_back(2 * w);
  const Box support(caps);
  std::vector<std::pair<MultiIndex, MatrixX<Scalar>>> entries;
  Real largest = 0;
  for (long j = 0; j < support.size(); ++j) {
    MultiIndex k = support.index_at(j);
    MultiIndex slot = k;
    for (int i = 0; i < n; ++i) {
      k[i] -= half_widths[static_cast<std::size_t>(i)];
      const int g = grid.sizes[static_cast<std::size_t>(i)];
      slot[i] = ((k[i] % g) + g) % g;
    }
    const long s = grid_box.position(slot);
    MatrixX<Scalar> c(p, p);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) c(a, b) = spectra[static_cast<std::size_t>(a * p + b)][static_cast<std::size_t>(s)] * scale;
    largest = std::max(largest, spectral_norm(c));
    entries.emplace_back(std::move(k), std::move(c));
  }
  const Real cutoff = Real(64) * Eigen::NumTraits<Real>::epsilon() * largest;
  typename TorusSymbol<Scalar>::CoefficientMap map;
  for (auto& [k, c] : entries)
    if (spectral_norm(c) > cutoff) map.emplace(std::move(k), std::move(c));
  return TorusSymbol<Scalar>(n, p, std::move(map), tail_bound);
}

template <typename Scalar>
TorusSymbol<Scalar> multiply(const TorusSymbol<Scalar>& a, const TorusSymbol<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("multiply: dimension mismatch");
  if (a.block_size() != b.block_size()) throw std::invalid_argument("multiply: block sizes are not composable");
  typename TorusSymbol<Scalar>::CoefficientMap out;
  for (const auto& [ka, ca] : a.coefficients()) {
    for (const auto& [kb, cb] : b.coefficients()) {
      MatrixX<Scalar> prod = ca * cb;
      auto [it, inserted] = out.emplace(ka + kb, prod);
      if (!inserted) it->second += prod;
    }
  }
  const auto sa = a.coefficient_sum(), sb = b.coefficient_sum();
  const auto tail = (sa + a.tail_bound()) * (sb + b.tail_bound()) - sa * sb;
  return TorusSymbol<Scalar>(a.dimension(), a.block_size(), std::move(out), tail);
}

/// Truncated expansion of (z - a)/(1 - conj(a) z) through z^degree, with the sup-norm tail bound.
template <typename Scalar = Complex>
TorusSymbol<Scalar> blaschke_factor(Scalar a, int degree) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Real r = std::abs(a);
  if (!(r < Real(1))) throw std::invalid_argument("blaschke_factor: zero must lie in the open unit disc");
  if (degree < 0) throw std::invalid_argument("blaschke_factor: negative degree");
  typename TorusSymbol<Scalar>::CoefficientMap map;
  auto put = [&](int k, Scalar c) {
    if (c != Scalar(0)) map.emplace(MultiIndex{k}, MatrixX<Scalar>::Constant(1, 1, c));
  };
  put(0, -a);
  Scalar power(1);
  const Scalar abar = std::conj(a);
  const Real weight = Real(1) - r * r;
  for (int k = 1; k <= degree; ++k) {
    put(k, weight * power);
    power *= abar;
  }
  const Real tail = weight * std::pow(r, degree) / (Real(1) - r);
  return TorusSymbol<Scalar>(1, 1, std::move(map), tail);
}

/// theta(z) = prod_i theta_i(z_i) from one-variable analytic scalar factors.
template <typename Scalar>
TorusSymbol<Scalar> product_inner(const std::vector<TorusSymbol<Scalar>>& factors) {
  using Real = typename TorusSymbol<Scalar>::Real;
  if (factors.empty()) throw std::invalid_argument("product_inner: no factors");
  const int n = static_cast<int>(factors.size());
  for (const auto& f : factors) {
    if (f.dimension() != 1 || f.block_size() != 1) throw std::invalid_argument("product_inner: factors must be scalar one-variable symbols");
    if (!f.is_analytic()) throw std::invalid_argument("product_inner: factors must be analytic");
  }
  typename TorusSymbol<Scalar>::CoefficientMap acc;
  acc.emplace(MultiIndex::zero(n), MatrixX<Scalar>::Identity(1, 1));
  Real sup_exact = 1, sup_full = 1;
  for (int i = 0; i < n; ++i) {
    typename TorusSymbol<Scalar>::CoefficientMap next;
    for (const auto& [k, c] : acc) {
      for (const auto& [kf, cf] : factors[static_cast<std::size_t>(i)].coefficients()) {
        MultiIndex key = k;
        key[i] += kf[0];
        MatrixX<Scalar> prod = c * cf;
        auto [it, inserted] = next.emplace(key, prod);
        if (!inserted) it->second += prod;
      }
    }
    acc = std::move(next);
    const Real s = factors[static_cast<std::size_t>(i)].coefficient_sum();
    sup_exact *= s;
    sup_full *= s + factors[static_cast<std::size_t>(i)].tail_bound();
  }
  return TorusSymbol<Scalar>(n, 1, std::move(acc), sup_full - sup_exact);
}

/// Stacks scalar one-variable-or-n-variable symbols into a diagonal block symbol.
template <typename Scalar>
TorusSymbol<Scalar> block_diagonal(const std::vector<TorusSymbol<Scalar>>& diagonal) {
  if (diagonal.empty()) throw std::invalid_argument("block_diagonal: no entries");
  const int n = diagonal.front().dimension();
  const int p = static_cast<int>(diagonal.size());
  typename TorusSymbol<Scalar>::CoefficientMap map;
  typename TorusSymbol<Scalar>::Real tail = 0;
  for (int a = 0; a < p; ++a) {
    const auto& d = diagonal[static_cast<std::size_t>(a)];
    if (d.dimension() != n || d.block_size() != 1) throw std::invalid_argument("block_diagonal: entries must be scalar symbols of equal dimension");
    for (const auto& [k, c] : d.coefficients()) {
      auto it = map.try_emplace(k, MatrixX<Scalar>::Zero(p, p)).first;
      it->second(a, a) = c(0, 0);
    }
    tail = std::max(tail, d.tail_bound());
  }
  return TorusSymbol<Scalar>(n, p, std::move(map), tail);
}

template <typename Real>
struct InnerCertificate {
  std::vector<int> grid;
  Real max_deviation = 0;
  Real tolerance = 0;
  Real tail_allowance = 0;
  bool passed = false;
};

/// Scalar: max | |theta| - 1 |. Block: max || Theta^* Theta - I ||. Passes within tol plus the
/// tail allowance (tail for scalars, 2t + 3t^2 for blocks).
template <typename Scalar>
InnerCertificate<typename TorusSymbol<Scalar>::Real> is_inner(const TorusSymbol<Scalar>& sym, const TorusGrid& grid,
                                                              typename TorusSymbol<Scalar>::Real tol) {
  using Real = typename TorusSymbol<Scalar>::Real;
  if (!sym.is_analytic()) throw std::invalid_argument("is_inner: inner functions must have analytic support");
  InnerCertificate<Real> cert;
  cert.grid = grid.sizes;
  cert.tolerance = tol;
  const Real t = sym.tail_bound();
  const int p = sym.block_size();
  cert.tail_allowance = p == 1 ? t : 2 * t + 3 * t * t;
  for (const auto& value : evaluate_on_grid(sym, grid)) {
    Real dev;
    if (p == 1)
      dev = std::abs(std::abs(value(0, 0)) - Real(1));
    else
      dev = spectral_norm((value.adjoint() * value - MatrixX<Scalar>::Identity(p, p)).eval());
    cert.max_deviation = std::max(cert.max_deviation, dev);
  }
  // Slack of a few ulps so exactly-representable allowances are not lost to rounding.
  const Real slack = Real(16) * Eigen::NumTraits<Real>::epsilon();
  cert.passed = cert.max_deviation <= tol + cert.tail_allowance * (Real(1) + slack) + slack;
  return cert;
}

template <typename Scalar>
InnerCertificate<typename TorusSymbol<Scalar>::Real> is_inner(const TorusSymbol<Scalar>& sym, typename TorusSymbol<Scalar>::Real tol) {
  return is_inner(sym, default_grid(sym), tol);
}

template <typename Real>
struct InvertibilityReport {
  bool invertible = false;
  Real min_abs_det = 0;
  Real threshold = 0;
  std::vector<int> grid;
};

template <typename Scalar>
InvertibilityReport<typename TorusSymbol<Scalar>::Real> is_invertible_ae(const TorusSymbol<Scalar>& sym, const TorusGrid& grid,
                                                                         typename TorusSymbol<Scalar>::Real delta) {
  using Real = typename TorusSymbol<Scalar>::Real;
  InvertibilityReport<Real> rep;
  rep.threshold = delta;
  rep.grid = grid.sizes;
  bool first = true;
  for (const auto& value : evaluate_on_grid(sym, grid)) {
    const Real d = std::abs(value.determinant());
    if (first || d < rep.min_abs_det) rep.min_abs_det = d;
    first = false;
  }
  rep.invertible = rep.min_abs_det >= delta;
  return rep;
}

}  // namespace hardy
