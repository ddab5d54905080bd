#pragma once

// Truncated Beurling quotients Q_theta = H^2 (-) theta H^2 and the compressed
// shifts C_{z_i} = P_Q T_{z_i}|_Q (S_Theta in the block case).
//
// The truncated theta H^2 is spanned by the columns theta z^k that fit the box
// entirely (k in the safe box). Columns that only partially fit are left out,
// so the basis is exact in the interior and differs from the true Q_theta near
// the top layers of the box.

#include "hardy/lattice.hpp"
#include "hardy/linalg.hpp"
#include "hardy/operators.hpp"
#include "hardy/symbols.hpp"

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace hardy {

template <typename Scalar = Complex>
struct ModelSpace {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  TorusSymbol<Scalar> theta;
  Box box;
  Box safe_box;
  MatrixX<Scalar> basis;  // (p N) x q, orthonormal columns
  InnerCertificate<Real> certificate;
  bool boundary_note = false;  // basis is degraded near the top layers of the box

  int block_size() const { return theta.block_size(); }
  int dimension() const { return box.dimension(); }
  long q() const { return basis.cols(); }
};

namespace detail {
/// Appends v to the orthonormal set `q` (columns [0, used)) if it survives two rounds of
/// classical Gram-Schmidt with norm above `floor`.
template <typename Scalar>
bool orthonormal_append(MatrixX<Scalar>& q, long& used, VectorX<Scalar> v, typename Eigen::NumTraits<Scalar>::Real floor) {
  for (int pass = 0; pass < 2; ++pass)
    if (used > 0) v -= q.leftCols(used) * (q.leftCols(used).adjoint() * v);
  const auto nv = v.norm();
  if (nv <= floor) return false;
  q.col(used++) = v / nv;
  return true;
}
}  // namespace detail

/// Columns Theta z^k e_b (k in the safe box, b < p) of the truncated range of T_Theta.
template <typename Scalar>
MatrixX<Scalar> range_columns(const TorusSymbol<Scalar>& theta, const Box& box, const Box& safe_box) {
  const int p = theta.block_size();
  const long N = box.size();
  MatrixX<Scalar> cols = MatrixX<Scalar>::Zero(N * p, safe_box.size() * p);
  for (long s = 0; s < safe_box.size(); ++s) {
    const MultiIndex k = safe_box.index_at(s);
    for (const auto& [f, c] : theta.coefficients()) {
      const long row = box.position(k + f);
      cols.block(row * p, s * p, p, p) = c;
    }
  }
  return cols;
}

template <typename Scalar>
ModelSpace<Scalar> model_basis(const TorusSymbol<Scalar>& theta, const Box& box, double tol = kExactTolerance,
                               std::optional<TorusGrid> grid = std::nullopt) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (theta.dimension() != box.dimension()) throw std::invalid_argument("model_basis: theta and box dimensions differ");
  if (!theta.is_analytic()) throw std::invalid_argument("model_basis: theta must be analytic");
  auto cert = is_inner(theta, grid.value_or(default_grid(theta)), static_cast<Real>(tol));
  if (!cert.passed) throw std::invalid_argument("model_basis: theta failed the inner certificate");
  const auto range = theta.frequency_range();
  std::vector<int> caps;
  for (int i = 0; i < box.dimension(); ++i) {
    const int c = box.cap(i) - range[static_cast<std::size_t>(i)].second;
    if (c < 0) throw std::invalid_argument("model_basis: no column theta z^k fits the box (empty safe box)");
    caps.push_back(c);
  }
  const Box safe(caps);
  const int p = theta.block_size();
  const long dim = box.size() * p;
  const MatrixX<Scalar> range_cols = range_columns(theta, box, safe);
  const long r = range_cols.cols();
  const long q = dim - r;

  // Orthonormalize the range, then sweep the unit vectors e_0, e_1, ... against it. For
  // monomial theta this returns exactly the monomials outside theta H^2, in basis order.
  const Real floor = Real(1e-8);
  MatrixX<Scalar> work(dim, dim);
  long used = 0;
  for (long c = 0; c < r; ++c)
    if (!detail::orthonormal_append<Scalar>(work, used, range_cols.col(c), floor))
      throw std::invalid_argument("model_basis: columns theta z^k are numerically dependent");
  for (long j = 0; j < dim && used < dim; ++j)
    detail::orthonormal_append<Scalar>(work, used, VectorX<Scalar>::Unit(dim, j), floor);
  MatrixX<Scalar> basis;
  if (used == dim) {
    basis = work.rightCols(q);
  } else {
    // Sweep lost vectors to the floor; take the complement from a full SVD instead.
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(range_cols, Eigen::ComputeFullU);
    basis = svd.matrixU().rightCols(q);
  }
  ModelSpace<Scalar> ms{theta, box, safe, std::move(basis), cert, safe.size() < box.size()};
  return ms;
}

template <typename Scalar>
struct CompressedShift {
  int direction = 0;
  MatrixX<Scalar> matrix;
};

template <typename Scalar>
CompressedShift<Scalar> compressed_shift(const ModelSpace<Scalar>& ms, int i) {
  if (i < 0 || i >= ms.dimension()) throw std::invalid_argument("compressed_shift: direction out of range");
  return {i, compress(shift<Scalar>(ms.box, i, ms.block_size()), ms.basis)};
}

/// ||A - C_i^* A C_i|| for each direction i.
template <typename Scalar>
std::vector<typename Eigen::NumTraits<Scalar>::Real> invariance_residual(const ModelSpace<Scalar>& ms, const MatrixX<Scalar>& a) {
  if (a.rows() != ms.q() || a.cols() != ms.q()) throw std::invalid_argument("invariance_residual: operator is not q x q");
  std::vector<typename Eigen::NumTraits<Scalar>::Real> out;
  for (int i = 0; i < ms.dimension(); ++i) {
    const MatrixX<Scalar> c = compressed_shift(ms, i).matrix;
    out.push_back(spectral_norm((a - c.adjoint() * a * c).eval()));
  }
  return out;
}

/// The map A -> (A - C_i^* A C_i)_i on column-major vec(A): blocks I - C_i^T (x) C_i^*.
template <typename Scalar>
MatrixX<Scalar> stacked_invariance_map(const std::vector<MatrixX<Scalar>>& shifts) {
  if (shifts.empty()) return {};
  const long q = shifts.front().rows();
  const long q2 = q * q;
  MatrixX<Scalar> out(static_cast<long>(shifts.size()) * q2, q2);
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    const MatrixX<Scalar>& c = shifts[i];
    const MatrixX<Scalar> cstar = c.adjoint();
    auto blk = out.block(static_cast<long>(i) * q2, 0, q2, q2);
    for (long a = 0; a < q; ++a)
      for (long b = 0; b < q; ++b) blk.block(a * q, b * q, q, q) = -c(b, a) * cstar;
    blk.diagonal().array() += Scalar(1);
  }
  return out;
}

template <typename Real>
struct InvarianceKernel {
  Real sigma_min = 0;
  long kernel_dimension = 0;
  Real tolerance = 0;
  bool dense = true;     // false: iterative estimate, kernel_dimension is 0 or "at least 1"
  Real residual = 0;     // iterative path only
  long q = 0;
};

/// Full JacobiSVD of the stacked map while q <= dense_limit (the map has q^2 columns);
/// beyond that a matrix-free power iteration estimates sigma_min only.
template <typename Scalar>
InvarianceKernel<typename Eigen::NumTraits<Scalar>::Real> invariance_kernel(const ModelSpace<Scalar>& ms, double tol = 1e-8,
                                                                            long dense_limit = 40) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  InvarianceKernel<Real> out;
  out.tolerance = static_cast<Real>(tol);
  out.q = ms.q();
  if (ms.q() < 1) throw std::invalid_argument("invariance_kernel: empty model space");
  std::vector<MatrixX<Scalar>> shifts;
  for (int i = 0; i < ms.dimension(); ++i) shifts.push_back(compressed_shift(ms, i).matrix);
  if (ms.q() <= dense_limit) {
    const MatrixX<Scalar> map = stacked_invariance_map(shifts);
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(map);
    const auto& s = svd.singularValues();
    out.sigma_min = s(s.size() - 1);
    out.kernel_dimension = (s.array() <= out.tolerance).count();
    return out;
  }
  // Smallest eigenvalue of G = L^*L by power iteration on (mu I - G), applied matrix-free.
  out.dense = false;
  const long q = ms.q();
  auto apply_gram = [&](const MatrixX<Scalar>& a) {
    MatrixX<Scalar> acc = MatrixX<Scalar>::Zero(q, q);
    for (const auto& c : shifts) {
      const MatrixX<Scalar> y = a - c.adjoint() * a * c;
      acc += y - c * y * c.adjoint();
    }
    return acc;
  };
  Real mu = 0;
  for (const auto& c : shifts) {
    const Real nc = spectral_norm(c);
    mu += (1 + nc * nc) * (1 + nc * nc);
  }
  std::mt19937_64 rng(11);
  std::normal_distribution<Real> dist(0, 1);
  MatrixX<Scalar> v(q, q);
  for (long j = 0; j < v.size(); ++j) v.data()[j] = Scalar(dist(rng), dist(rng));
  v /= v.norm();
  Real lambda = 0;
  for (int it = 0; it < 5000; ++it) {
    MatrixX<Scalar> w = mu * v - apply_gram(v);
    const Real nw = w.norm();
    v = w / nw;
    if (std::abs(nw - lambda) <= Real(1e-13) * nw) {
      lambda = nw;
      break;
    }
    lambda = nw;
  }
  const Real g_min = std::max(Real(0), mu - lambda);
  out.residual = (apply_gram(v) - g_min * v).norm();
  out.sigma_min = std::sqrt(g_min);
  out.kernel_dimension = out.sigma_min <= out.tolerance ? 1 : 0;
  return out;
}

template <typename Real>
struct ModelCompactness {
  std::vector<std::vector<Real>> norms;  // per direction, m = 1 .. m_max
  Real tolerance = 0;
  bool compact = false;
};

/// ||C_i^{*m} T C_i^m|| for m = 1 .. m_max in every direction; the only possible limit is 0.
template <typename Scalar>
ModelCompactness<typename Eigen::NumTraits<Scalar>::Real> model_compactness_test(const ModelSpace<Scalar>& ms,
                                                                                 const MatrixX<Scalar>& t, int m_max,
                                                                                 double tol = kLimitTolerance) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (m_max < 1) throw std::invalid_argument("model_compactness_test: m_max must be at least 1");
  if (t.rows() != ms.q() || t.cols() != ms.q()) throw std::invalid_argument("model_compactness_test: operator is not q x q");
  ModelCompactness<Real> out;
  out.tolerance = static_cast<Real>(tol);
  out.compact = true;
  for (int i = 0; i < ms.dimension(); ++i) {
    const MatrixX<Scalar> c = compressed_shift(ms, i).matrix;
    MatrixX<Scalar> power = c;
    std::vector<Real> seq;
    for (int m = 1; m <= m_max; ++m) {
      seq.push_back(spectral_norm((power.adjoint() * t * power).eval()));
      if (m < m_max) power = (power * c).eval();
    }
    out.compact = out.compact && seq.back() <= out.tolerance;
    out.norms.push_back(std::move(seq));
  }
  return out;
}

}  // namespace hardy
