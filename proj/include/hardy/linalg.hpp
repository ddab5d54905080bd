#pragma once

// Dense helpers shared by the symbol and operator layers: spectral norms,
// a power-iteration norm estimate, and an n-dimensional FFT over row-major
// arrays built from Eigen's one-dimensional FFT.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace hardy {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;

/// Identities that hold exactly for polynomial inputs.
inline constexpr double kExactTolerance = 1e-10;
/// Limit and convergence verdicts.
inline constexpr double kLimitTolerance = 1e-6;

inline int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

/// Largest singular value. Empty matrices have norm zero.
///
/// Exactly-zero rows and columns are dropped first; the norm is the square root of
/// the top eigenvalue of the smaller Gram matrix, accurate to about eps * ||A||.
/// (Eigen 3.4.0's BDCSVD can return a wrong leading value when deflation kicks in,
/// which zero-padded sections trigger routinely.)
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using Plain = typename Derived::PlainObject;
  if (a.size() == 0) return Real(0);
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  const Plain m = a;
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    if (!m.row(r).isZero(0)) rows.push_back(r);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (!m.col(c).isZero(0)) cols.push_back(c);
  if (rows.empty()) return Real(0);
  const Plain core = m(rows, cols);
  if (core.rows() == 1 || core.cols() == 1) return core.norm();
  const Plain gram = core.rows() <= core.cols() ? Plain(core * core.adjoint()) : Plain(core.adjoint() * core);
  Eigen::SelfAdjointEigenSolver<Plain> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(Real(0), eig.eigenvalues().maxCoeff()));
}

template <typename Real>
struct NormEstimate {
  Real value = 0;
  Real residual = 0;  // ||A^*A v - value^2 v|| at the final iterate
  int iterations = 0;
};

/// Power iteration on A^*A from a seeded random start.
template <typename Derived>
NormEstimate<typename Eigen::NumTraits<typename Derived::Scalar>::Real> power_iteration_norm(
    const Eigen::MatrixBase<Derived>& a, double rel_tol = 1e-12, int max_iter = 1000, unsigned seed = 7) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  NormEstimate<Real> est;
  if (a.size() == 0) return est;
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> dist(0, 1);
  VectorX<Scalar> v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
      v(i) = Scalar(dist(rng), dist(rng));
    else
      v(i) = dist(rng);
  }
  v.normalize();
  Real lambda = 0;
  for (int it = 1; it <= max_iter; ++it) {
    VectorX<Scalar> w = a.adjoint() * (a * v);
    const Real next = w.norm();
    est.iterations = it;
    if (next == Real(0)) {
      lambda = 0;
      break;
    }
    est.residual = (w - next * v).norm();
    v = w / next;
    const bool converged = std::abs(next - lambda) <= rel_tol * next;
    lambda = next;
    if (converged) break;
  }
  est.value = std::sqrt(lambda);
  return est;
}

/// Forward (or inverse, unscaled) n-dimensional DFT of a row-major array with extents `dims`.
/// Inverse transforms are divided by the total size, matching numpy's ifftn.
template <typename Real>
void fft_nd(std::vector<std::complex<Real>>& data, const std::vector<int>& dims, bool inverse) {
  long total = 1;
  for (int d : dims) total *= d;
  if (static_cast<long>(data.size()) != total) throw std::invalid_argument("fft_nd: data size does not match extents");
  Eigen::FFT<Real> fft;
  fft.SetFlag(Eigen::FFT<Real>::Unscaled);
  std::vector<std::complex<Real>> line, out;
  long stride = total;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const long extent = dims[axis];
    stride /= extent;
    if (extent == 1) continue;
    line.resize(static_cast<std::size_t>(extent));
    const long outer = total / (extent * stride);
    for (long o = 0; o < outer; ++o) {
      for (long s = 0; s < stride; ++s) {
        const long base = o * extent * stride + s;
        for (long j = 0; j < extent; ++j) line[static_cast<std::size_t>(j)] = data[static_cast<std::size_t>(base + j * stride)];
        if (inverse)
          fft.inv(out, line);
        else
          fft.fwd(out, line);
        for (long j = 0; j < extent; ++j) data[static_cast<std::size_t>(base + j * stride)] = out[static_cast<std::size_t>(j)];
      }
    }
  }
  if (inverse) {
    const Real scale = Real(1) / static_cast<Real>(total);
    for (auto& x : data) x *= scale;
  }
}

}  // namespace hardy
