#pragma once

// Dense (block) operators on the truncated monomial basis. Layout is
// block-major: the p x p block for monomials (l, k) sits at rows
// [p*pos(l), p*pos(l)+p) and columns [p*pos(k), p*pos(k)+p).

#include "hardy/lattice.hpp"
#include "hardy/linalg.hpp"
#include "hardy/symbols.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace hardy {

enum class StructureKind { general, toeplitz, projector, shift };

inline const char* to_string(StructureKind k) {
  switch (k) {
    case StructureKind::general: return "general";
    case StructureKind::toeplitz: return "toeplitz";
    case StructureKind::projector: return "projector";
    case StructureKind::shift: return "shift";
  }
  return "general";
}

template <typename Scalar>
struct Structure {
  StructureKind kind = StructureKind::general;
  std::shared_ptr<const TorusSymbol<Scalar>> symbol;  // set for toeplitz and shift
  int direction = -1;                                 // set for shift
};

template <typename Scalar = Complex>
class TruncatedOperator {
 public:
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = MatrixX<Scalar>;

  TruncatedOperator(Box box, int p, Matrix matrix, Structure<Scalar> structure = {})
      : box_(std::move(box)), p_(p), matrix_(std::move(matrix)), structure_(std::move(structure)) {
    if (p_ < 1) throw std::invalid_argument("TruncatedOperator: block size must be at least 1");
    const long dim = box_.size() * p_;
    if (matrix_.rows() != dim || matrix_.cols() != dim)
      throw std::invalid_argument("TruncatedOperator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                                  std::to_string(matrix_.cols()) + ", expected " + std::to_string(dim) + "x" +
                                  std::to_string(dim));
    if (structure_.kind == StructureKind::toeplitz && !structure_.symbol)
      throw std::invalid_argument("TruncatedOperator: toeplitz structure requires a symbol");
  }

  const Box& box() const { return box_; }
  int block_size() const { return p_; }
  int dimension() const { return box_.dimension(); }
  long size() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  const Structure<Scalar>& structure() const { return structure_; }

  /// The p x p block <T z^k, z^l>.
  Matrix block(const MultiIndex& l, const MultiIndex& k) const {
    return matrix_.block(box_.position(l) * p_, box_.position(k) * p_, p_, p_);
  }

 private:
  Box box_;
  int p_;
  Matrix matrix_;
  Structure<Scalar> structure_;
};

using Operator = TruncatedOperator<Complex>;

/// Finite section of T_phi: block (l, k) equals phi_hat(l - k).
template <typename Scalar>
TruncatedOperator<Scalar> toeplitz(const TorusSymbol<Scalar>& sym, const Box& box) {
  if (sym.dimension() != box.dimension()) throw std::invalid_argument("toeplitz: symbol and box dimensions differ");
  const int p = sym.block_size();
  const long N = box.size();
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(N * p, N * p);
  for (const auto& [f, c] : sym.coefficients()) {
    // Skip frequencies that cannot connect two indices of the box.
    bool fits = true;
    for (int i = 0; i < box.dimension(); ++i) fits = fits && std::abs(f[i]) <= box.cap(i);
    if (!fits) continue;
    for (long col = 0; col < N; ++col) {
      const MultiIndex l = box.index_at(col) + f;
      if (!box.contains(l)) continue;
      m.block(box.position(l) * p, col * p, p, p) = c;
    }
  }
  Structure<Scalar> s{StructureKind::toeplitz, std::make_shared<const TorusSymbol<Scalar>>(sym), -1};
  return TruncatedOperator<Scalar>(box, p, std::move(m), std::move(s));
}

/// Truncated multiplication by z_j (0-based j), acting blockwise on C^p.
template <typename Scalar = Complex>
TruncatedOperator<Scalar> shift(const Box& box, int j, int p = 1) {
  if (j < 0 || j >= box.dimension()) throw std::invalid_argument("shift: direction out of range");
  auto t = toeplitz(monomial<Scalar>(MultiIndex::unit(box.dimension(), j), p), box);
  Structure<Scalar> s = t.structure();
  s.kind = StructureKind::shift;
  s.direction = j;
  return TruncatedOperator<Scalar>(box, p, t.matrix(), std::move(s));
}

/// Orthogonal projector onto span{z^k (x) C^p : k_i <= m - 1 for all i}.
template <typename Scalar = Complex>
TruncatedOperator<Scalar> layer_projector(const Box& box, int m, int p = 1) {
  if (m < 0 || m > box.min_cap() + 1) throw std::invalid_argument("layer_projector: m out of range");
  const long N = box.size();
  MatrixX<Scalar> d = MatrixX<Scalar>::Zero(N * p, N * p);
  for (long pos = 0; pos < N; ++pos) {
    const MultiIndex k = box.index_at(pos);
    bool inside = true;
    for (int i = 0; i < k.size(); ++i) inside = inside && k[i] <= m - 1;
    if (inside) d.block(pos * p, pos * p, p, p).setIdentity();
  }
  return TruncatedOperator<Scalar>(box, p, std::move(d), Structure<Scalar>{StructureKind::projector, nullptr, -1});
}

/// Matvec through a multilevel circulant embedding. Each variable is padded to the
/// smallest power of two >= 2 d_i + 1, so the cyclic convolution never wraps.
template <typename Scalar = Complex>
class FastToeplitzApplier {
 public:
  using Real = typename Eigen::NumTraits<Scalar>::Real;

  explicit FastToeplitzApplier(const TruncatedOperator<Scalar>& op)
      : box_(op.box()), p_(op.block_size()) {
    if (op.structure().kind != StructureKind::toeplitz && op.structure().kind != StructureKind::shift)
      throw std::invalid_argument("apply_fast: operator carries no Toeplitz structure");
    const auto& sym = *op.structure().symbol;
    for (int i = 0; i < box_.dimension(); ++i) dims_.push_back(next_pow2(2 * box_.cap(i) + 1));
    padded_ = Box([&] {
      std::vector<int> caps;
      for (int g : dims_) caps.push_back(g - 1);
      return caps;
    }());
    const std::size_t L = static_cast<std::size_t>(padded_.size());
    kernels_.assign(static_cast<std::size_t>(p_ * p_), std::vector<Scalar>(L, Scalar(0)));
    for (const auto& [f, c] : sym.coefficients()) {
      bool fits = true;
      for (int i = 0; i < box_.dimension(); ++i) fits = fits && std::abs(f[i]) <= box_.cap(i);
      if (!fits) continue;
      MultiIndex slot = f;
      for (int i = 0; i < slot.size(); ++i) slot[i] = ((f[i] % dims_[static_cast<std::size_t>(i)]) + dims_[static_cast<std::size_t>(i)]) % dims_[static_cast<std::size_t>(i)];
      const long s = padded_.position(slot);
      for (int a = 0; a < p_; ++a)
        for (int b = 0; b < p_; ++b) kernels_[static_cast<std::size_t>(a * p_ + b)][static_cast<std::size_t>(s)] = c(a, b);
    }
    for (auto& k : kernels_) fft_nd(k, dims_, false);
    embed_ = embedded_positions(padded_, box_, MultiIndex::zero(box_.dimension()));
  }

  VectorX<Scalar> operator()(const Eigen::Ref<const VectorX<Scalar>>& v) const {
    const long N = box_.size();
    if (v.size() != N * p_) throw std::invalid_argument("apply_fast: vector has wrong length");
    const std::size_t L = static_cast<std::size_t>(padded_.size());
    std::vector<std::vector<Scalar>> spectra(static_cast<std::size_t>(p_), std::vector<Scalar>(L, Scalar(0)));
    for (int b = 0; b < p_; ++b) {
      auto& x = spectra[static_cast<std::size_t>(b)];
      for (long pos = 0; pos < N; ++pos) x[static_cast<std::size_t>(embed_[static_cast<std::size_t>(pos)])] = v(pos * p_ + b);
      fft_nd(x, dims_, false);
    }
    VectorX<Scalar> out(N * p_);
    std::vector<Scalar> acc(L);
    for (int a = 0; a < p_; ++a) {
      std::fill(acc.begin(), acc.end(), Scalar(0));
      for (int b = 0; b < p_; ++b) {
        const auto& k = kernels_[static_cast<std::size_t>(a * p_ + b)];
        const auto& x = spectra[static_cast<std::size_t>(b)];
        for (std::size_t s = 0; s < L; ++s) acc[s] += k[s] * x[s];
      }
      fft_nd(acc, dims_, true);
      for (long pos = 0; pos < N; ++pos) out(pos * p_ + a) = acc[static_cast<std::size_t>(embed_[static_cast<std::size_t>(pos)])];
    }
    return out;
  }

  const std::vector<int>& embedding_sizes() const { return dims_; }

 private:
  Box box_;
  int p_;
  std::vector<int> dims_;
  Box padded_;
  std::vector<std::vector<Scalar>> kernels_;
  std::vector<long> embed_;
};

template <typename Scalar>
VectorX<Scalar> apply_fast(const TruncatedOperator<Scalar>& op, const Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>& v) {
  return FastToeplitzApplier<Scalar>(op)(v);
}

template <typename Scalar>
VectorX<Scalar> apply_dense(const TruncatedOperator<Scalar>& op, const Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>& v) {
  if (v.size() != op.size()) throw std::invalid_argument("apply_dense: vector has wrong length");
  return op.matrix() * v;
}

namespace detail {
template <typename Scalar>
void check_compatible(const TruncatedOperator<Scalar>& a, const TruncatedOperator<Scalar>& b, const char* what) {
  if (!(a.box() == b.box()) || a.block_size() != b.block_size())
    throw std::invalid_argument(std::string(what) + ": operators live on different boxes or block sizes");
}
}  // namespace detail

template <typename Scalar>
TruncatedOperator<Scalar> add(const TruncatedOperator<Scalar>& a, const TruncatedOperator<Scalar>& b) {
  detail::check_compatible(a, b, "add");
  return TruncatedOperator<Scalar>(a.box(), a.block_size(), a.matrix() + b.matrix());
}

template <typename Scalar>
TruncatedOperator<Scalar> subtract(const TruncatedOperator<Scalar>& a, const TruncatedOperator<Scalar>& b) {
  detail::check_compatible(a, b, "subtract");
  return TruncatedOperator<Scalar>(a.box(), a.block_size(), a.matrix() - b.matrix());
}

template <typename Scalar>
TruncatedOperator<Scalar> scale(const TruncatedOperator<Scalar>& a, Scalar s) {
  return TruncatedOperator<Scalar>(a.box(), a.block_size(), s * a.matrix());
}

template <typename Scalar>
TruncatedOperator<Scalar> compose(const TruncatedOperator<Scalar>& a, const TruncatedOperator<Scalar>& b) {
  detail::check_compatible(a, b, "compose");
  return TruncatedOperator<Scalar>(a.box(), a.block_size(), a.matrix() * b.matrix());
}

/// Conjugate transpose; a Toeplitz operator stays Toeplitz with the adjoint symbol.
template <typename Scalar>
TruncatedOperator<Scalar> adjoint(const TruncatedOperator<Scalar>& a) {
  Structure<Scalar> s;
  if (a.structure().kind == StructureKind::toeplitz || a.structure().kind == StructureKind::shift) {
    s.kind = StructureKind::toeplitz;
    s.symbol = std::make_shared<const TorusSymbol<Scalar>>(a.structure().symbol->adjoint());
  } else if (a.structure().kind == StructureKind::projector) {
    s.kind = StructureKind::projector;
  }
  return TruncatedOperator<Scalar>(a.box(), a.block_size(), a.matrix().adjoint(), std::move(s));
}

/// Principal sub-block on the monomials of `sub` (caps no larger than the operator's box).
template <typename Scalar>
TruncatedOperator<Scalar> restrict_to(const TruncatedOperator<Scalar>& a, const Box& sub) {
  if (sub.dimension() != a.dimension()) throw std::invalid_argument("restrict_to: dimension mismatch");
  for (int i = 0; i < sub.dimension(); ++i)
    if (sub.cap(i) > a.box().cap(i)) throw std::invalid_argument("restrict_to: sub-box exceeds operator box");
  const auto idx = block_rows(embedded_positions(a.box(), sub, MultiIndex::zero(sub.dimension())), a.block_size());
  MatrixX<Scalar> m = a.matrix()(idx, idx);
  Structure<Scalar> s;
  if (a.structure().kind == StructureKind::toeplitz || a.structure().kind == StructureKind::shift) s = a.structure();
  if (s.kind == StructureKind::shift) s.kind = StructureKind::toeplitz;
  return TruncatedOperator<Scalar>(sub, a.block_size(), std::move(m), std::move(s));
}

enum class NormMethod { dense_svd, power_iteration };

template <typename Scalar>
typename Eigen::NumTraits<Scalar>::Real operator_norm(const TruncatedOperator<Scalar>& a, NormMethod method = NormMethod::dense_svd) {
  if (method == NormMethod::power_iteration) return power_iteration_norm(a.matrix()).value;
  return spectral_norm(a.matrix());
}

/// basis^* A basis, after checking that the basis columns are orthonormal to 1e-10.
template <typename Scalar>
MatrixX<Scalar> compress(const MatrixX<Scalar>& a, const MatrixX<Scalar>& basis) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (basis.rows() != a.cols() || a.rows() != a.cols()) throw std::invalid_argument("compress: basis rows must match operator size");
  const Real err = basis.cols() == 0 ? Real(0)
                                     : (basis.adjoint() * basis - MatrixX<Scalar>::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (err > Real(1e-10)) throw std::invalid_argument("compress: basis columns are not orthonormal");
  return basis.adjoint() * a * basis;
}

template <typename Scalar>
MatrixX<Scalar> compress(const TruncatedOperator<Scalar>& a, const MatrixX<Scalar>& basis) {
  return compress(a.matrix(), basis);
}

}  // namespace hardy
