#pragma once

// Toeplitzness tests, symbol recovery, asymptotic sequences, compactness
// profiles and the Toeplitz + compact split.
//
// Every m-indexed quantity is read off by shifting entry indices into an
// interior sub-box (T[l + m e_i, k + m e_j]) rather than by multiplying
// truncated shift matrices, whose top layer breaks S^*S = I. The sections
// below are therefore the exact finite sections of T_{z_i}^{*m} T T_{z_j}^m.

#include "hardy/lattice.hpp"
#include "hardy/linalg.hpp"
#include "hardy/operators.hpp"
#include "hardy/symbols.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hardy {

/// Matrix of blocks T[l + row_offset, k + col_offset] for l in row_box, k in col_box.
template <typename Derived>
MatrixX<typename Derived::Scalar> shifted_section(const Eigen::MatrixBase<Derived>& t, const Box& box, int p,
                                                  const MultiIndex& row_offset, const Box& row_box,
                                                  const MultiIndex& col_offset, const Box& col_box) {
  const auto rows = block_rows(embedded_positions(box, row_box, row_offset), p);
  const auto cols = block_rows(embedded_positions(box, col_box, col_offset), p);
  return t(rows, cols);
}

template <typename Scalar>
MatrixX<Scalar> shifted_section(const TruncatedOperator<Scalar>& t, const MultiIndex& row_offset, const Box& row_box,
                                const MultiIndex& col_offset, const Box& col_box) {
  return shifted_section(t.matrix(), t.box(), t.block_size(), row_offset, row_box, col_offset, col_box);
}

/// Section of T_{z_i}^{*m} T T_{z_j}^m; empty when m exceeds either cap.
template <typename Scalar>
MatrixX<Scalar> cross_section(const TruncatedOperator<Scalar>& t, int i, int j, int m) {
  const Box& box = t.box();
  if (m > box.cap(i) || m > box.cap(j)) return MatrixX<Scalar>(0, 0);
  const int n = box.dimension();
  return shifted_section(t, m * MultiIndex::unit(n, i), interior(box, m, {i}), m * MultiIndex::unit(n, j),
                         interior(box, m, {j}));
}

// ---------------------------------------------------------------------------
// Toeplitz defect

struct DefectWitness {
  int direction = 0;
  MultiIndex row;  // l
  MultiIndex col;  // k; compared against (l + e_j, k + e_j)
};

template <typename Real>
struct DefectReport {
  std::vector<Real> per_direction;
  Real overall = 0;
  Real tolerance = 0;
  bool is_toeplitz = true;
  std::optional<DefectWitness> witness;
};

/// delta_j = max over l, k in interior(box, 1, {j}) of ||T[l + e_j, k + e_j] - T[l, k]||.
template <typename Scalar>
DefectReport<typename Eigen::NumTraits<Scalar>::Real> toeplitz_defect(const TruncatedOperator<Scalar>& t,
                                                                      double tol = kExactTolerance) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Box& box = t.box();
  const int n = box.dimension(), p = t.block_size();
  DefectReport<Real> rep;
  rep.tolerance = static_cast<Real>(tol);
  rep.per_direction.assign(static_cast<std::size_t>(n), Real(0));
  bool have_max = false;
  for (int j = 0; j < n; ++j) {
    if (box.cap(j) < 1) continue;
    const Box inner = interior(box, 1, {j});
    const MultiIndex e = MultiIndex::unit(n, j), zero = MultiIndex::zero(n);
    const MatrixX<Scalar> diff = shifted_section(t, e, inner, e, inner) - shifted_section(t, zero, inner, zero, inner);
    Real best = 0;
    Eigen::Index bl = 0, bk = 0;
    if (p == 1) {
      best = diff.cwiseAbs().maxCoeff(&bl, &bk);
    } else {
      for (Eigen::Index a = 0; a < inner.size(); ++a)
        for (Eigen::Index b = 0; b < inner.size(); ++b) {
          const Real v = spectral_norm(diff.block(a * p, b * p, p, p));
          if (v > best) best = v, bl = a, bk = b;
        }
    }
    rep.per_direction[static_cast<std::size_t>(j)] = best;
    if (!have_max || best > rep.overall) {
      rep.overall = best;
      rep.witness = DefectWitness{j, inner.index_at(bl), inner.index_at(bk)};
      have_max = true;
    }
  }
  if (rep.overall == Real(0)) rep.witness.reset();
  rep.is_toeplitz = rep.overall <= rep.tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Symbol recovery

template <typename Scalar>
struct RecoveredSymbol {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  TorusSymbol<Scalar> symbol;
  std::map<MultiIndex, Real> deviation;  // per frequency: max ||T[l,k] - first representative||
  Real max_deviation = 0;
};

/// Averages every diagonal l - k = f (|f_i| <= d_i). A diagonal whose entries all agree
/// returns its common value exactly; coefficients that average to zero are omitted.
template <typename Derived>
RecoveredSymbol<typename Derived::Scalar> recover_symbol(const Eigen::MatrixBase<Derived>& t, const Box& box, int p) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const int n = box.dimension();
  const long N = box.size();
  if (t.rows() != N * p || t.cols() != N * p) throw std::invalid_argument("recover_symbol: matrix does not match box");
  std::vector<int> fcaps;
  for (int i = 0; i < n; ++i) fcaps.push_back(2 * box.cap(i));
  const Box freq(fcaps);
  // fpos(l - k) = a(l) - a(k) + center, with a linear in the multi-index.
  std::vector<long> a(static_cast<std::size_t>(N));
  long center = 0;
  for (int i = 0; i < n; ++i) center += box.cap(i) * freq.stride(i);
  for (long pos = 0; pos < N; ++pos) {
    const MultiIndex k = box.index_at(pos);
    long v = 0;
    for (int i = 0; i < n; ++i) v += k[i] * freq.stride(i);
    a[static_cast<std::size_t>(pos)] = v;
  }
  const std::size_t F = static_cast<std::size_t>(freq.size());
  std::vector<MatrixX<Scalar>> sum(F, MatrixX<Scalar>::Zero(p, p)), first(F);
  std::vector<long> count(F, 0);
  std::vector<Real> spread(F, Real(0));
  for (long col = 0; col < N; ++col) {
    for (long row = 0; row < N; ++row) {
      const auto f = static_cast<std::size_t>(a[static_cast<std::size_t>(row)] - a[static_cast<std::size_t>(col)] + center);
      const auto blk = t.block(row * p, col * p, p, p);
      if (count[f] == 0) {
        first[f] = blk;
      } else {
        const Real d = p == 1 ? std::abs(blk(0, 0) - first[f](0, 0)) : spectral_norm((blk - first[f]).eval());
        spread[f] = std::max(spread[f], d);
      }
      sum[f] += blk;
      ++count[f];
    }
  }
  typename TorusSymbol<Scalar>::CoefficientMap coeffs;
  RecoveredSymbol<Scalar> out{TorusSymbol<Scalar>(n, p), {}, Real(0)};
  for (std::size_t f = 0; f < F; ++f) {
    if (count[f] == 0) continue;
    MultiIndex k = freq.index_at(static_cast<long>(f));
    for (int i = 0; i < n; ++i) k[i] -= box.cap(i);
    MatrixX<Scalar> mean = spread[f] == Real(0) ? first[f] : MatrixX<Scalar>(sum[f] / static_cast<Real>(count[f]));
    out.deviation.emplace(k, spread[f]);
    out.max_deviation = std::max(out.max_deviation, spread[f]);
    if (!mean.isZero(0)) coeffs.emplace(std::move(k), std::move(mean));
  }
  out.symbol = TorusSymbol<Scalar>(n, p, std::move(coeffs));
  return out;
}

template <typename Scalar>
RecoveredSymbol<Scalar> recover_symbol(const TruncatedOperator<Scalar>& t) {
  return recover_symbol(t.matrix(), t.box(), t.block_size());
}

// ---------------------------------------------------------------------------
// Asymptotic sequences

template <typename Scalar>
struct AsymptoticSequence {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  int direction = 0;
  std::vector<MatrixX<Scalar>> sections;  // B_0 .. B_{m_max}; empty when not requested
  std::vector<Real> step_norms;           // ||B_{m+1} - B_m|| on interior(box, m+1), m = 0 .. m_max-1
  Real tolerance = 0;
  bool cauchy = true;                     // final step <= tolerance
};

template <typename Scalar>
AsymptoticSequence<Scalar> asymptotic_sequence(const TruncatedOperator<Scalar>& t, int i, int m_max,
                                               double tol = kLimitTolerance, bool keep_sections = true) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Box& box = t.box();
  if (i < 0 || i >= box.dimension()) throw std::invalid_argument("asymptotic_sequence: direction out of range");
  if (m_max < 0 || m_max > box.cap(i)) throw std::invalid_argument("asymptotic_sequence: m_max too large for box");
  AsymptoticSequence<Scalar> seq;
  seq.direction = i;
  seq.tolerance = static_cast<Real>(tol);
  const MultiIndex e = MultiIndex::unit(box.dimension(), i);
  if (keep_sections)
    for (int m = 0; m <= m_max; ++m) {
      const Box inner = interior(box, m, {i});
      seq.sections.push_back(shifted_section(t, m * e, inner, m * e, inner));
    }
  for (int m = 0; m < m_max; ++m) {
    const Box inner = interior(box, m + 1, {i});
    const MatrixX<Scalar> step = shifted_section(t, (m + 1) * e, inner, (m + 1) * e, inner) - shifted_section(t, m * e, inner, m * e, inner);
    seq.step_norms.push_back(spectral_norm(step));
  }
  seq.cauchy = seq.step_norms.empty() || seq.step_norms.back() <= seq.tolerance;
  return seq;
}

/// ||section of T_{z_i}^{*m} (T - A) T_{z_j}^m|| for m = 0 .. m_max.
template <typename Scalar>
std::vector<typename Eigen::NumTraits<Scalar>::Real> cross_term_profile(const TruncatedOperator<Scalar>& t,
                                                                        const TruncatedOperator<Scalar>& a, int i, int j,
                                                                        int m_max) {
  detail::check_compatible(t, a, "cross_term_profile");
  const Box& box = t.box();
  if (i < 0 || j < 0 || i >= box.dimension() || j >= box.dimension())
    throw std::invalid_argument("cross_term_profile: direction out of range");
  if (m_max < 0 || m_max > std::min(box.cap(i), box.cap(j)))
    throw std::invalid_argument("cross_term_profile: m_max too large for box");
  const TruncatedOperator<Scalar> diff = subtract(t, a);
  std::vector<typename Eigen::NumTraits<Scalar>::Real> out;
  for (int m = 0; m <= m_max; ++m) out.push_back(spectral_norm(cross_section(diff, i, j, m)));
  return out;
}

// ---------------------------------------------------------------------------
// Compactness profile

template <typename Real>
struct CompactnessProfile {
  std::vector<Real> values;  // c_m for m = 0 .. m_max
  int m_max = 0;
  Real tolerance = 0;
  bool numerically_compact = false;  // qualified by the box and tolerance
};

namespace detail {
template <typename Real>
CompactnessProfile<Real> finish_profile(std::vector<Real> values, int m_max, double tol) {
  CompactnessProfile<Real> prof;
  prof.values = std::move(values);
  prof.m_max = m_max;
  prof.tolerance = static_cast<Real>(tol);
  bool monotone = true;
  for (std::size_t m = 1; m < prof.values.size(); ++m)
    monotone = monotone && prof.values[m] <= prof.values[m - 1] + Real(10) * prof.tolerance;
  prof.numerically_compact = monotone && prof.values.back() <= prof.tolerance;
  return prof;
}

/// Positions of the monomials outside the layer cube {k : k_i <= m - 1 for all i}.
inline std::vector<long> outside_layers(const Box& box, int m) {
  std::vector<long> out;
  for (long pos = 0; pos < box.size(); ++pos) {
    const MultiIndex k = box.index_at(pos);
    bool inside = true;
    for (int i = 0; i < k.size(); ++i) inside = inside && k[i] <= m - 1;
    if (!inside) out.push_back(pos);
  }
  return out;
}
}  // namespace detail

/// c_m = ||(I - F_m) T (I - F_m)||, computed as the norm of T restricted to the monomials
/// outside the layer cube.
template <typename Scalar>
CompactnessProfile<typename Eigen::NumTraits<Scalar>::Real> compactness_profile(const TruncatedOperator<Scalar>& t, int m_max,
                                                                                double tol = kLimitTolerance) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (m_max < 0 || m_max > t.box().min_cap() + 1) throw std::invalid_argument("compactness_profile: m_max out of range");
  std::vector<Real> values;
  for (int m = 0; m <= m_max; ++m) {
    const auto idx = block_rows(detail::outside_layers(t.box(), m), t.block_size());
    values.push_back(spectral_norm(t.matrix()(idx, idx)));
  }
  return detail::finish_profile<Real>(std::move(values), m_max, tol);
}

/// One-variable block form: c_m = ||R_m T R_m|| with R_m = S^m S^{*m}, read as the entry-shifted
/// section T[l + m, k + m].
template <typename Scalar>
CompactnessProfile<typename Eigen::NumTraits<Scalar>::Real> shifted_compactness_profile(const TruncatedOperator<Scalar>& t,
                                                                                        int m_max, double tol = kLimitTolerance) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (t.dimension() != 1) throw std::invalid_argument("shifted_compactness_profile: requires one variable");
  if (m_max < 0 || m_max > t.box().cap(0) + 1) throw std::invalid_argument("shifted_compactness_profile: m_max out of range");
  std::vector<Real> values;
  for (int m = 0; m <= m_max; ++m) values.push_back(spectral_norm(cross_section(t, 0, 0, m)));
  return detail::finish_profile<Real>(std::move(values), m_max, tol);
}

// ---------------------------------------------------------------------------
// Toeplitz + compact decomposition

template <typename Real>
struct StepSequence {
  int direction = 0;
  std::vector<Real> step_norms;
  bool cauchy = true;
};

template <typename Real>
struct CrossTerm {
  int i = 0;
  int j = 0;
  std::vector<Real> norms;
};

template <typename Scalar>
struct DecompositionResult {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  RecoveredSymbol<Scalar> recovered;
  TruncatedOperator<Scalar> toeplitz_part;
  TruncatedOperator<Scalar> remainder;
  DefectReport<Real> toeplitz_part_defect;
  CompactnessProfile<Real> remainder_profile;
  std::vector<StepSequence<Real>> sequences;
  std::vector<CrossTerm<Real>> cross_terms;
  int m_max = 0;
  int depth = 0;  // m*: the shift depth the symbol was read from
  Real tolerance = 0;
  bool verdict = false;
  std::optional<int> failing_direction;
  Real witness_step_norm = 0;  // largest step norm of the failing direction
};

enum class RemainderProbe { layer_projector, shifted_range };

namespace detail {
template <typename Scalar>
DecompositionResult<Scalar> decompose(const TruncatedOperator<Scalar>& t, double tol, std::optional<int> m_max_opt,
                                      RemainderProbe probe) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Box& box = t.box();
  const int n = box.dimension();
  const int m_max = m_max_opt.value_or(box.min_cap() / 2);
  if (m_max < 1 || m_max > box.min_cap())
    throw std::invalid_argument("decompose: box too small (need 1 <= m_max <= min cap)");

  std::vector<StepSequence<Real>> sequences;
  for (int i = 0; i < n; ++i) {
    auto seq = asymptotic_sequence(t, i, m_max, tol, false);
    sequences.push_back({i, seq.step_norms, seq.cauchy});
  }

  // Deepest m whose last step is stabilized in every direction.
  int depth = m_max;
  const bool all_cauchy = std::all_of(sequences.begin(), sequences.end(), [](const auto& s) { return s.cauchy; });
  if (!all_cauchy) {
    depth = m_max;
    for (int m = m_max; m >= 1; --m) {
      bool ok = true;
      for (const auto& s : sequences) ok = ok && s.step_norms[static_cast<std::size_t>(m - 1)] <= static_cast<Real>(tol);
      if (ok) {
        depth = m;
        break;
      }
    }
  }
  const Box inner = interior(box, depth);
  const MultiIndex offset = MultiIndex::diagonal(n, depth);
  RecoveredSymbol<Scalar> recovered = recover_symbol(shifted_section(t, offset, inner, offset, inner), inner, t.block_size());
  TruncatedOperator<Scalar> tp = toeplitz(recovered.symbol, box);
  TruncatedOperator<Scalar> rem = subtract(t, tp);
  auto defect = toeplitz_defect(tp, kExactTolerance);
  auto profile = probe == RemainderProbe::layer_projector ? compactness_profile(rem, m_max, tol)
                                                          : shifted_compactness_profile(rem, m_max, tol);
  std::vector<CrossTerm<Real>> cross;
  bool cross_ok = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CrossTerm<Real> c{i, j, cross_term_profile(t, tp, i, j, m_max)};
      cross_ok = cross_ok && c.norms.back() <= static_cast<Real>(tol);
      cross.push_back(std::move(c));
    }

  DecompositionResult<Scalar> res{std::move(recovered), std::move(tp), std::move(rem), std::move(defect), std::move(profile),
                                  std::move(sequences), std::move(cross), m_max, depth, static_cast<Real>(tol), false,
                                  std::nullopt, Real(0)};
  for (const auto& s : res.sequences) {
    if (s.cauchy) continue;
    const Real worst = *std::max_element(s.step_norms.begin(), s.step_norms.end());
    if (!res.failing_direction || worst > res.witness_step_norm) {
      res.failing_direction = s.direction;
      res.witness_step_norm = worst;
    }
  }
  res.verdict = all_cauchy && res.remainder_profile.numerically_compact && cross_ok;
  return res;
}
}  // namespace detail

/// Split T into toeplitz(recovered symbol) + remainder and certify the remainder at scale.
/// The symbol is read from the deepest stabilized section T[l + m* 1, k + m* 1].
template <typename Scalar>
DecompositionResult<Scalar> asymptotic_decompose(const TruncatedOperator<Scalar>& t, double tol = kLimitTolerance,
                                                 std::optional<int> m_max = std::nullopt) {
  return detail::decompose(t, tol, m_max, RemainderProbe::layer_projector);
}

/// One-variable block variant; the remainder is probed with R_m = S^m S^{*m}.
template <typename Scalar>
DecompositionResult<Scalar> feintuch_decompose(const TruncatedOperator<Scalar>& t, double tol = kLimitTolerance,
                                               std::optional<int> m_max = std::nullopt) {
  if (t.dimension() != 1) throw std::invalid_argument("feintuch_decompose: requires a one-variable operator");
  return detail::decompose(t, tol, m_max, RemainderProbe::shifted_range);
}

}  // namespace hardy
