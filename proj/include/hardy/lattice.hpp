#pragma once

// Multi-indices and truncation boxes for the monomial basis of H^2 over the
// polydisc. A Box with caps d = (d_1, ..., d_n) indexes the monomials z^k with
// 0 <= k_i <= d_i, enumerated row-major with the last coordinate fastest.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardy {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}
  MultiIndex(std::initializer_list<int> entries) : entries_(entries) {}

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }

  /// Unit index epsilon_j (0-based direction j).
  static MultiIndex unit(int n, int j) {
    MultiIndex e = zero(n);
    e[j] = 1;
    return e;
  }

  /// The diagonal index (m, ..., m).
  static MultiIndex diagonal(int n, int m) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), m)); }

  int size() const { return static_cast<int>(entries_.size()); }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const { return entries_; }

  bool nonnegative() const {
    return std::all_of(entries_.begin(), entries_.end(), [](int v) { return v >= 0; });
  }

  MultiIndex& operator+=(const MultiIndex& o) {
    check_same_size(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  MultiIndex& operator-=(const MultiIndex& o) {
    check_same_size(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  MultiIndex& operator*=(int s) {
    for (int& v : entries_) v *= s;
    return *this;
  }
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) { return a -= b; }
  friend MultiIndex operator*(int s, MultiIndex a) { return a *= s; }
  friend MultiIndex operator-(MultiIndex a) { return a *= -1; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

  friend std::ostream& operator<<(std::ostream& os, const MultiIndex& k) {
    os << '(';
    for (std::size_t i = 0; i < k.entries_.size(); ++i) os << (i ? "," : "") << k.entries_[i];
    return os << ')';
  }

 private:
  void check_same_size(const MultiIndex& o) const {
    if (o.entries_.size() != entries_.size())
      throw std::invalid_argument("MultiIndex: dimension mismatch");
  }

  std::vector<int> entries_;
};

class Box {
 public:
  Box() = default;
  explicit Box(std::vector<int> caps) : caps_(std::move(caps)) { validate(); }
  Box(std::initializer_list<int> caps) : caps_(caps) { validate(); }

  int dimension() const { return static_cast<int>(caps_.size()); }
  int cap(int i) const { return caps_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& caps() const { return caps_; }
  int min_cap() const { return *std::min_element(caps_.begin(), caps_.end()); }

  /// Number of monomials, prod (d_i + 1).
  long size() const {
    return std::accumulate(caps_.begin(), caps_.end(), 1L, [](long acc, int d) { return acc * (d + 1); });
  }

  bool contains(const MultiIndex& k) const {
    if (k.size() != dimension()) return false;
    for (int i = 0; i < dimension(); ++i)
      if (k[i] < 0 || k[i] > caps_[static_cast<std::size_t>(i)]) return false;
    return true;
  }

  /// Row-major stride of variable i.
  long stride(int i) const {
    long s = 1;
    for (int j = dimension() - 1; j > i; --j) s *= caps_[static_cast<std::size_t>(j)] + 1;
    return s;
  }

  long position(const MultiIndex& k) const {
    if (!contains(k)) {
      std::string msg = "Box::position: index outside box";
      throw std::out_of_range(msg);
    }
    long pos = 0;
    for (int i = 0; i < dimension(); ++i) pos = pos * (caps_[static_cast<std::size_t>(i)] + 1) + k[i];
    return pos;
  }

  MultiIndex index_at(long pos) const {
    if (pos < 0 || pos >= size()) throw std::out_of_range("Box::index_at: ordinal outside box");
    std::vector<int> k(caps_.size());
    for (int i = dimension() - 1; i >= 0; --i) {
      const int extent = caps_[static_cast<std::size_t>(i)] + 1;
      k[static_cast<std::size_t>(i)] = static_cast<int>(pos % extent);
      pos /= extent;
    }
    return MultiIndex(std::move(k));
  }

  friend bool operator==(const Box&, const Box&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Box& b) {
    os << "Box(";
    for (std::size_t i = 0; i < b.caps_.size(); ++i) os << (i ? "," : "") << b.caps_[i];
    return os << ')';
  }

 private:
  void validate() const {
    if (caps_.empty()) throw std::invalid_argument("Box: dimension must be at least 1");
    for (int d : caps_)
      if (d < 0) throw std::invalid_argument("Box: caps must be nonnegative");
  }

  std::vector<int> caps_;
};

inline std::vector<MultiIndex> enumerate_basis(const Box& box) {
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(box.size()));
  for (long j = 0; j < box.size(); ++j) out.push_back(box.index_at(j));
  return out;
}

inline long position(const Box& box, const MultiIndex& k) { return box.position(k); }

/// Directions are 0-based.
inline std::vector<int> all_directions(int n) {
  std::vector<int> dirs(static_cast<std::size_t>(n));
  std::iota(dirs.begin(), dirs.end(), 0);
  return dirs;
}

/// Caps reduced by m in each selected direction: the indices k for which k + m*e_i
/// stays inside the box for every selected i.
inline Box interior(const Box& box, int m, const std::vector<int>& directions) {
  if (m < 0) throw std::invalid_argument("interior: negative shift");
  std::vector<int> caps = box.caps();
  for (int i : directions) {
    if (i < 0 || i >= box.dimension()) throw std::invalid_argument("interior: direction out of range");
    if (m > caps[static_cast<std::size_t>(i)])
      throw std::invalid_argument("interior: shift " + std::to_string(m) + " leaves an empty interior in direction " +
                                  std::to_string(i));
  }
  std::vector<bool> seen(caps.size(), false);
  for (int i : directions) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    seen[static_cast<std::size_t>(i)] = true;
    caps[static_cast<std::size_t>(i)] -= m;
  }
  return Box(std::move(caps));
}

inline Box interior(const Box& box, int m) { return interior(box, m, all_directions(box.dimension())); }

/// Positions (in `box`) of the indices l + offset for every l in `sub`, in sub's order.
inline std::vector<long> embedded_positions(const Box& box, const Box& sub, const MultiIndex& offset) {
  std::vector<long> out;
  out.reserve(static_cast<std::size_t>(sub.size()));
  for (long j = 0; j < sub.size(); ++j) out.push_back(box.position(sub.index_at(j) + offset));
  return out;
}

/// Expands monomial positions into scalar row indices of a block-major layout with block size p.
inline std::vector<long> block_rows(const std::vector<long>& positions, int p) {
  std::vector<long> out;
  out.reserve(positions.size() * static_cast<std::size_t>(p));
  for (long pos : positions)
    for (int a = 0; a < p; ++a) out.push_back(pos * p + a);
  return out;
}

}  // namespace hardy
