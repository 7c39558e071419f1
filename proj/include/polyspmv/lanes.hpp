#pragma once

// Portable model of a vector-length-agnostic SIMD unit. The lane count is a
// runtime value; every operation takes a predicate and leaves inactive lanes
// untouched (merging ops) or zeroed (loads, gathers, products).
//
// This is the scalar reference realization. It keeps the control flow of
// predicated vector code observable and testable on any host.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "polyspmv/core.hpp"

namespace polyspmv::lanes {

inline constexpr std::size_t kMaxLanes = 64;

class Predicate {
 public:
  explicit Predicate(std::size_t lanes) : lanes_(lanes) {
    if (lanes == 0 || lanes > kMaxLanes) throw std::invalid_argument("lane count out of range");
    std::fill_n(on_.begin(), lanes_, false);
  }

  std::size_t lanes() const { return lanes_; }
  bool operator[](std::size_t l) const { return on_[l]; }
  void set(std::size_t l, bool v) { on_[l] = v; }

  std::size_t count_active() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < lanes_; ++l) n += on_[l];
    return n;
  }

  /// `*this & ~other`.
  Predicate and_not(const Predicate& other) const {
    Predicate p(lanes_);
    for (std::size_t l = 0; l < lanes_; ++l) p.on_[l] = on_[l] && !other.on_[l];
    return p;
  }

  Predicate operator&(const Predicate& other) const {
    Predicate p(lanes_);
    for (std::size_t l = 0; l < lanes_; ++l) p.on_[l] = on_[l] && other.on_[l];
    return p;
  }

 private:
  std::size_t lanes_;
  std::array<bool, kMaxLanes> on_;  // only the first lanes_ entries are used
};

template <class T>
struct Vec {
  explicit Vec(std::size_t lanes) : lanes(lanes) { std::fill_n(v.begin(), lanes, T{}); }

  std::size_t lanes;
  std::array<T, kMaxLanes> v;  // only the first `lanes` entries are used

  T& operator[](std::size_t l) { return v[l]; }
  const T& operator[](std::size_t l) const { return v[l]; }
};

/// Lane l active iff base + l < limit (signed, so negative bases work).
inline Predicate while_lt(Offset base, Offset limit, std::size_t lanes) {
  Predicate p(lanes);
  for (std::size_t l = 0; l < lanes; ++l) p.set(l, base + static_cast<Offset>(l) < limit);
  return p;
}

template <class T>
Vec<T> dup(T value, std::size_t lanes) {
  Vec<T> out(lanes);
  std::fill_n(out.v.begin(), lanes, value);
  return out;
}

/// Lane l holds base + l * step.
inline Vec<Offset> index_series(Offset base, Offset step, std::size_t lanes) {
  Vec<Offset> out(lanes);
  for (std::size_t l = 0; l < lanes; ++l) out[l] = base + static_cast<Offset>(l) * step;
  return out;
}

/// Contiguous masked load of src[offset + l]; only active lanes are read.
template <class T>
Vec<T> load(const Predicate& pg, std::span<const T> src, std::size_t offset) {
  Vec<T> out(pg.lanes());
  for (std::size_t l = 0; l < pg.lanes(); ++l)
    if (pg[l]) out[l] = src[offset + l];
  return out;
}

/// Contiguous masked load of base[offset + l] with a signed offset; inactive
/// lanes are never dereferenced.
template <class T>
Vec<T> load(const Predicate& pg, const T* base, Offset offset) {
  Vec<T> out(pg.lanes());
  for (std::size_t l = 0; l < pg.lanes(); ++l)
    if (pg[l]) out[l] = base[offset + static_cast<Offset>(l)];
  return out;
}

/// Gather base[idx[l]] on active lanes.
template <class T, class I>
Vec<T> gather(const Predicate& pg, const T* base, const Vec<I>& idx) {
  Vec<T> out(pg.lanes());
  for (std::size_t l = 0; l < pg.lanes(); ++l)
    if (pg[l]) out[l] = base[idx[l]];
  return out;
}

/// Active lanes whose value equals `scalar`.
template <class I>
Predicate cmpeq(const Predicate& pg, const Vec<I>& v, I scalar) {
  Predicate out(pg.lanes());
  for (std::size_t l = 0; l < pg.lanes(); ++l) out.set(l, pg[l] && v[l] == scalar);
  return out;
}

/// a * b on active lanes, zero elsewhere.
template <class T>
Vec<T> mul(const Predicate& pg, const Vec<T>& a, const Vec<T>& b) {
  Vec<T> out(pg.lanes());
  for (std::size_t l = 0; l < pg.lanes(); ++l)
    if (pg[l]) out[l] = a[l] * b[l];
  return out;
}

/// acc + a * b on active lanes; inactive lanes keep acc. The product is
/// rounded before the add so one lane reproduces scalar `sum += a * b`.
template <class T>
Vec<T> mla(const Predicate& pg, const Vec<T>& acc, const Vec<T>& a, const Vec<T>& b) {
  Vec<T> out(pg.lanes());
  for (std::size_t l = 0; l < pg.lanes(); ++l) out[l] = pg[l] ? acc[l] + a[l] * b[l] : acc[l];
  return out;
}

/// Balanced pairwise sum over lanes in lane order; inactive lanes count as 0.
template <class T>
T reduce_add(const Predicate& pg, const Vec<T>& v) {
  const std::size_t n = pg.lanes();
  std::array<T, kMaxLanes> work{};
  for (std::size_t l = 0; l < n; ++l) work[l] = pg[l] ? v[l] : T(0);
  for (std::size_t stride = 1; stride < n; stride *= 2)
    for (std::size_t l = 0; l + stride < n; l += 2 * stride) work[l] += work[l + stride];
  return work[0];
}

template <class T>
void store(const Predicate& pg, std::span<T> dst, std::size_t offset, const Vec<T>& v) {
  for (std::size_t l = 0; l < pg.lanes(); ++l)
    if (pg[l]) dst[offset + l] = v[l];
}

}  // namespace polyspmv::lanes
