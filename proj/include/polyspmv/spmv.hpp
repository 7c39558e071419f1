#pragma once

// y = A * x for every storage format, in two versions:
//   Plain  - the textbook scalar loops.
//   Vla    - predicated vector formulations written against lanes.hpp.
// A KernelRegistry maps (format, version) to one implementation.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <type_traits>

#include "polyspmv/core.hpp"

namespace polyspmv {

enum class KernelVersion { Plain, Vla };

inline constexpr KernelVersion kAllVersions[] = {KernelVersion::Plain, KernelVersion::Vla};

std::string_view to_string(KernelVersion v);
std::optional<KernelVersion> parse_version(std::string_view s);

struct LaneConfig {
  std::size_t lanes = kDefaultLaneMultiple;

  /// Default config, with `lanes` taken from SPMV_LANES when set and valid.
  static LaneConfig from_env();
};

/// Control-flow counters of a Vla kernel run.
struct VlaTrace {
  std::size_t outer_steps = 0;
};

// Writing variants: y must have nrows elements and is overwritten.
template <class T>
void spmv_coo_plain(const CooMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y);
template <class T>
void spmv_csr_plain(const CsrMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y);
template <class T>
void spmv_dia_plain(const DiaMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y);

/// Requires A.sorted. Each outer step handles the run of entries sharing
/// AI[i] within one vector and adds their tree-reduced sum to y once.
template <class T>
void spmv_coo_vla(const CooMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y, const LaneConfig& cfg,
                  VlaTrace* trace = nullptr);
/// Per row: masked lane-sized chunks into a lane accumulator, one reduction.
template <class T>
void spmv_csr_vla(const CsrMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y, const LaneConfig& cfg,
                  VlaTrace* trace = nullptr);
/// Outer loop over blocks of `lanes` rows; diagonals are walked sequentially.
template <class T>
void spmv_dia_vla(const DiaMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y, const LaneConfig& cfg,
                  VlaTrace* trace = nullptr);

// Returning variants.
template <class T>
DenseVector<T> spmv_coo_plain(const CooMatrix<T>& A, ConstSpan<T> x) {
  DenseVector<T> y(A.shape.nrows);
  spmv_coo_plain(A, x, std::span<T>(y));
  return y;
}
template <class T>
DenseVector<T> spmv_csr_plain(const CsrMatrix<T>& A, ConstSpan<T> x) {
  DenseVector<T> y(A.shape.nrows);
  spmv_csr_plain(A, x, std::span<T>(y));
  return y;
}
template <class T>
DenseVector<T> spmv_dia_plain(const DiaMatrix<T>& A, ConstSpan<T> x) {
  DenseVector<T> y(A.shape.nrows);
  spmv_dia_plain(A, x, std::span<T>(y));
  return y;
}
template <class T>
DenseVector<T> spmv_coo_vla(const CooMatrix<T>& A, ConstSpan<T> x, const LaneConfig& cfg = {}) {
  DenseVector<T> y(A.shape.nrows);
  spmv_coo_vla(A, x, std::span<T>(y), cfg);
  return y;
}
template <class T>
DenseVector<T> spmv_csr_vla(const CsrMatrix<T>& A, ConstSpan<T> x, const LaneConfig& cfg = {}) {
  DenseVector<T> y(A.shape.nrows);
  spmv_csr_vla(A, x, std::span<T>(y), cfg);
  return y;
}
template <class T>
DenseVector<T> spmv_dia_vla(const DiaMatrix<T>& A, ConstSpan<T> x, const LaneConfig& cfg = {}) {
  DenseVector<T> y(A.shape.nrows);
  spmv_dia_vla(A, x, std::span<T>(y), cfg);
  return y;
}

/// One SpMV implementation per (format, version).
template <class T>
class KernelRegistry {
 public:
  using Kernel = std::function<void(const DynamicMatrix<T>&, std::span<const T>, std::span<T>,
                                    const LaneConfig&)>;

  /// Empty registry.
  KernelRegistry() = default;

  /// Registry holding the Plain and Vla kernels of all three formats.
  static KernelRegistry builtin();

  /// Adds or replaces the kernel for (format, version).
  void add(Format format, KernelVersion version, Kernel kernel);
  void remove(Format format, KernelVersion version);
  bool contains(Format format, KernelVersion version) const;

  /// Routes to the kernel registered for (A.format(), version).
  /// Throws UnsupportedCombination or DimensionMismatch.
  void run(const DynamicMatrix<T>& A, std::span<const T> x, std::span<T> y,
           KernelVersion version, const LaneConfig& cfg) const;

 private:
  std::array<std::array<Kernel, 2>, 3> table_{};
};

template <class T>
const KernelRegistry<T>& default_registry();

template <class T>
DenseVector<T> dispatch(const DynamicMatrix<T>& A, ConstSpan<T> x, KernelVersion version,
                        const LaneConfig& cfg = {},
                        const KernelRegistry<T>& registry = default_registry<T>()) {
  DenseVector<T> y(A.shape().nrows);
  registry.run(A, x, std::span<T>(y), version, cfg);
  return y;
}

}  // namespace polyspmv
