#pragma once

// Functional emulation of a streaming COO SpMV pipeline built around a
// LATENCY-way split reduction, plus a cycle estimator for the same design.

#include <cstdint>
#include <span>
#include <vector>

#include "polyspmv/core.hpp"

namespace polyspmv::dataflow {

struct DataflowConfig {
  std::size_t latency = 8;        // floating-point add pipeline depth
  std::size_t pack_bits = 512;    // memory transaction width
  std::size_t element_bits = 32;  // width of one streamed index/value
  double clock_hz = 300e6;

  /// Throws std::invalid_argument when a field is out of range.
  void check() const;
};

/// COO inputs padded to a multiple of the latency. Pad entries carry row
/// `sentinel_row` (== nrows, never a real row), column 0 and value 0.
template <class T>
struct PaddedCoo {
  CooMatrix<T> base;
  std::size_t padded_nnz = 0;
  Index sentinel_row = 0;
  std::vector<Index> row_indices;
  std::vector<Index> col_indices;
  std::vector<T> values;

  bool is_pad(std::size_t i) const { return i >= base.shape.nnz; }
};

struct CycleEstimate {
  std::uint64_t load_cycles = 0;
  std::uint64_t reduce_cycles = 0;
  std::uint64_t total_cycles = 0;
  double est_seconds = 0.0;
};

/// Requires a sorted COO (UnsortedInput otherwise).
template <class T>
PaddedCoo<T> pad_inputs(const CooMatrix<T>& A, const DataflowConfig& cfg = {});

/// The multiply stage: av * x[aj] for real entries, 0 for pads.
template <class T>
std::vector<T> multiply_stage(const PaddedCoo<T>& A, ConstSpan<T> x);

/// The reduce stage as the hardware listing runs it: for every row, the
/// whole product stream is rescanned in chunks of `latency`, lane j of a
/// chunk feeding partial accumulator j when its row matches; the partials are
/// then summed into y[row]. When `partials` is given it receives the
/// nrows x latency partial accumulators prior to the final combine.
template <class T>
std::vector<T> reduce_stage(const PaddedCoo<T>& A, ConstSpan<T> products,
                            const DataflowConfig& cfg = {}, std::vector<T>* partials = nullptr);

/// pad -> multiply -> reduce.
template <class T>
std::vector<T> emulate_spmv(const CooMatrix<T>& A, ConstSpan<T> x,
                            const DataflowConfig& cfg = {});

CycleEstimate estimate_cycles(std::size_t nrows, std::size_t padded_nnz,
                              const DataflowConfig& cfg = {});

template <class T>
CycleEstimate estimate_cycles(const PaddedCoo<T>& A, const DataflowConfig& cfg = {}) {
  return estimate_cycles(A.base.shape.nrows, A.padded_nnz, cfg);
}

}  // namespace polyspmv::dataflow
