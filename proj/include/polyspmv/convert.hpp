#pragma once

// Construction from dense arrays and lossless conversion between formats.
// COO is the hub: every conversion between CSR and DIA passes through it.

#include <span>
#include <type_traits>

#include "polyspmv/core.hpp"

namespace polyspmv {

/// Guards DIA construction against patterns that would mostly store padding.
struct DiaFillPolicy {
  /// Allowed ratio of stored cells (padded_rows * ndiags) to max(nnz, 1).
  double max_fill_ratio = 10.0;
  /// Upper bound on the number of diagonals; 0 means nrows + ncols - 1.
  std::size_t max_ndiags = 0;
  /// padded_rows is nrows rounded up to this multiple.
  std::size_t row_multiple = kDefaultLaneMultiple;
};

/// Nonzeros of a row-major nrows x ncols array, as a sorted COO.
template <class T>
CooMatrix<T> dense_to_coo(std::span<const T> dense, std::size_t nrows, std::size_t ncols);

/// Sorts by (row, col) and sums duplicate coordinates.
template <class T>
CooMatrix<T> sort_coo(CooMatrix<T> coo);

template <class T>
CsrMatrix<T> coo_to_csr(const CooMatrix<T>& coo);

template <class T>
CooMatrix<T> csr_to_coo(const CsrMatrix<T>& csr);

template <class T>
DiaMatrix<T> coo_to_dia(const CooMatrix<T>& coo, const DiaFillPolicy& policy = {});

/// Zero-valued cells are dropped: DIA cannot tell padding from a stored zero.
template <class T>
CooMatrix<T> dia_to_coo(const DiaMatrix<T>& dia);

template <class T>
CooMatrix<T> to_coo(const DynamicMatrix<T>& m);

/// Returns `m` re-encoded in `target`. Unsorted COO input is sorted first.
template <class T>
DynamicMatrix<T> convert(const DynamicMatrix<T>& m, Format target, const DiaFillPolicy& policy = {});

}  // namespace polyspmv
