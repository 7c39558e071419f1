#include "polyspmv/dataflow.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "polyspmv/error.hpp"

namespace polyspmv::dataflow {

void DataflowConfig::check() const {
  if (latency == 0) throw std::invalid_argument("latency must be >= 1");
  if (element_bits == 0) throw std::invalid_argument("element_bits must be >= 1");
  if (pack_bits == 0 || pack_bits % element_bits != 0)
    throw std::invalid_argument("pack_bits must be a positive multiple of element_bits");
  if (!(clock_hz > 0)) throw std::invalid_argument("clock_hz must be positive");
}

template <class T>
PaddedCoo<T> pad_inputs(const CooMatrix<T>& A, const DataflowConfig& cfg) {
  cfg.check();
  if (!A.sorted) throw UnsortedInput("pad_inputs requires a sorted COO matrix");
  const std::size_t nnz = A.shape.nnz;
  PaddedCoo<T> out;
  out.base = A;
  out.padded_nnz = (nnz + cfg.latency - 1) / cfg.latency * cfg.latency;
  out.sentinel_row = static_cast<Index>(A.shape.nrows);
  out.row_indices = A.row_indices;
  out.col_indices = A.col_indices;
  out.values = A.values;
  out.row_indices.resize(out.padded_nnz, out.sentinel_row);
  out.col_indices.resize(out.padded_nnz, 0);
  out.values.resize(out.padded_nnz, T(0));
  return out;
}

template <class T>
std::vector<T> multiply_stage(const PaddedCoo<T>& A, ConstSpan<T> x) {
  if (x.size() != A.base.shape.ncols)
    throw DimensionMismatch("multiply_stage: x has " + std::to_string(x.size()) +
                            " entries, expected " + std::to_string(A.base.shape.ncols));
  std::vector<T> products(A.padded_nnz, T(0));
  for (std::size_t i = 0; i < A.base.shape.nnz; ++i)
    products[i] = A.values[i] * x[A.col_indices[i]];
  return products;
}

template <class T>
std::vector<T> reduce_stage(const PaddedCoo<T>& A, ConstSpan<T> products,
                            const DataflowConfig& cfg, std::vector<T>* partials) {
  cfg.check();
  if (products.size() != A.padded_nnz)
    throw DimensionMismatch("reduce_stage: expected " + std::to_string(A.padded_nnz) +
                            " products, got " + std::to_string(products.size()));
  const std::size_t latency = cfg.latency;
  const std::size_t nrows = A.base.shape.nrows;
  std::vector<T> y(nrows, T(0));
  if (partials) partials->assign(nrows * latency, T(0));

  std::vector<T> acc_part(latency);
  for (std::size_t row = 0; row < nrows; ++row) {
    std::fill(acc_part.begin(), acc_part.end(), T(0));
    for (std::size_t i = 0; i < A.padded_nnz; i += latency) {
      for (std::size_t j = 0; j < latency; ++j) {
        if (A.row_indices[i + j] == row) acc_part[j] += products[i + j];
      }
    }
    if (partials) std::copy(acc_part.begin(), acc_part.end(), partials->begin() + row * latency);
    T sum = 0;
    for (std::size_t j = 0; j < latency; ++j) sum += acc_part[j];
    y[row] = sum;
  }
  return y;
}

template <class T>
std::vector<T> emulate_spmv(const CooMatrix<T>& A, ConstSpan<T> x,
                            const DataflowConfig& cfg) {
  const PaddedCoo<T> padded = pad_inputs(A, cfg);
  const std::vector<T> products = multiply_stage(padded, x);
  return reduce_stage(padded, std::span<const T>(products), cfg);
}

CycleEstimate estimate_cycles(std::size_t nrows, std::size_t padded_nnz,
                              const DataflowConfig& cfg) {
  cfg.check();
  const std::uint64_t per_pack = cfg.pack_bits / cfg.element_bits;
  CycleEstimate e;
  // AI, AJ and AV are loaded by concurrent stages of equal length, so the
  // slowest single stream bounds the load phase.
  e.load_cycles = (padded_nnz + per_pack - 1) / per_pack;
  // Each row rescans the full stream: padded_nnz / latency chunks, each
  // chunk occupying the II = latency pipeline for latency cycles.
  e.reduce_cycles = static_cast<std::uint64_t>(nrows) * (padded_nnz / cfg.latency) * cfg.latency;
  e.total_cycles = std::max(e.load_cycles, e.reduce_cycles) + cfg.latency;
  e.est_seconds = static_cast<double>(e.total_cycles) / cfg.clock_hz;
  return e;
}

#define POLYSPMV_INSTANTIATE(T)                                                          \
  template PaddedCoo<T> pad_inputs(const CooMatrix<T>&, const DataflowConfig&);          \
  template std::vector<T> multiply_stage(const PaddedCoo<T>&, ConstSpan<T>);       \
  template std::vector<T> reduce_stage(const PaddedCoo<T>&, ConstSpan<T>,          \
                                       const DataflowConfig&, std::vector<T>*);          \
  template std::vector<T> emulate_spmv(const CooMatrix<T>&, ConstSpan<T>,          \
                                       const DataflowConfig&);

POLYSPMV_INSTANTIATE(float)
POLYSPMV_INSTANTIATE(double)

}  // namespace polyspmv::dataflow
