#include "polyspmv/convert.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "polyspmv/error.hpp"

namespace polyspmv {

template <class T>
CooMatrix<T> dense_to_coo(std::span<const T> dense, std::size_t nrows, std::size_t ncols) {
  if (dense.size() != nrows * ncols)
    throw DimensionMismatch("dense array length " + std::to_string(dense.size()) +
                            " does not match " + std::to_string(nrows) + "x" +
                            std::to_string(ncols));
  CooMatrix<T> coo;
  coo.shape = {nrows, ncols, 0};
  for (std::size_t i = 0; i < nrows; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) {
      const T v = dense[i * ncols + j];
      if (v == T(0)) continue;
      coo.row_indices.push_back(static_cast<Index>(i));
      coo.col_indices.push_back(static_cast<Index>(j));
      coo.values.push_back(v);
    }
  }
  coo.shape.nnz = coo.values.size();
  coo.sorted = true;
  return coo;
}

template <class T>
CooMatrix<T> sort_coo(CooMatrix<T> coo) {
  const std::size_t n = coo.values.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  // Stable, so duplicates are summed in their original order.
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (coo.row_indices[a] != coo.row_indices[b]) return coo.row_indices[a] < coo.row_indices[b];
    return coo.col_indices[a] < coo.col_indices[b];
  });

  CooMatrix<T> out;
  out.shape = coo.shape;
  out.row_indices.reserve(n);
  out.col_indices.reserve(n);
  out.values.reserve(n);
  for (std::size_t p : perm) {
    const Index r = coo.row_indices[p];
    const Index c = coo.col_indices[p];
    if (!out.values.empty() && out.row_indices.back() == r && out.col_indices.back() == c) {
      out.values.back() += coo.values[p];
      continue;
    }
    out.row_indices.push_back(r);
    out.col_indices.push_back(c);
    out.values.push_back(coo.values[p]);
  }
  out.shape.nnz = out.values.size();
  out.sorted = true;
  return out;
}

template <class T>
CsrMatrix<T> coo_to_csr(const CooMatrix<T>& coo) {
  if (!coo.sorted) throw UnsortedInput("coo_to_csr requires a sorted COO matrix");
  CsrMatrix<T> csr;
  csr.shape = coo.shape;
  csr.row_pointers.assign(coo.shape.nrows + 1, 0);
  for (Index r : coo.row_indices) ++csr.row_pointers[r + 1];
  std::partial_sum(csr.row_pointers.begin(), csr.row_pointers.end(), csr.row_pointers.begin());
  csr.col_indices = coo.col_indices;
  csr.values = coo.values;
  return csr;
}

template <class T>
CooMatrix<T> csr_to_coo(const CsrMatrix<T>& csr) {
  CooMatrix<T> coo;
  coo.shape = csr.shape;
  coo.row_indices.resize(csr.shape.nnz);
  bool sorted = true;
  for (std::size_t i = 0; i < csr.shape.nrows; ++i) {
    for (Index j = csr.row_pointers[i]; j < csr.row_pointers[i + 1]; ++j) {
      coo.row_indices[j] = static_cast<Index>(i);
      if (j > csr.row_pointers[i] && csr.col_indices[j - 1] >= csr.col_indices[j]) sorted = false;
    }
  }
  coo.col_indices = csr.col_indices;
  coo.values = csr.values;
  coo.sorted = sorted;
  return coo;
}

template <class T>
DiaMatrix<T> coo_to_dia(const CooMatrix<T>& coo, const DiaFillPolicy& policy) {
  if (!coo.sorted) throw UnsortedInput("coo_to_dia requires a sorted COO matrix");
  const auto& s = coo.shape;

  std::vector<Offset> offsets(s.nnz);
  for (std::size_t k = 0; k < s.nnz; ++k)
    offsets[k] = static_cast<Offset>(coo.col_indices[k]) - static_cast<Offset>(coo.row_indices[k]);
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());

  const std::size_t multiple = std::max<std::size_t>(policy.row_multiple, 1);
  const std::size_t padded_rows = (s.nrows + multiple - 1) / multiple * multiple;
  const std::size_t ndiags = offsets.size();
  const std::size_t max_ndiags =
      policy.max_ndiags != 0 ? policy.max_ndiags
                             : (s.nrows + s.ncols > 0 ? s.nrows + s.ncols - 1 : 0);
  const double cells = static_cast<double>(padded_rows) * static_cast<double>(ndiags);
  const double budget = policy.max_fill_ratio * static_cast<double>(std::max<std::size_t>(s.nnz, 1));
  if (cells > budget || ndiags > max_ndiags)
    throw FillRatioExceeded("DIA would store " + std::to_string(padded_rows * ndiags) +
                            " cells in " + std::to_string(ndiags) + " diagonals for " +
                            std::to_string(s.nnz) + " nonzeros");

  DiaMatrix<T> dia;
  dia.shape = s;
  dia.offsets = std::move(offsets);
  dia.padded_rows = padded_rows;
  dia.values.assign(padded_rows * ndiags, T(0));
  for (std::size_t k = 0; k < s.nnz; ++k) {
    const Offset off =
        static_cast<Offset>(coo.col_indices[k]) - static_cast<Offset>(coo.row_indices[k]);
    const auto d = static_cast<std::size_t>(
        std::lower_bound(dia.offsets.begin(), dia.offsets.end(), off) - dia.offsets.begin());
    dia.at(coo.row_indices[k], d) = coo.values[k];
  }
  return dia;
}

template <class T>
CooMatrix<T> dia_to_coo(const DiaMatrix<T>& dia) {
  CooMatrix<T> coo;
  coo.shape = {dia.shape.nrows, dia.shape.ncols, 0};
  const auto ncols = static_cast<Offset>(dia.shape.ncols);
  for (std::size_t i = 0; i < dia.shape.nrows; ++i) {
    for (std::size_t d = 0; d < dia.ndiags(); ++d) {
      const Offset k = static_cast<Offset>(i) + dia.offsets[d];
      if (k < 0 || k >= ncols) continue;
      const T v = dia.at(i, d);
      if (v == T(0)) continue;
      coo.row_indices.push_back(static_cast<Index>(i));
      coo.col_indices.push_back(static_cast<Index>(k));
      coo.values.push_back(v);
    }
  }
  coo.shape.nnz = coo.values.size();
  coo.sorted = true;
  return coo;
}

template <class T>
CooMatrix<T> to_coo(const DynamicMatrix<T>& m) {
  switch (m.format()) {
    case Format::Coo: return m.coo();
    case Format::Csr: return csr_to_coo(m.csr());
    case Format::Dia: return dia_to_coo(m.dia());
  }
  return {};
}

template <class T>
DynamicMatrix<T> convert(const DynamicMatrix<T>& m, Format target, const DiaFillPolicy& policy) {
  if (m.format() == target) return m;
  CooMatrix<T> coo = to_coo(m);
  if (!coo.sorted) coo = sort_coo(std::move(coo));
  switch (target) {
    case Format::Coo: return DynamicMatrix<T>(std::move(coo));
    case Format::Csr: return DynamicMatrix<T>(coo_to_csr(coo));
    case Format::Dia: return DynamicMatrix<T>(coo_to_dia(coo, policy));
  }
  return m;
}

#define POLYSPMV_INSTANTIATE(T)                                                            \
  template CooMatrix<T> dense_to_coo(std::span<const T>, std::size_t, std::size_t);        \
  template CooMatrix<T> sort_coo(CooMatrix<T>);                                            \
  template CsrMatrix<T> coo_to_csr(const CooMatrix<T>&);                                   \
  template CooMatrix<T> csr_to_coo(const CsrMatrix<T>&);                                   \
  template DiaMatrix<T> coo_to_dia(const CooMatrix<T>&, const DiaFillPolicy&);             \
  template CooMatrix<T> dia_to_coo(const DiaMatrix<T>&);                                   \
  template CooMatrix<T> to_coo(const DynamicMatrix<T>&);                                   \
  template DynamicMatrix<T> convert(const DynamicMatrix<T>&, Format, const DiaFillPolicy&);

POLYSPMV_INSTANTIATE(float)
POLYSPMV_INSTANTIATE(double)

}  // namespace polyspmv
