#include "polyspmv/validate.hpp"

#include <algorithm>

namespace polyspmv {

bool ValidationReport::contains(std::string_view violation) const {
  return std::find(violations.begin(), violations.end(), violation) != violations.end();
}

namespace {

void check_shape(const MatrixShape& s, ValidationReport& r) {
  // nrows * ncols may overflow for huge shapes; compare by division instead.
  if (s.nnz > 0 && (s.nrows == 0 || s.ncols == 0 || s.nnz / s.nrows > s.ncols ||
                    (s.nnz / s.nrows == s.ncols && s.nnz % s.nrows != 0)))
    r.violations.emplace_back("nnz <= nrows*ncols");
}

}  // namespace

template <class T>
ValidationReport validate(const CooMatrix<T>& m) {
  ValidationReport r;
  const auto& s = m.shape;
  check_shape(s, r);
  if (m.row_indices.size() != s.nnz) r.violations.emplace_back("AI length == nnz");
  if (m.col_indices.size() != s.nnz) r.violations.emplace_back("AJ length == nnz");
  if (m.values.size() != s.nnz) r.violations.emplace_back("AV length == nnz");
  if (std::any_of(m.row_indices.begin(), m.row_indices.end(),
                  [&](Index i) { return i >= s.nrows; }))
    r.violations.emplace_back("AI in range");
  if (std::any_of(m.col_indices.begin(), m.col_indices.end(),
                  [&](Index j) { return j >= s.ncols; }))
    r.violations.emplace_back("AJ in range");
  if (m.sorted) {
    const std::size_t n = std::min(m.row_indices.size(), m.col_indices.size());
    for (std::size_t k = 1; k < n; ++k) {
      const bool increasing =
          m.row_indices[k - 1] < m.row_indices[k] ||
          (m.row_indices[k - 1] == m.row_indices[k] && m.col_indices[k - 1] < m.col_indices[k]);
      if (!increasing) {
        r.violations.emplace_back("sorted order");
        break;
      }
    }
  }
  return r;
}

template <class T>
ValidationReport validate(const CsrMatrix<T>& m) {
  ValidationReport r;
  const auto& s = m.shape;
  check_shape(s, r);
  const auto& irp = m.row_pointers;
  if (irp.size() != s.nrows + 1) {
    r.violations.emplace_back("IRP length == nrows+1");
  } else {
    if (irp.front() != 0) r.violations.emplace_back("IRP[0] == 0");
    if (irp.back() != s.nnz) r.violations.emplace_back("IRP[nrows] == nnz");
  }
  if (std::adjacent_find(irp.begin(), irp.end(), std::greater<>()) != irp.end())
    r.violations.emplace_back("IRP non-decreasing");
  if (m.col_indices.size() != s.nnz) r.violations.emplace_back("AJ length == nnz");
  if (m.values.size() != s.nnz) r.violations.emplace_back("AV length == nnz");
  if (std::any_of(m.col_indices.begin(), m.col_indices.end(),
                  [&](Index j) { return j >= s.ncols; }))
    r.violations.emplace_back("AJ in range");
  return r;
}

template <class T>
ValidationReport validate(const DiaMatrix<T>& m) {
  ValidationReport r;
  const auto& s = m.shape;
  check_shape(s, r);
  const auto& doff = m.offsets;
  if (std::adjacent_find(doff.begin(), doff.end(), std::greater_equal<>()) != doff.end())
    r.violations.emplace_back("DOFF strictly increasing");
  const auto lo = -static_cast<Offset>(s.nrows) + 1;
  const auto hi = static_cast<Offset>(s.ncols) - 1;
  if (std::any_of(doff.begin(), doff.end(), [&](Offset d) { return d < lo || d > hi; }))
    r.violations.emplace_back("DOFF in range");
  if (m.padded_rows < s.nrows) r.violations.emplace_back("padded_rows >= nrows");
  if (m.values.size() != m.padded_rows * doff.size()) {
    r.violations.emplace_back("AV length == padded_rows*ndiags");
    return r;
  }
  const auto ncols = static_cast<Offset>(s.ncols);
  for (std::size_t i = 0; i < m.padded_rows; ++i) {
    for (std::size_t d = 0; d < doff.size(); ++d) {
      const Offset k = static_cast<Offset>(i) + doff[d];
      const bool padding = i >= s.nrows || k < 0 || k >= ncols;
      if (padding && m.at(i, d) != T(0)) {
        r.violations.emplace_back("padding cells zero");
        return r;
      }
    }
  }
  return r;
}

template <class T>
ValidationReport validate(const DynamicMatrix<T>& m) {
  return std::visit([](const auto& active) { return validate(active); }, m.storage());
}

#define POLYSPMV_INSTANTIATE(T)                                \
  template ValidationReport validate(const CooMatrix<T>&);     \
  template ValidationReport validate(const CsrMatrix<T>&);     \
  template ValidationReport validate(const DiaMatrix<T>&);     \
  template ValidationReport validate(const DynamicMatrix<T>&);

POLYSPMV_INSTANTIATE(float)
POLYSPMV_INSTANTIATE(double)

}  // namespace polyspmv
