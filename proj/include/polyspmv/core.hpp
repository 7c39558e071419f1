#pragma once

// Storage containers for the three sparse formats (COO, CSR, DIA), the dense
// vector type and a runtime-polymorphic wrapper that holds exactly one of them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace polyspmv {

using Index = std::uint32_t;
using Offset = std::int64_t;

/// Row multiple used for DIA padding and as the default lane count.
inline constexpr std::size_t kDefaultLaneMultiple = 8;

struct MatrixShape {
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  std::size_t nnz = 0;

  friend bool operator==(const MatrixShape&, const MatrixShape&) = default;
};

enum class Format { Coo, Csr, Dia };

inline constexpr Format kAllFormats[] = {Format::Coo, Format::Csr, Format::Dia};

std::string_view to_string(Format f);
std::optional<Format> parse_format(std::string_view s);

template <class T>
using DenseVector = std::vector<T>;

// Non-deducing spans so vectors bind directly when T comes from the matrix.
template <class T>
using ConstSpan = std::type_identity_t<std::span<const T>>;
template <class T>
using MutSpan = std::type_identity_t<std::span<T>>;

/// Coordinate format: one (AI, AJ, AV) triple per stored entry.
template <class T>
struct CooMatrix {
  using value_type = T;

  MatrixShape shape;
  std::vector<Index> row_indices;  // AI
  std::vector<Index> col_indices;  // AJ
  std::vector<T> values;           // AV
  // Set when entries are ordered by (row, col) without duplicates.
  bool sorted = false;
};

/// Compressed sparse row format.
template <class T>
struct CsrMatrix {
  using value_type = T;

  MatrixShape shape;
  std::vector<Index> row_pointers;  // IRP, nrows + 1 entries
  std::vector<Index> col_indices;   // AJ
  std::vector<T> values;            // AV
};

/// Diagonal format. `values` is row-major padded_rows x ndiags; column d holds
/// the diagonal with offset `offsets[d]` (col - row).
template <class T>
struct DiaMatrix {
  using value_type = T;

  MatrixShape shape;
  std::vector<Offset> offsets;  // DOFF
  std::vector<T> values;        // AV
  std::size_t padded_rows = 0;

  std::size_t ndiags() const { return offsets.size(); }
  T& at(std::size_t row, std::size_t diag) { return values[row * ndiags() + diag]; }
  const T& at(std::size_t row, std::size_t diag) const { return values[row * ndiags() + diag]; }
};

/// Holds one active storage format at a time.
template <class T>
class DynamicMatrix {
 public:
  using value_type = T;
  using Storage = std::variant<CooMatrix<T>, CsrMatrix<T>, DiaMatrix<T>>;

  DynamicMatrix() = default;
  DynamicMatrix(CooMatrix<T> m) : storage_(std::move(m)) {}
  DynamicMatrix(CsrMatrix<T> m) : storage_(std::move(m)) {}
  DynamicMatrix(DiaMatrix<T> m) : storage_(std::move(m)) {}

  Format format() const { return static_cast<Format>(storage_.index()); }

  const MatrixShape& shape() const {
    return std::visit([](const auto& m) -> const MatrixShape& { return m.shape; }, storage_);
  }

  template <class M>
  const M& get() const { return std::get<M>(storage_); }

  const CooMatrix<T>& coo() const { return std::get<CooMatrix<T>>(storage_); }
  const CsrMatrix<T>& csr() const { return std::get<CsrMatrix<T>>(storage_); }
  const DiaMatrix<T>& dia() const { return std::get<DiaMatrix<T>>(storage_); }

  const Storage& storage() const { return storage_; }

 private:
  Storage storage_{CooMatrix<T>{}};
};

}  // namespace polyspmv
