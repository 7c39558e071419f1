#pragma once

// Matrix Market coordinate I/O, synthetic generators and corpus manifests.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "polyspmv/core.hpp"

namespace polyspmv::io {

/// Reads `%%MatrixMarket matrix coordinate <field> <symmetry>` with field in
/// {real, integer, pattern} and symmetry in {general, symmetric,
/// skew-symmetric}. Output is 0-based, sorted and coalesced.
/// Throws ParseError, or UnsupportedField for complex/hermitian/array.
template <class T>
CooMatrix<T> read_matrix_market(std::istream& in);

template <class T>
CooMatrix<T> read_matrix_market_file(const std::filesystem::path& path);

/// Writes `coordinate real general` with round-trip precision.
template <class T>
void write_matrix_market(std::ostream& out, const CooMatrix<T>& coo);

/// 27-point stencil on an nx x ny x nz grid: 26 on the diagonal, -1 for each
/// in-grid neighbour. Point (ix, iy, iz) is row ix + nx * (iy + ny * iz).
/// Throws Overflow when the row or nonzero count does not fit in Index.
template <class T>
CsrMatrix<T> gen_stencil27(std::size_t nx, std::size_t ny, std::size_t nz);

/// Square n x n matrix with entries on the given diagonals (col - row).
/// Throws std::invalid_argument on repeated or out-of-range offsets.
template <class T>
CooMatrix<T> gen_banded(std::size_t n, std::span<const Offset> offsets,
                        const std::function<T(Index row, Index col)>& value_fn);

template <class T>
CooMatrix<T> gen_banded(std::size_t n, std::span<const Offset> offsets, T value) {
  return gen_banded<T>(n, offsets, [value](Index, Index) { return value; });
}

/// n x n, each cell nonzero with probability `density`, values in (0, 1].
/// Deterministic for a given seed.
template <class T>
CooMatrix<T> gen_random_sparse(std::size_t n, double density, std::uint64_t seed);

/// Ones on the anti-diagonal: the worst case for DIA.
template <class T>
CooMatrix<T> gen_antidiagonal(std::size_t n);

struct CorpusEntry {
  std::string id;
  /// Either a Matrix Market path or a generator spec:
  ///   gen:stencil27:NX,NY,NZ
  ///   gen:banded:N:OFF[,OFF...][:VALUE]
  ///   gen:random:N:DENSITY:SEED
  ///   gen:antidiag:N
  std::string source;
};

/// One `id<TAB>source` per line; blank lines and lines starting with '#' are
/// skipped. Relative paths are resolved against `base_dir`.
/// Throws ParseError on malformed lines or duplicate ids.
std::vector<CorpusEntry> read_manifest(std::istream& in, const std::filesystem::path& base_dir);
std::vector<CorpusEntry> read_manifest_file(const std::filesystem::path& path);

/// Loads or generates the entry as a sorted COO matrix.
template <class T>
CooMatrix<T> load_entry(const CorpusEntry& entry);

}  // namespace polyspmv::io
