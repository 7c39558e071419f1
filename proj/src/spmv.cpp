#include "polyspmv/spmv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <string>

#include "polyspmv/error.hpp"
#include "polyspmv/lanes.hpp"

namespace polyspmv {

std::string_view to_string(KernelVersion v) {
  return v == KernelVersion::Plain ? "Plain" : "Vla";
}

std::optional<KernelVersion> parse_version(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "plain") return KernelVersion::Plain;
  if (lower == "vla") return KernelVersion::Vla;
  return std::nullopt;
}

LaneConfig LaneConfig::from_env() {
  LaneConfig cfg;
  if (const char* env = std::getenv("SPMV_LANES")) {
    std::size_t lanes = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, lanes);
    if (ec == std::errc() && ptr == end && lanes >= 1 && lanes <= lanes::kMaxLanes)
      cfg.lanes = lanes;
  }
  return cfg;
}

namespace {

void check_dims(const MatrixShape& s, std::size_t xlen, std::size_t ylen) {
  if (xlen != s.ncols || ylen != s.nrows)
    throw DimensionMismatch("spmv: matrix is " + std::to_string(s.nrows) + "x" +
                            std::to_string(s.ncols) + ", x has " + std::to_string(xlen) +
                            ", y has " + std::to_string(ylen));
}

}  // namespace

template <class T>
void spmv_coo_plain(const CooMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y) {
  check_dims(A.shape, x.size(), y.size());
  std::fill(y.begin(), y.end(), T(0));
  const Index* ai = A.row_indices.data();
  const Index* aj = A.col_indices.data();
  const T* av = A.values.data();
  for (std::size_t i = 0; i < A.shape.nnz; ++i) y[ai[i]] += av[i] * x[aj[i]];
}

template <class T>
void spmv_csr_plain(const CsrMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y) {
  check_dims(A.shape, x.size(), y.size());
  const Index* irp = A.row_pointers.data();
  const Index* aj = A.col_indices.data();
  const T* av = A.values.data();
  for (std::size_t i = 0; i < A.shape.nrows; ++i) {
    T sum = 0;
    for (Index j = irp[i]; j < irp[i + 1]; ++j) sum += av[j] * x[aj[j]];
    y[i] = sum;
  }
}

template <class T>
void spmv_dia_plain(const DiaMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y) {
  check_dims(A.shape, x.size(), y.size());
  const std::size_t ndiags = A.ndiags();
  const auto ncols = static_cast<Offset>(A.shape.ncols);
  const Offset* doff = A.offsets.data();
  const T* av = A.values.data();
  for (std::size_t i = 0; i < A.shape.nrows; ++i) {
    T sum = 0;
    for (std::size_t j = 0; j < ndiags; ++j) {
      const Offset k = static_cast<Offset>(i) + doff[j];
      if (k >= 0 && k < ncols) sum += av[i * ndiags + j] * x[k];
    }
    y[i] = sum;
  }
}

template <class T>
void spmv_coo_vla(const CooMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y, const LaneConfig& cfg,
                  VlaTrace* trace) {
  check_dims(A.shape, x.size(), y.size());
  if (!A.sorted) throw UnsortedInput("spmv_coo_vla requires a sorted COO matrix");
  std::fill(y.begin(), y.end(), T(0));

  const std::size_t vl = cfg.lanes;
  const auto nnz = static_cast<Offset>(A.shape.nnz);
  const std::span<const Index> ai(A.row_indices);
  const std::span<const Index> aj(A.col_indices);
  const std::span<const T> av(A.values);
  std::size_t steps = 0;

  for (Offset i = 0; i < nnz;) {
    lanes::Predicate pg = lanes::while_lt(i, nnz, vl);
    const auto vai = lanes::load(pg, ai, static_cast<std::size_t>(i));
    // Only the run of entries in the same row as AI[i]; never empty.
    pg = lanes::cmpeq(pg, vai, ai[i]);

    const auto vaj = lanes::load(pg, aj, static_cast<std::size_t>(i));
    const auto vav = lanes::load(pg, av, static_cast<std::size_t>(i));
    const auto vx = lanes::gather(pg, x.data(), vaj);
    const auto vr = lanes::mul(pg, vav, vx);

    y[ai[i]] += lanes::reduce_add(pg, vr);
    i += static_cast<Offset>(pg.count_active());
    ++steps;
  }
  if (trace) trace->outer_steps = steps;
}

template <class T>
void spmv_csr_vla(const CsrMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y, const LaneConfig& cfg,
                  VlaTrace* trace) {
  check_dims(A.shape, x.size(), y.size());
  const std::size_t vl = cfg.lanes;
  const std::span<const Index> aj(A.col_indices);
  const std::span<const T> av(A.values);
  const lanes::Predicate all = lanes::while_lt(0, static_cast<Offset>(vl), vl);
  std::size_t steps = 0;

  for (std::size_t i = 0; i < A.shape.nrows; ++i) {
    const auto begin = static_cast<Offset>(A.row_pointers[i]);
    const auto end = static_cast<Offset>(A.row_pointers[i + 1]);
    auto acc = lanes::dup(T(0), vl);
    for (Offset j = begin; j < end; j += static_cast<Offset>(vl)) {
      const lanes::Predicate pg = lanes::while_lt(j, end, vl);
      const auto vaj = lanes::load(pg, aj, static_cast<std::size_t>(j));
      const auto vav = lanes::load(pg, av, static_cast<std::size_t>(j));
      const auto vx = lanes::gather(pg, x.data(), vaj);
      acc = lanes::mla(pg, acc, vav, vx);
      ++steps;
    }
    y[i] = lanes::reduce_add(all, acc);
  }
  if (trace) trace->outer_steps = steps;
}

template <class T>
void spmv_dia_vla(const DiaMatrix<T>& A, ConstSpan<T> x, MutSpan<T> y, const LaneConfig& cfg,
                  VlaTrace* trace) {
  check_dims(A.shape, x.size(), y.size());
  const std::size_t vl = cfg.lanes;
  const std::size_t ndiags = A.ndiags();
  const auto nrows = static_cast<Offset>(A.shape.nrows);
  const auto ncols = static_cast<Offset>(A.shape.ncols);
  const T* av = A.values.data();
  // Lane l of a block reads AV row i + l: stride ndiags.
  const auto vidx = lanes::index_series(0, static_cast<Offset>(ndiags), vl);
  std::size_t steps = 0;

  for (Offset i = 0; i < nrows; i += static_cast<Offset>(vl)) {
    auto vsum = lanes::dup(T(0), vl);
    const lanes::Predicate pg = lanes::while_lt(i, nrows, vl);

    for (std::size_t j = 0; j < ndiags; ++j) {
      const Offset k = i + A.offsets[j];
      const lanes::Predicate below = lanes::while_lt(k, 0, vl);
      const lanes::Predicate inside = lanes::while_lt(k, ncols, vl);
      const lanes::Predicate pm = (pg & inside).and_not(below);

      const auto vav = lanes::gather(pm, av + static_cast<std::size_t>(i) * ndiags + j, vidx);
      const auto vx = lanes::load(pm, x.data(), k);
      vsum = lanes::mla(pm, vsum, vav, vx);
    }
    lanes::store(pg, y, static_cast<std::size_t>(i), vsum);
    ++steps;
  }
  if (trace) trace->outer_steps = steps;
}

template <class T>
KernelRegistry<T> KernelRegistry<T>::builtin() {
  using M = DynamicMatrix<T>;
  using X = std::span<const T>;
  using Y = std::span<T>;
  KernelRegistry r;
  r.add(Format::Coo, KernelVersion::Plain,
        [](const M& A, X x, Y y, const LaneConfig&) { spmv_coo_plain(A.coo(), x, y); });
  r.add(Format::Csr, KernelVersion::Plain,
        [](const M& A, X x, Y y, const LaneConfig&) { spmv_csr_plain(A.csr(), x, y); });
  r.add(Format::Dia, KernelVersion::Plain,
        [](const M& A, X x, Y y, const LaneConfig&) { spmv_dia_plain(A.dia(), x, y); });
  r.add(Format::Coo, KernelVersion::Vla,
        [](const M& A, X x, Y y, const LaneConfig& c) { spmv_coo_vla(A.coo(), x, y, c); });
  r.add(Format::Csr, KernelVersion::Vla,
        [](const M& A, X x, Y y, const LaneConfig& c) { spmv_csr_vla(A.csr(), x, y, c); });
  r.add(Format::Dia, KernelVersion::Vla,
        [](const M& A, X x, Y y, const LaneConfig& c) { spmv_dia_vla(A.dia(), x, y, c); });
  return r;
}

template <class T>
void KernelRegistry<T>::add(Format format, KernelVersion version, Kernel kernel) {
  table_[static_cast<std::size_t>(format)][static_cast<std::size_t>(version)] = std::move(kernel);
}

template <class T>
void KernelRegistry<T>::remove(Format format, KernelVersion version) {
  table_[static_cast<std::size_t>(format)][static_cast<std::size_t>(version)] = nullptr;
}

template <class T>
bool KernelRegistry<T>::contains(Format format, KernelVersion version) const {
  return static_cast<bool>(
      table_[static_cast<std::size_t>(format)][static_cast<std::size_t>(version)]);
}

template <class T>
void KernelRegistry<T>::run(const DynamicMatrix<T>& A, std::span<const T> x, std::span<T> y,
                            KernelVersion version, const LaneConfig& cfg) const {
  const auto& kernel =
      table_[static_cast<std::size_t>(A.format())][static_cast<std::size_t>(version)];
  if (!kernel)
    throw UnsupportedCombination("no SpMV kernel registered for (" +
                                 std::string(to_string(A.format())) + ", " +
                                 std::string(to_string(version)) + ")");
  check_dims(A.shape(), x.size(), y.size());
  kernel(A, x, y, cfg);
}

template <class T>
const KernelRegistry<T>& default_registry() {
  static const KernelRegistry<T> registry = KernelRegistry<T>::builtin();
  return registry;
}

#define POLYSPMV_INSTANTIATE(T)                                                          \
  template void spmv_coo_plain(const CooMatrix<T>&, ConstSpan<T>, MutSpan<T>);           \
  template void spmv_csr_plain(const CsrMatrix<T>&, ConstSpan<T>, MutSpan<T>);           \
  template void spmv_dia_plain(const DiaMatrix<T>&, ConstSpan<T>, MutSpan<T>);           \
  template void spmv_coo_vla(const CooMatrix<T>&, ConstSpan<T>, MutSpan<T>,              \
                             const LaneConfig&, VlaTrace*);                              \
  template void spmv_csr_vla(const CsrMatrix<T>&, ConstSpan<T>, MutSpan<T>,              \
                             const LaneConfig&, VlaTrace*);                              \
  template void spmv_dia_vla(const DiaMatrix<T>&, ConstSpan<T>, MutSpan<T>,              \
                             const LaneConfig&, VlaTrace*);                              \
  template class KernelRegistry<T>;                                                      \
  template const KernelRegistry<T>& default_registry<T>();

POLYSPMV_INSTANTIATE(float)
POLYSPMV_INSTANTIATE(double)

}  // namespace polyspmv
