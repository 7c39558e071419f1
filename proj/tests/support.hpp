#pragma once

// Test-only helpers: the canonical 5x5 example, an independent dense
// reference for y = A * x, the fixture corpus, and scripted timers.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "polyspmv/autotune.hpp"
#include "polyspmv/convert.hpp"
#include "polyspmv/core.hpp"
#include "polyspmv/matrix_io.hpp"

namespace testing {

using polyspmv::CooMatrix;
using polyspmv::Index;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(POLYSPMV_FIXTURE_DIR) / name;
}

/// Row-major dense form of the canonical 5x5, 11-nonzero example matrix.
inline std::vector<double> canonical_dense() {
  return {
      1, 0, 2, 0, 0,   //
      11, 3, 0, 0, 0,  //
      0, 0, 4, 5, 0,   //
      6, 0, 0, 7, 8,   //
      0, 9, 0, 0, 10,  //
  };
}

/// Canonical example as an explicit sorted COO, written out by hand.
inline CooMatrix<double> canonical_coo() {
  CooMatrix<double> a;
  a.shape = {5, 5, 11};
  a.row_indices = {0, 0, 1, 1, 2, 2, 3, 3, 3, 4, 4};
  a.col_indices = {0, 2, 0, 1, 2, 3, 0, 3, 4, 1, 4};
  a.values = {1, 2, 11, 3, 4, 5, 6, 7, 8, 9, 10};
  a.sorted = true;
  return a;
}

using Triple = std::tuple<Index, Index, double>;

template <class T>
std::vector<Triple> triples(const CooMatrix<T>& m) {
  std::vector<Triple> out;
  for (std::size_t k = 0; k < m.shape.nnz; ++k)
    out.emplace_back(m.row_indices[k], m.col_indices[k], static_cast<double>(m.values[k]));
  std::sort(out.begin(), out.end());
  return out;
}

/// Dense triple-loop reference: materialise the matrix, then
/// y[i] = sum_j A[i][j] * x[j]. Shares no code with the library kernels.
template <class T>
std::vector<double> dense_oracle(const CooMatrix<T>& m, const std::vector<double>& x) {
  const std::size_t nr = m.shape.nrows, nc = m.shape.ncols;
  std::vector<long double> dense(nr * nc, 0.0L);
  for (std::size_t k = 0; k < m.values.size(); ++k)
    dense[m.row_indices[k] * nc + m.col_indices[k]] += m.values[k];
  std::vector<double> y(nr, 0.0);
  for (std::size_t i = 0; i < nr; ++i) {
    long double sum = 0.0L;
    for (std::size_t j = 0; j < nc; ++j) sum += dense[i * nc + j] * x[j];
    y[i] = static_cast<double>(sum);
  }
  return y;
}

/// max_i |a_i - b_i| / max(|b_i|, 1); infinity on length mismatch.
template <class A, class B>
double max_rel_error(const A& got, const B& want) {
  if (got.size() != want.size()) return INFINITY;
  double err = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double g = static_cast<double>(got[i]), w = static_cast<double>(want[i]);
    err = std::max(err, std::abs(g - w) / std::max(std::abs(w), 1.0));
  }
  return err;
}

inline std::vector<double> probe_vector(std::size_t n, unsigned salt = 0) {
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j)
    x[j] = std::sin(0.37 * static_cast<double>(j + 1) + salt) + 0.5 * static_cast<double>((j + salt) % 3);
  return x;
}

struct Fixture {
  std::string id;
  CooMatrix<double> coo;
};

/// The acceptance corpus: canonical example, stencils 2^3..8^3, banded,
/// random seeds 1..10, Matrix Market fixtures and a few edge shapes.
inline std::vector<Fixture> fixture_corpus() {
  namespace io = polyspmv::io;
  std::vector<Fixture> out;
  out.push_back({"canonical", canonical_coo()});
  for (std::size_t n = 2; n <= 8; ++n)
    out.push_back({"stencil" + std::to_string(n),
                   polyspmv::csr_to_coo(io::gen_stencil27<double>(n, n, n))});
  {
    const std::vector<polyspmv::Offset> tri{-1, 0, 1};
    out.push_back({"tridiag50", io::gen_banded<double>(50, tri, 1.0)});
    const std::vector<polyspmv::Offset> penta{-2, -1, 0, 1, 2};
    out.push_back({"penta100", io::gen_banded<double>(100, penta, [](Index i, Index j) {
                     return 1.5 + 0.01 * i - 0.005 * j;
                   })});
    const std::vector<polyspmv::Offset> wide{-10, 0, 7};
    out.push_back({"wide64", io::gen_banded<double>(64, wide, [](Index i, Index j) {
                     return i == j ? 4.0 : -0.5 - 0.001 * (i + j);
                   })});
    const std::vector<polyspmv::Offset> diag{0};
    out.push_back({"diag33", io::gen_banded<double>(33, diag, 2.0)});
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    out.push_back({"random" + std::to_string(seed), io::gen_random_sparse<double>(60, 0.05, seed)});
  for (const char* name : {"general_rect.mtx", "symmetric.mtx", "pattern.mtx",
                           "pattern_symmetric.mtx", "skew.mtx", "integer.mtx"})
    out.push_back({name, io::read_matrix_market_file<double>(fixture(name))});
  {
    const std::vector<polyspmv::Offset> diag{0};
    out.push_back({"identity3", io::gen_banded<double>(3, diag, 1.0)});
    CooMatrix<double> empty;
    empty.shape = {5, 5, 0};
    empty.sorted = true;
    out.push_back({"empty5", empty});
    out.push_back({"antidiag50", io::gen_antidiagonal<double>(50)});
  }
  return out;
}

/// Returns durations from a function of the timing context; runs the work.
class ScriptedTimer final : public polyspmv::autotune::Timer {
 public:
  using Script = std::function<double(const polyspmv::autotune::TimingContext&)>;
  explicit ScriptedTimer(Script script) : script_(std::move(script)) {}

  double time(const polyspmv::autotune::TimingContext& ctx,
              const std::function<void()>& work) override {
    work();
    ++calls;
    return script_(ctx);
  }

  std::size_t calls = 0;

 private:
  Script script_;
};

/// Fixed duration per format, independent of version and repetition.
inline ScriptedTimer per_format_timer(double coo, double csr, double dia) {
  return ScriptedTimer([=](const polyspmv::autotune::TimingContext& c) {
    switch (c.format) {
      case polyspmv::Format::Coo: return coo;
      case polyspmv::Format::Csr: return csr;
      case polyspmv::Format::Dia: return dia;
    }
    return 1.0;
  });
}

}  // namespace testing
