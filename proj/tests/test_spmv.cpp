#include <cstdlib>
#include <random>

#include "doctest.h"
#include "polyspmv/convert.hpp"
#include "polyspmv/error.hpp"
#include "polyspmv/lanes.hpp"
#include "polyspmv/matrix_io.hpp"
#include "polyspmv/spmv.hpp"
#include "support.hpp"

using namespace polyspmv;

namespace {

DiaFillPolicy permissive() {
  DiaFillPolicy p;
  p.max_fill_ratio = 1e9;
  return p;
}

std::vector<double> run_all(const CooMatrix<double>& coo, const std::vector<double>& x, Format f,
                            KernelVersion v, std::size_t lanes = 8) {
  const auto m = convert(DynamicMatrix<double>(coo), f, permissive());
  return dispatch(m, x, v, LaneConfig{lanes});
}

}  // namespace

TEST_CASE("canonical matrix times ones") {
  const std::vector<double> ones(5, 1.0);
  for (Format f : kAllFormats)
    for (KernelVersion v : kAllVersions) {
      CAPTURE(to_string(f));
      CAPTURE(to_string(v));
      CHECK(run_all(testing::canonical_coo(), ones, f, v) == std::vector<double>{3, 14, 9, 21, 19});
    }
}

TEST_CASE("canonical matrix times 1..5") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  for (Format f : kAllFormats)
    for (KernelVersion v : kAllVersions)
      CHECK(run_all(testing::canonical_coo(), x, f, v) == std::vector<double>{7, 17, 32, 74, 68});
}

TEST_CASE("writing kernels overwrite y") {
  const auto coo = testing::canonical_coo();
  const std::vector<double> ones(5, 1.0);
  std::vector<double> y(5, 99.0);
  spmv_coo_plain(coo, ones, y);
  CHECK(y == std::vector<double>{3, 14, 9, 21, 19});
  std::fill(y.begin(), y.end(), -4.0);
  spmv_coo_vla(coo, ones, y, LaneConfig{4});
  CHECK(y == std::vector<double>{3, 14, 9, 21, 19});
}

TEST_CASE("COO Vla handles a long single row in lane-sized steps") {
  CooMatrix<double> coo;
  coo.shape = {1, 20, 20};
  for (Index j = 0; j < 20; ++j) {
    coo.row_indices.push_back(0);
    coo.col_indices.push_back(j);
    coo.values.push_back(1.0 + j);
  }
  coo.sorted = true;
  const std::vector<double> ones(20, 1.0);
  std::vector<double> y(1);
  VlaTrace trace;
  spmv_coo_vla(coo, ones, y, LaneConfig{4}, &trace);
  CHECK(trace.outer_steps == 5);
  CHECK(y[0] == 210.0);
}

TEST_CASE("COO Vla rejects unsorted input") {
  auto coo = testing::canonical_coo();
  coo.sorted = false;
  const std::vector<double> ones(5, 1.0);
  CHECK_THROWS_AS(spmv_coo_vla(coo, ones), UnsortedInput);
}

TEST_CASE("DIA Vla over 8x8 2*I is one outer step") {
  const std::vector<Offset> diag{0};
  const auto dia = coo_to_dia(io::gen_banded<double>(8, diag, 2.0));
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> y(8);
  VlaTrace trace;
  spmv_dia_vla(dia, x, y, LaneConfig{8}, &trace);
  CHECK(trace.outer_steps == 1);
  CHECK(y == std::vector<double>{2, 4, 6, 8, 10, 12, 14, 16});
}

TEST_CASE("DIA Vla handles a partial final block") {
  const auto dia = coo_to_dia(testing::canonical_coo());
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y(5);
  VlaTrace trace;
  spmv_dia_vla(dia, x, y, LaneConfig{2}, &trace);
  CHECK(trace.outer_steps == 3);
  CHECK(y == std::vector<double>{7, 17, 32, 74, 68});
}

TEST_CASE("dimension mismatch is rejected") {
  const std::vector<double> short_x(4, 1.0);
  for (Format f : kAllFormats)
    for (KernelVersion v : kAllVersions)
      CHECK_THROWS_AS(run_all(testing::canonical_coo(), short_x, f, v), DimensionMismatch);
}

TEST_CASE("unregistered combinations are reported") {
  auto reg = KernelRegistry<double>::builtin();
  reg.remove(Format::Dia, KernelVersion::Vla);
  CHECK_FALSE(reg.contains(Format::Dia, KernelVersion::Vla));
  const auto dia = convert(DynamicMatrix<double>(testing::canonical_coo()), Format::Dia);
  const std::vector<double> ones(5, 1.0);
  CHECK_THROWS_AS(dispatch(dia, ones, KernelVersion::Vla, {}, reg), UnsupportedCombination);
  CHECK_THROWS_AS(dispatch(dia, ones, KernelVersion::Plain, {}, KernelRegistry<double>()),
                  UnsupportedCombination);
  CHECK(dispatch(dia, ones, KernelVersion::Plain, {}, reg) == std::vector<double>{3, 14, 9, 21, 19});
}

TEST_CASE("registered kernels can be replaced") {
  auto reg = KernelRegistry<double>::builtin();
  int calls = 0;
  reg.add(Format::Csr, KernelVersion::Plain,
          [&](const DynamicMatrix<double>&, std::span<const double>, std::span<double> y,
              const LaneConfig&) {
            ++calls;
            std::fill(y.begin(), y.end(), 7.0);
          });
  const auto csr = convert(DynamicMatrix<double>(testing::canonical_coo()), Format::Csr);
  const std::vector<double> ones(5, 1.0);
  CHECK(dispatch(csr, ones, KernelVersion::Plain, {}, reg) == std::vector<double>(5, 7.0));
  CHECK(calls == 1);
}

TEST_CASE("all kernels agree with the dense oracle on the corpus") {
  for (const auto& f : testing::fixture_corpus()) {
    const auto x = testing::probe_vector(f.coo.shape.ncols, 3);
    const auto want = testing::dense_oracle(f.coo, x);
    for (Format fmt : kAllFormats)
      for (KernelVersion v : kAllVersions) {
        CAPTURE(f.id);
        CAPTURE(to_string(fmt));
        CAPTURE(to_string(v));
        CHECK(testing::max_rel_error(run_all(f.coo, x, fmt, v), want) <= 1e-10);
      }
  }
}

TEST_CASE("Vla with one lane is bit-identical to Plain") {
  for (const auto& f : testing::fixture_corpus()) {
    const auto x = testing::probe_vector(f.coo.shape.ncols, 1);
    for (Format fmt : kAllFormats) {
      CAPTURE(f.id);
      CAPTURE(to_string(fmt));
      CHECK(run_all(f.coo, x, fmt, KernelVersion::Vla, 1) ==
            run_all(f.coo, x, fmt, KernelVersion::Plain));
    }
  }
}

TEST_CASE("results do not depend on the lane count beyond rounding") {
  for (const auto& f : testing::fixture_corpus()) {
    const auto x = testing::probe_vector(f.coo.shape.ncols, 2);
    for (Format fmt : kAllFormats) {
      const auto base = run_all(f.coo, x, fmt, KernelVersion::Vla, 1);
      for (std::size_t lanes : {2, 3, 4, 8, 16, 64}) {
        CAPTURE(f.id);
        CAPTURE(lanes);
        CHECK(testing::max_rel_error(run_all(f.coo, x, fmt, KernelVersion::Vla, lanes), base) <= 1e-12);
      }
    }
  }
}

// Property: A(a*x + b*z) == a*Ax + b*Az, up to rounding.
TEST_CASE("kernels are linear in x") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto coo = io::gen_random_sparse<double>(40, 0.1, 100 + trial);
    std::vector<double> x(40), z(40), mix(40);
    const double a = u(rng), b = u(rng);
    for (std::size_t j = 0; j < 40; ++j) {
      x[j] = u(rng);
      z[j] = u(rng);
      mix[j] = a * x[j] + b * z[j];
    }
    for (Format fmt : kAllFormats)
      for (KernelVersion v : kAllVersions) {
        const auto ax = run_all(coo, x, fmt, v), az = run_all(coo, z, fmt, v);
        const auto amix = run_all(coo, mix, fmt, v);
        std::vector<double> want(40);
        for (std::size_t i = 0; i < 40; ++i) want[i] = a * ax[i] + b * az[i];
        CHECK(testing::max_rel_error(amix, want) <= 1e-12);
      }
  }
}

TEST_CASE("float kernels match double within float rounding") {
  const auto coo = io::gen_random_sparse<float>(50, 0.1, 9);
  const std::vector<float> ones(50, 1.0f);
  const auto y_plain = spmv_csr_plain(coo_to_csr(coo), ones);
  const auto y_vla = spmv_dia_vla(coo_to_dia(coo, permissive()), ones, LaneConfig{4});
  CHECK(testing::max_rel_error(y_vla, y_plain) <= 1e-5);
}

TEST_CASE("lane primitives") {
  using namespace polyspmv::lanes;
  const auto pg = while_lt(5, 8, 4);
  CHECK(pg.count_active() == 3);
  CHECK(while_lt(9, 8, 4).count_active() == 0);
  const std::vector<double> v{1, 2, 3, 4};
  const auto vec = load(while_lt(0, 4, 4), std::span<const double>(v), 0);
  CHECK(reduce_add(while_lt(0, 4, 4), vec) == 10.0);
  CHECK(reduce_add(while_lt(0, 2, 4), vec) == 3.0);
}

TEST_CASE("lane count from the environment") {
  ::setenv("SPMV_LANES", "16", 1);
  CHECK(LaneConfig::from_env().lanes == 16);
  ::setenv("SPMV_LANES", "abc", 1);
  CHECK(LaneConfig::from_env().lanes == 8);
  ::setenv("SPMV_LANES", "65", 1);
  CHECK(LaneConfig::from_env().lanes == 8);
  ::unsetenv("SPMV_LANES");
  CHECK(LaneConfig::from_env().lanes == 8);
}
