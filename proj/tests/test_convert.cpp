#include <random>

#include "doctest.h"
#include "polyspmv/convert.hpp"
#include "polyspmv/error.hpp"
#include "polyspmv/matrix_io.hpp"
#include "polyspmv/validate.hpp"
#include "support.hpp"

using namespace polyspmv;

TEST_CASE("dense_to_coo of the canonical matrix") {
  const auto dense = testing::canonical_dense();
  const auto coo = dense_to_coo<double>(dense, 5, 5);
  const auto want = testing::canonical_coo();
  CHECK(coo.shape == want.shape);
  CHECK(coo.row_indices == want.row_indices);
  CHECK(coo.col_indices == want.col_indices);
  CHECK(coo.values == want.values);
  CHECK(coo.sorted);
}

TEST_CASE("dense_to_coo rejects a short array") {
  const std::vector<double> dense(24, 1.0);
  CHECK_THROWS_AS(dense_to_coo<double>(dense, 5, 5), DimensionMismatch);
}

TEST_CASE("sort_coo orders entries and sums duplicates") {
  CooMatrix<double> coo;
  coo.shape = {3, 3, 4};
  coo.row_indices = {2, 0, 2, 0};
  coo.col_indices = {1, 2, 1, 0};
  coo.values = {1.5, 2.0, 2.5, 4.0};
  const auto s = sort_coo(coo);
  CHECK(s.sorted);
  CHECK(s.shape.nnz == 3);
  CHECK(s.row_indices == std::vector<Index>{0, 0, 2});
  CHECK(s.col_indices == std::vector<Index>{0, 2, 1});
  CHECK(s.values == std::vector<double>{4.0, 2.0, 4.0});
}

TEST_CASE("coo_to_csr of the canonical matrix") {
  const auto csr = coo_to_csr(testing::canonical_coo());
  CHECK(csr.row_pointers == std::vector<Index>{0, 2, 4, 6, 9, 11});
  CHECK(csr.col_indices == std::vector<Index>{0, 2, 0, 1, 2, 3, 0, 3, 4, 1, 4});
  CHECK(csr.values == std::vector<double>{1, 2, 11, 3, 4, 5, 6, 7, 8, 9, 10});
}

TEST_CASE("coo_to_csr requires sorted input") {
  auto coo = testing::canonical_coo();
  coo.sorted = false;
  CHECK_THROWS_AS(coo_to_csr(coo), UnsortedInput);
  CHECK_THROWS_AS(coo_to_dia(coo), UnsortedInput);
}

TEST_CASE("csr_to_coo restores the canonical triples") {
  const auto back = csr_to_coo(coo_to_csr(testing::canonical_coo()));
  const auto want = testing::canonical_coo();
  CHECK(back.row_indices == want.row_indices);
  CHECK(back.col_indices == want.col_indices);
  CHECK(back.values == want.values);
  CHECK(back.sorted);
}

TEST_CASE("coo_to_dia of the canonical matrix") {
  const auto dia = coo_to_dia(testing::canonical_coo());
  CHECK(dia.offsets == std::vector<Offset>{-3, -1, 0, 1, 2});
  CHECK(dia.padded_rows == 8);
  CHECK(dia.values.size() == 40);
  const std::vector<double> row3{dia.at(3, 0), dia.at(3, 1), dia.at(3, 2), dia.at(3, 3), dia.at(3, 4)};
  CHECK(row3 == std::vector<double>{6, 0, 7, 8, 0});
  CHECK(validate(dia).ok());
}

TEST_CASE("tridiagonal 6x6 has three diagonals") {
  const std::vector<Offset> tri{-1, 0, 1};
  const auto dia = coo_to_dia(io::gen_banded<double>(6, tri, 1.0));
  CHECK(dia.offsets == std::vector<Offset>{-1, 0, 1});
  CHECK(dia.padded_rows == 8);
}

TEST_CASE("anti-diagonal is rejected by the fill policy") {
  const auto anti = io::gen_antidiagonal<double>(50);
  CHECK_THROWS_AS(coo_to_dia(anti), FillRatioExceeded);
  DiaFillPolicy tight;
  tight.max_ndiags = 2;
  const std::vector<Offset> tri{-1, 0, 1};
  CHECK_THROWS_AS(coo_to_dia(io::gen_banded<double>(6, tri, 1.0), tight), FillRatioExceeded);
}

TEST_CASE("dia_to_coo drops stored zeros") {
  auto dia = coo_to_dia(testing::canonical_coo());
  const auto back = dia_to_coo(dia);
  CHECK(testing::triples(back) == testing::triples(testing::canonical_coo()));
  // An explicit zero entry disappears in DIA.
  CooMatrix<double> z;
  z.shape = {2, 2, 2};
  z.row_indices = {0, 1};
  z.col_indices = {0, 1};
  z.values = {0.0, 3.0};
  z.sorted = true;
  const auto zz = dia_to_coo(coo_to_dia(z));
  CHECK(zz.shape.nnz == 1);
  CHECK(zz.values == std::vector<double>{3.0});
}

TEST_CASE("convert sorts unsorted COO before switching") {
  auto coo = testing::canonical_coo();
  std::swap(coo.row_indices[0], coo.row_indices[10]);
  std::swap(coo.col_indices[0], coo.col_indices[10]);
  std::swap(coo.values[0], coo.values[10]);
  coo.sorted = false;
  const auto csr = convert(DynamicMatrix<double>(coo), Format::Csr);
  CHECK(csr.csr().row_pointers == std::vector<Index>{0, 2, 4, 6, 9, 11});
}

// Property: random sparse patterns survive every conversion chain unchanged.
TEST_CASE("round trips on generated matrices") {
  std::mt19937_64 rng(20261015);
  DiaFillPolicy permissive;
  permissive.max_fill_ratio = 1e9;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nr = 1 + rng() % 40, nc = 1 + rng() % 40;
    std::vector<double> dense(nr * nc, 0.0);
    const double density = (rng() % 100) / 100.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : dense)
      if (u(rng) < density) v = u(rng) * 20.0 - 10.0 + 1e-3;
    const auto coo = dense_to_coo<double>(dense, nr, nc);
    CAPTURE(trial);
    CHECK(testing::triples(csr_to_coo(coo_to_csr(coo))) == testing::triples(coo));
    CHECK(testing::triples(dia_to_coo(coo_to_dia(coo, permissive))) == testing::triples(coo));
    const auto via = to_coo(convert(convert(DynamicMatrix<double>(coo), Format::Dia, permissive), Format::Csr));
    CHECK(testing::triples(via) == testing::triples(coo));
    const auto csr = coo_to_csr(coo);
    CHECK(validate(csr).ok());
    CHECK(csr.row_pointers == coo_to_csr(csr_to_coo(csr)).row_pointers);
  }
}

TEST_CASE("float instantiation converts") {
  const std::vector<float> dense{1.f, 0.f, 0.f, 2.f};
  const auto coo = dense_to_coo<float>(dense, 2, 2);
  CHECK(coo_to_dia(coo).offsets == std::vector<Offset>{0});
}
