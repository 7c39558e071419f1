#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "polyspmv/convert.hpp"
#include "polyspmv/error.hpp"
#include "polyspmv/matrix_io.hpp"
#include "polyspmv/validate.hpp"
#include "support.hpp"

using namespace polyspmv;
using testing::Triple;

namespace {

CooMatrix<double> read(const std::string& text) {
  std::istringstream in(text);
  return io::read_matrix_market<double>(in);
}

std::vector<Triple> transpose(std::vector<Triple> t) {
  for (auto& [i, j, v] : t) std::swap(i, j);
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

TEST_CASE("general real diagonal") {
  const auto coo = read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 3.0\n2 2 4.0");
  CHECK(coo.shape == MatrixShape{2, 2, 2});
  CHECK(testing::triples(coo) == std::vector<Triple>{{0, 0, 3.0}, {1, 1, 4.0}});
  CHECK(coo.sorted);
}

TEST_CASE("symmetric entries are mirrored") {
  const auto coo = read("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 5\n");
  CHECK(testing::triples(coo) == std::vector<Triple>{{0, 1, 5.0}, {1, 0, 5.0}});
}

TEST_CASE("pattern entries read as one") {
  const auto coo = read("%%MatrixMarket matrix coordinate pattern general\n3 3 1\n3 1\n");
  CHECK(testing::triples(coo) == std::vector<Triple>{{2, 0, 1.0}});
}

TEST_CASE("header keywords are case-insensitive") {
  const auto coo = read("%%MatrixMarket MATRIX Coordinate REAL General\n1 1 1\n1 1 2\n");
  CHECK(coo.values == std::vector<double>{2.0});
}

TEST_CASE("fixture files") {
  SUBCASE("rectangular with comments") {
    const auto coo = io::read_matrix_market_file<double>(testing::fixture("general_rect.mtx"));
    CHECK(coo.shape == MatrixShape{4, 6, 7});
    CHECK(testing::triples(coo) == std::vector<Triple>{{0, 0, 1.5}, {0, 5, -2.0}, {1, 2, 3.25},
                                                       {2, 1, 4.0}, {2, 4, -0.5}, {3, 0, 7.0},
                                                       {3, 3, 2.0}});
  }
  SUBCASE("symmetric expands to both triangles") {
    const auto coo = io::read_matrix_market_file<double>(testing::fixture("symmetric.mtx"));
    CHECK(coo.shape.nnz == 12);
    CHECK(testing::triples(coo) == transpose(testing::triples(coo)));
    CHECK(std::count(coo.values.begin(), coo.values.end(), 2.5) == 2);
  }
  SUBCASE("pattern symmetric") {
    const auto coo = io::read_matrix_market_file<double>(testing::fixture("pattern_symmetric.mtx"));
    CHECK(coo.shape.nnz == 11);
    CHECK(std::all_of(coo.values.begin(), coo.values.end(), [](double v) { return v == 1.0; }));
  }
  SUBCASE("skew-symmetric negates the mirror") {
    const auto coo = io::read_matrix_market_file<double>(testing::fixture("skew.mtx"));
    CHECK(testing::triples(coo) == std::vector<Triple>{{0, 1, -1.0}, {0, 2, 2.0}, {1, 0, 1.0},
                                                       {2, 0, -2.0}, {2, 3, -0.75}, {3, 2, 0.75}});
  }
  SUBCASE("integer field") {
    const auto coo = io::read_matrix_market_file<double>(testing::fixture("integer.mtx"));
    CHECK(testing::triples(coo) == std::vector<Triple>{{0, 0, 2.0}, {0, 2, -7.0}, {1, 1, 5.0}, {2, 0, 11.0}});
  }
  SUBCASE("duplicates are summed") {
    const auto coo = io::read_matrix_market_file<double>(testing::fixture("duplicates.mtx"));
    CHECK(testing::triples(coo) == std::vector<Triple>{{0, 1, 5.0}, {1, 0, 4.0}, {2, 2, 1.0}});
  }
  SUBCASE("pattern general") {
    const auto coo = io::read_matrix_market_file<double>(testing::fixture("pattern.mtx"));
    CHECK(coo.shape.nnz == 5);
    CHECK(validate(coo).ok());
  }
}

TEST_CASE("unsupported fields") {
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"), UnsupportedField);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n"), UnsupportedField);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix array real general\n1 1\n1\n"), UnsupportedField);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(read(""), ParseError);
  CHECK_THROWS_AS(read("%%NotMatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n"), ParseError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2\n"), ParseError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 3.0\n"), ParseError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 3.0\n"), ParseError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 3.0\n"), ParseError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n"), ParseError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 2\n"), ParseError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real weird\n1 1 1\n1 1 1\n"), ParseError);
  CHECK_THROWS_AS(io::read_matrix_market_file<double>(testing::fixture("missing.mtx")), ParseError);
}

// Property: write then read returns the identical triple set.
TEST_CASE("Matrix Market round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int trial = 0; trial < 50; ++trial) {
    auto coo = io::gen_random_sparse<double>(1 + trial % 17, 0.3, trial);
    for (auto& v : coo.values) v = u(rng) / 3.0;
    std::stringstream buf;
    io::write_matrix_market(buf, coo);
    CHECK(testing::triples(io::read_matrix_market<double>(buf)) == testing::triples(coo));
  }
  for (const auto& f : testing::fixture_corpus()) {
    std::stringstream buf;
    io::write_matrix_market(buf, f.coo);
    const auto back = io::read_matrix_market<double>(buf);
    CHECK(back.shape == f.coo.shape);
    CHECK(testing::triples(back) == testing::triples(f.coo));
  }
}

TEST_CASE("27-point stencil examples") {
  const auto one = io::gen_stencil27<double>(1, 1, 1);
  CHECK(one.shape == MatrixShape{1, 1, 1});
  CHECK(one.values == std::vector<double>{26.0});

  const auto two = io::gen_stencil27<double>(2, 2, 2);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(two.row_pointers[i + 1] - two.row_pointers[i] == 8);
    double sum = 0;
    for (Index k = two.row_pointers[i]; k < two.row_pointers[i + 1]; ++k) sum += two.values[k];
    CHECK(sum == 19.0);
  }

  const auto four = io::gen_stencil27<double>(4, 4, 4);
  const std::size_t p = 1 + 4 * (1 + 4 * 1);
  CHECK(four.row_pointers[p + 1] - four.row_pointers[p] == 27);
  double sum = 0;
  for (Index k = four.row_pointers[p]; k < four.row_pointers[p + 1]; ++k) sum += four.values[k];
  CHECK(sum == 0.0);
}

TEST_CASE("stencil neighbourhoods match a brute-force oracle") {
  const std::size_t nx = 3, ny = 4, nz = 2;
  const auto a = csr_to_coo(io::gen_stencil27<double>(nx, ny, nz));
  std::vector<Triple> want;
  for (long z = 0; z < (long)nz; ++z)
    for (long y = 0; y < (long)ny; ++y)
      for (long x = 0; x < (long)nx; ++x)
        for (long z2 = 0; z2 < (long)nz; ++z2)
          for (long y2 = 0; y2 < (long)ny; ++y2)
            for (long x2 = 0; x2 < (long)nx; ++x2) {
              if (std::abs(x - x2) > 1 || std::abs(y - y2) > 1 || std::abs(z - z2) > 1) continue;
              const Index r = x + nx * (y + ny * z), c = x2 + nx * (y2 + ny * z2);
              want.emplace_back(r, c, r == c ? 26.0 : -1.0);
            }
  std::sort(want.begin(), want.end());
  CHECK(testing::triples(a) == want);
  CHECK(a.sorted);
}

TEST_CASE("stencils are symmetric with zero interior row sums") {
  for (std::size_t n : {2, 3, 5}) {
    const auto csr = io::gen_stencil27<double>(n, n + 1, n + 2);
    const auto t = testing::triples(csr_to_coo(csr));
    CHECK(t == transpose(t));
    CHECK(validate(csr).ok());
  }
  CHECK_THROWS_AS(io::gen_stencil27<double>(4096, 4096, 4096), Overflow);
  CHECK_THROWS_AS(io::gen_stencil27<double>(0, 1, 1), std::invalid_argument);
}

TEST_CASE("banded generator") {
  const std::vector<Offset> diag{0}, tri{-1, 0, 1}, upper{2};
  const auto d = io::gen_banded<double>(4, diag, 2.0);
  CHECK(testing::triples(d) == std::vector<Triple>{{0, 0, 2}, {1, 1, 2}, {2, 2, 2}, {3, 3, 2}});
  CHECK(io::gen_banded<double>(4, tri, 1.0).shape.nnz == 10);
  CHECK(testing::triples(io::gen_banded<double>(3, upper, 1.0)) == std::vector<Triple>{{0, 2, 1.0}});
  const std::vector<Offset> dup{1, 1}, far{4};
  CHECK_THROWS_AS(io::gen_banded<double>(4, dup, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(io::gen_banded<double>(4, far, 1.0), std::invalid_argument);
}

TEST_CASE("random generator") {
  CHECK(io::gen_random_sparse<double>(10, 1.0, 3).shape.nnz == 100);
  const auto a = io::gen_random_sparse<double>(100, 0.01, 42);
  const auto b = io::gen_random_sparse<double>(100, 0.01, 42);
  CHECK(testing::triples(a) == testing::triples(b));
  CHECK(a.shape.nnz == b.shape.nnz);
  CHECK(io::gen_random_sparse<double>(0, 0.5, 1).shape == MatrixShape{0, 0, 0});
  for (double v : io::gen_random_sparse<double>(30, 0.5, 8).values) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(io::gen_random_sparse<double>(5, 0.0, 1), std::invalid_argument);
}

TEST_CASE("generators produce sorted duplicate-free output") {
  const std::vector<Offset> offs{-3, 0, 5};
  for (const auto& coo : {io::gen_random_sparse<double>(40, 0.2, 4), io::gen_banded<double>(12, offs, 1.0),
                          io::gen_antidiagonal<double>(9)})
    CHECK(validate(coo).ok());
}

TEST_CASE("manifest parsing") {
  std::istringstream in(
      "# corpus\n"
      "\n"
      "a\tgen:stencil27:2,2,2\n"
      "b\tsub/m.mtx\n"
      "c\t/abs/m.mtx\n");
  const auto entries = io::read_manifest(in, "/base");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].source == "gen:stencil27:2,2,2");
  CHECK(entries[1].source == "/base/sub/m.mtx");
  CHECK(entries[2].source == "/abs/m.mtx");

  std::istringstream dup("a\tgen:antidiag:3\na\tgen:antidiag:4\n");
  CHECK_THROWS_AS(io::read_manifest(dup, "."), ParseError);
  std::istringstream bad("no-tab-here\n");
  CHECK_THROWS_AS(io::read_manifest(bad, "."), ParseError);
}

TEST_CASE("manifest entries load") {
  using io::CorpusEntry;
  CHECK(io::load_entry<double>(CorpusEntry{"s", "gen:stencil27:2,2,2"}).shape.nnz == 64);
  CHECK(io::load_entry<double>(CorpusEntry{"b", "gen:banded:4:-1,0,1"}).shape.nnz == 10);
  const auto banded = io::load_entry<double>(CorpusEntry{"b", "gen:banded:3:0:2.5"});
  CHECK(banded.values == std::vector<double>{2.5, 2.5, 2.5});
  CHECK(io::load_entry<double>(CorpusEntry{"r", "gen:random:10:1.0:7"}).shape.nnz == 100);
  CHECK(io::load_entry<double>(CorpusEntry{"a", "gen:antidiag:6"}).shape.nnz == 6);
  CHECK(io::load_entry<double>(CorpusEntry{"f", testing::fixture("symmetric.mtx").string()}).shape.nnz == 12);
  CHECK_THROWS_AS(io::load_entry<double>(CorpusEntry{"x", "gen:nope:1"}), ParseError);
  CHECK_THROWS_AS(io::load_entry<double>(CorpusEntry{"x", "gen:stencil27:2,2"}), ParseError);
}
