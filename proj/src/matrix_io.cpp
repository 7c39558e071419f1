#include "polyspmv/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "polyspmv/convert.hpp"
#include "polyspmv/error.hpp"

namespace polyspmv::io {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  for (std::string tok; ss >> tok;) out.push_back(std::move(tok));
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool blank_or_comment(const std::string& line) {
  const auto it = std::find_if_not(line.begin(), line.end(),
                                   [](unsigned char c) { return std::isspace(c); });
  return it == line.end() || *it == '%';
}

template <class I>
I parse_integer(const std::string& tok, const char* what) {
  I value{};
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(std::string("invalid ") + what + " '" + tok + "'");
  return value;
}

double parse_real(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw ParseError("invalid value '" + tok + "'");
  return v;
}

enum class Field { Real, Integer, Pattern };
enum class Symmetry { General, Symmetric, Skew };

}  // namespace

template <class T>
CooMatrix<T> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market stream");
  const auto header = split_ws(line);
  if (header.size() != 5 || lowercase(header[0]) != "%%matrixmarket")
    throw ParseError("missing %%MatrixMarket header");
  if (lowercase(header[1]) != "matrix")
    throw ParseError("unsupported object '" + header[1] + "'");
  const std::string layout = lowercase(header[2]);
  if (layout == "array") throw UnsupportedField("dense array layout is not supported");
  if (layout != "coordinate") throw ParseError("unknown layout '" + header[2] + "'");

  Field field;
  const std::string f = lowercase(header[3]);
  if (f == "real" || f == "double") field = Field::Real;
  else if (f == "integer") field = Field::Integer;
  else if (f == "pattern") field = Field::Pattern;
  else if (f == "complex") throw UnsupportedField("complex matrices are not supported");
  else throw ParseError("unknown field '" + header[3] + "'");

  Symmetry sym;
  const std::string s = lowercase(header[4]);
  if (s == "general") sym = Symmetry::General;
  else if (s == "symmetric") sym = Symmetry::Symmetric;
  else if (s == "skew-symmetric") sym = Symmetry::Skew;
  else if (s == "hermitian") throw UnsupportedField("hermitian matrices are not supported");
  else throw ParseError("unknown symmetry '" + header[4] + "'");

  // Size line.
  std::vector<std::string> size_tokens;
  while (std::getline(in, line)) {
    if (blank_or_comment(line)) continue;
    size_tokens = split_ws(line);
    break;
  }
  if (size_tokens.size() != 3) throw ParseError("missing or malformed size line");
  const auto nrows = parse_integer<std::uint64_t>(size_tokens[0], "row count");
  const auto ncols = parse_integer<std::uint64_t>(size_tokens[1], "column count");
  const auto entries = parse_integer<std::uint64_t>(size_tokens[2], "entry count");
  constexpr auto kMaxIndex = std::numeric_limits<Index>::max();
  if (nrows > kMaxIndex || ncols > kMaxIndex) throw Overflow("matrix dimensions exceed index range");

  CooMatrix<T> coo;
  coo.shape = {nrows, ncols, 0};
  coo.row_indices.reserve(entries);
  coo.col_indices.reserve(entries);
  coo.values.reserve(entries);
  auto push = [&](Index r, Index c, double v) {
    coo.row_indices.push_back(r);
    coo.col_indices.push_back(c);
    coo.values.push_back(static_cast<T>(v));
  };

  const std::size_t expected_tokens = field == Field::Pattern ? 2 : 3;
  std::uint64_t read = 0;
  while (read < entries && std::getline(in, line)) {
    if (blank_or_comment(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != expected_tokens)
      throw ParseError("entry " + std::to_string(read + 1) + ": expected " +
                       std::to_string(expected_tokens) + " fields");
    const auto i = parse_integer<std::uint64_t>(tok[0], "row index");
    const auto j = parse_integer<std::uint64_t>(tok[1], "column index");
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      throw ParseError("entry " + std::to_string(read + 1) + " out of bounds");
    double v = 1.0;
    if (field == Field::Real) v = parse_real(tok[2]);
    else if (field == Field::Integer) v = static_cast<double>(parse_integer<long long>(tok[2], "integer value"));

    const auto r = static_cast<Index>(i - 1);
    const auto c = static_cast<Index>(j - 1);
    push(r, c, v);
    if (r != c) {
      if (sym == Symmetry::Symmetric) push(c, r, v);
      else if (sym == Symmetry::Skew) push(c, r, -v);
    }
    ++read;
  }
  if (read < entries)
    throw ParseError("expected " + std::to_string(entries) + " entries, found " +
                     std::to_string(read));
  while (std::getline(in, line)) {
    if (!blank_or_comment(line)) throw ParseError("unexpected data after last entry");
  }

  coo.shape.nnz = coo.values.size();
  return sort_coo(std::move(coo));
}

template <class T>
CooMatrix<T> read_matrix_market_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_matrix_market<T>(in);
}

template <class T>
void write_matrix_market(std::ostream& out, const CooMatrix<T>& coo) {
  std::ostringstream buf;
  buf.precision(std::numeric_limits<T>::max_digits10);
  buf << "%%MatrixMarket matrix coordinate real general\n";
  buf << coo.shape.nrows << ' ' << coo.shape.ncols << ' ' << coo.shape.nnz << '\n';
  for (std::size_t k = 0; k < coo.shape.nnz; ++k)
    buf << coo.row_indices[k] + std::uint64_t{1} << ' ' << coo.col_indices[k] + std::uint64_t{1}
        << ' ' << coo.values[k] << '\n';
  out << buf.str();
}

template <class T>
CsrMatrix<T> gen_stencil27(std::size_t nx, std::size_t ny, std::size_t nz) {
  if (nx == 0 || ny == 0 || nz == 0) throw std::invalid_argument("grid dimensions must be >= 1");
  constexpr auto kMax = static_cast<double>(std::numeric_limits<Index>::max());
  // Per axis there are 3n - 2 ordered pairs (i, i') with |i - i'| <= 1.
  const double rows = static_cast<double>(nx) * static_cast<double>(ny) * static_cast<double>(nz);
  const double nnz = (3.0 * nx - 2) * (3.0 * ny - 2) * (3.0 * nz - 2);
  if (rows > kMax || nnz > kMax)
    throw Overflow("27-point stencil on " + std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                   std::to_string(nz) + " exceeds the 32-bit index range");

  const std::size_t n = nx * ny * nz;
  CsrMatrix<T> A;
  A.shape = {n, n, static_cast<std::size_t>(nnz)};
  A.row_pointers.reserve(n + 1);
  A.col_indices.reserve(A.shape.nnz);
  A.values.reserve(A.shape.nnz);
  A.row_pointers.push_back(0);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const std::size_t row = ix + nx * (iy + ny * iz);
        for (int dz = -1; dz <= 1; ++dz) {
          if ((iz == 0 && dz < 0) || (iz + 1 == nz && dz > 0)) continue;
          for (int dy = -1; dy <= 1; ++dy) {
            if ((iy == 0 && dy < 0) || (iy + 1 == ny && dy > 0)) continue;
            for (int dx = -1; dx <= 1; ++dx) {
              if ((ix == 0 && dx < 0) || (ix + 1 == nx && dx > 0)) continue;
              const std::size_t col = (ix + dx) + nx * ((iy + dy) + ny * (iz + dz));
              A.col_indices.push_back(static_cast<Index>(col));
              A.values.push_back(col == row ? T(26) : T(-1));
            }
          }
        }
        A.row_pointers.push_back(static_cast<Index>(A.col_indices.size()));
      }
    }
  }
  return A;
}

template <class T>
CooMatrix<T> gen_banded(std::size_t n, std::span<const Offset> offsets,
                        const std::function<T(Index, Index)>& value_fn) {
  std::vector<Offset> sorted(offsets.begin(), offsets.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("gen_banded: repeated diagonal offset");
  const auto sn = static_cast<Offset>(n);
  for (Offset d : sorted)
    if (d <= -sn || d >= sn) throw std::invalid_argument("gen_banded: offset out of range");

  CooMatrix<T> coo;
  coo.shape = {n, n, 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (Offset d : sorted) {
      const Offset j = static_cast<Offset>(i) + d;
      if (j < 0 || j >= sn) continue;
      coo.row_indices.push_back(static_cast<Index>(i));
      coo.col_indices.push_back(static_cast<Index>(j));
      coo.values.push_back(value_fn(static_cast<Index>(i), static_cast<Index>(j)));
    }
  }
  coo.shape.nnz = coo.values.size();
  coo.sorted = true;
  return coo;
}

template <class T>
CooMatrix<T> gen_random_sparse(std::size_t n, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("gen_random_sparse: density must be in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CooMatrix<T> coo;
  coo.shape = {n, n, 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (unit(rng) >= density) continue;
      coo.row_indices.push_back(static_cast<Index>(i));
      coo.col_indices.push_back(static_cast<Index>(j));
      coo.values.push_back(static_cast<T>(1.0 - unit(rng)));
    }
  }
  coo.shape.nnz = coo.values.size();
  coo.sorted = true;
  return coo;
}

template <class T>
CooMatrix<T> gen_antidiagonal(std::size_t n) {
  CooMatrix<T> coo;
  coo.shape = {n, n, n};
  for (std::size_t i = 0; i < n; ++i) {
    coo.row_indices.push_back(static_cast<Index>(i));
    coo.col_indices.push_back(static_cast<Index>(n - 1 - i));
    coo.values.push_back(T(1));
  }
  coo.sorted = true;
  return coo;
}

std::vector<CorpusEntry> read_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<CorpusEntry> entries;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw ParseError("manifest line " + std::to_string(lineno) + ": expected id<TAB>source");
    CorpusEntry e{line.substr(0, tab), line.substr(tab + 1)};
    if (!ids.insert(e.id).second)
      throw ParseError("manifest line " + std::to_string(lineno) + ": duplicate id '" + e.id + "'");
    if (e.source.rfind("gen:", 0) != 0) {
      std::filesystem::path p(e.source);
      if (p.is_relative()) e.source = (base_dir / p).string();
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<CorpusEntry> read_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest '" + path.string() + "'");
  return read_manifest(in, path.parent_path());
}

template <class T>
CooMatrix<T> load_entry(const CorpusEntry& entry) {
  if (entry.source.rfind("gen:", 0) != 0) return read_matrix_market_file<T>(entry.source);

  const auto parts = split(entry.source, ':');
  const std::string& kind = parts.size() > 1 ? parts[1] : std::string();
  auto bad = [&]() { return ParseError("malformed generator spec '" + entry.source + "'"); };
  try {
    if (kind == "stencil27" && parts.size() == 3) {
      const auto dims = split(parts[2], ',');
      if (dims.size() != 3) throw bad();
      const auto csr = gen_stencil27<T>(parse_integer<std::size_t>(dims[0], "nx"),
                                        parse_integer<std::size_t>(dims[1], "ny"),
                                        parse_integer<std::size_t>(dims[2], "nz"));
      return csr_to_coo(csr);
    }
    if (kind == "banded" && (parts.size() == 4 || parts.size() == 5)) {
      const auto n = parse_integer<std::size_t>(parts[2], "n");
      std::vector<Offset> offsets;
      for (const auto& o : split(parts[3], ',')) offsets.push_back(parse_integer<Offset>(o, "offset"));
      const T value = parts.size() == 5 ? static_cast<T>(parse_real(parts[4])) : T(1);
      return gen_banded<T>(n, offsets, value);
    }
    if (kind == "random" && parts.size() == 5) {
      return gen_random_sparse<T>(parse_integer<std::size_t>(parts[2], "n"), parse_real(parts[3]),
                                  parse_integer<std::uint64_t>(parts[4], "seed"));
    }
    if (kind == "antidiag" && parts.size() == 3) {
      return gen_antidiagonal<T>(parse_integer<std::size_t>(parts[2], "n"));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError("generator spec '" + entry.source + "': " + e.what());
  }
  throw bad();
}

#define POLYSPMV_INSTANTIATE(T)                                                              \
  template CooMatrix<T> read_matrix_market(std::istream&);                                   \
  template CooMatrix<T> read_matrix_market_file(const std::filesystem::path&);               \
  template void write_matrix_market(std::ostream&, const CooMatrix<T>&);                     \
  template CsrMatrix<T> gen_stencil27(std::size_t, std::size_t, std::size_t);                \
  template CooMatrix<T> gen_banded(std::size_t, std::span<const Offset>,                     \
                                   const std::function<T(Index, Index)>&);                   \
  template CooMatrix<T> gen_random_sparse(std::size_t, double, std::uint64_t);               \
  template CooMatrix<T> gen_antidiagonal(std::size_t);                                       \
  template CooMatrix<T> load_entry(const CorpusEntry&);

POLYSPMV_INSTANTIATE(float)
POLYSPMV_INSTANTIATE(double)

}  // namespace polyspmv::io
