#include "polyspmv/core.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace polyspmv {

std::string_view to_string(Format f) {
  switch (f) {
    case Format::Coo: return "COO";
    case Format::Csr: return "CSR";
    case Format::Dia: return "DIA";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "coo") return Format::Coo;
  if (lower == "csr") return Format::Csr;
  if (lower == "dia") return Format::Dia;
  return std::nullopt;
}

}  // namespace polyspmv
