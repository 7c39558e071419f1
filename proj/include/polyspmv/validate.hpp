#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "polyspmv/core.hpp"

namespace polyspmv {

/// Violated invariants of a container; empty when the container is valid.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  bool contains(std::string_view violation) const;
};

template <class T>
ValidationReport validate(const CooMatrix<T>& m);
template <class T>
ValidationReport validate(const CsrMatrix<T>& m);
template <class T>
ValidationReport validate(const DiaMatrix<T>& m);
template <class T>
ValidationReport validate(const DynamicMatrix<T>& m);

}  // namespace polyspmv
