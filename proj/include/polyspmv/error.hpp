#pragma once

#include <stdexcept>
#include <string>

namespace polyspmv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define POLYSPMV_DEFINE_ERROR(Name)        \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

POLYSPMV_DEFINE_ERROR(DimensionMismatch);
POLYSPMV_DEFINE_ERROR(UnsortedInput);
POLYSPMV_DEFINE_ERROR(FillRatioExceeded);
POLYSPMV_DEFINE_ERROR(UnsupportedCombination);
POLYSPMV_DEFINE_ERROR(ParseError);
POLYSPMV_DEFINE_ERROR(UnsupportedField);
POLYSPMV_DEFINE_ERROR(Overflow);
POLYSPMV_DEFINE_ERROR(AllCandidatesFailed);
POLYSPMV_DEFINE_ERROR(EmptyInput);
POLYSPMV_DEFINE_ERROR(Diverged);
POLYSPMV_DEFINE_ERROR(VerificationFailed);
POLYSPMV_DEFINE_ERROR(MissingBaseline);

#undef POLYSPMV_DEFINE_ERROR

}  // namespace polyspmv
