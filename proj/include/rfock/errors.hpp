#pragma once

#include <stdexcept>
#include <string>

namespace rfock {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RFOCK_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

RFOCK_DEFINE_ERROR(DegenerateLoop);
RFOCK_DEFINE_ERROR(NegativeDistance);
RFOCK_DEFINE_ERROR(QuadratureNonConvergence);
RFOCK_DEFINE_ERROR(NotPositiveSemidefinite);
RFOCK_DEFINE_ERROR(HoopNotInFamilySpan);
RFOCK_DEFINE_ERROR(CholeskyFailure);
RFOCK_DEFINE_ERROR(SingularCovariance);
RFOCK_DEFINE_ERROR(FamilyNotDecorrelated);
RFOCK_DEFINE_ERROR(DimensionMismatch);
RFOCK_DEFINE_ERROR(InvalidArgument);

#undef RFOCK_DEFINE_ERROR

}  // namespace rfock
