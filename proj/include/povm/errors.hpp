#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace povm {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the command-line front end.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual std::string_view kind() const noexcept { return "Error"; }
};

#define POVM_DECLARE_ERROR(Name)                                                                   \
    class Name : public Error {                                                                    \
      public:                                                                                      \
        using Error::Error;                                                                        \
        [[nodiscard]] std::string_view kind() const noexcept override { return #Name; }            \
    }

POVM_DECLARE_ERROR(InvalidInput);
POVM_DECLARE_ERROR(NonHermitianInput);
POVM_DECLARE_ERROR(DimensionMismatch);
POVM_DECLARE_ERROR(InvalidDimension);
POVM_DECLARE_ERROR(SpaceMismatch);
POVM_DECLARE_ERROR(DegeneratePerturbation);
POVM_DECLARE_ERROR(NumericalRankAmbiguity);
POVM_DECLARE_ERROR(UnsupportedFamily);
POVM_DECLARE_ERROR(SparseBins);
POVM_DECLARE_ERROR(NotInformationallyComplete);
POVM_DECLARE_ERROR(EmptySample);

#undef POVM_DECLARE_ERROR

} // namespace povm
