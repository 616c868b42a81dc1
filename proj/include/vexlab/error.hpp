#pragma once

#include <stdexcept>
#include <string>

namespace vexlab {

// Base class for every error the library throws. `kind()` is the stable
// machine-readable name used in CLI messages and tests.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

#define VEXLAB_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

VEXLAB_DEFINE_ERROR(BoundViolation);
VEXLAB_DEFINE_ERROR(BadParameter);
VEXLAB_DEFINE_ERROR(BadLambda);
VEXLAB_DEFINE_ERROR(BracketFailure);
VEXLAB_DEFINE_ERROR(BadScale);
VEXLAB_DEFINE_ERROR(NonFiniteSample);
VEXLAB_DEFINE_ERROR(DomainError);
VEXLAB_DEFINE_ERROR(BadConfig);
VEXLAB_DEFINE_ERROR(DenominatorViolation);
VEXLAB_DEFINE_ERROR(SpecError);
VEXLAB_DEFINE_ERROR(UsageError);

#undef VEXLAB_DEFINE_ERROR

}  // namespace vexlab
