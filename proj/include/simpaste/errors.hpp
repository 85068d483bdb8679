#pragma once

#include <stdexcept>
#include <string>

namespace simpaste {

/// Base class for every error raised by the library. `kind()` is the stable
/// name printed by the CLI ("EmptyBuffer", "ShapeMismatch", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SIMPASTE_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

SIMPASTE_DEFINE_ERROR(EmptyMask)
SIMPASTE_DEFINE_ERROR(DegenerateMask)
SIMPASTE_DEFINE_ERROR(ShapeMismatch)
SIMPASTE_DEFINE_ERROR(EmptyBuffer)
SIMPASTE_DEFINE_ERROR(IoError)
SIMPASTE_DEFINE_ERROR(OutOfFrame)
SIMPASTE_DEFINE_ERROR(SpecError)
SIMPASTE_DEFINE_ERROR(EncodingError)
SIMPASTE_DEFINE_ERROR(ConfigError)

#undef SIMPASTE_DEFINE_ERROR

}  // namespace simpaste
