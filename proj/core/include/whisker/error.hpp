#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace whisker {

enum class Errc {
  kInvalidArgument,
  kDegenerateInput,
  kUnresolvableContact,
  kEmptyGrid,
  kRankDeficient,
  kOutOfDomain,
  kGradientVanished,
  kLeftDomain,
  kNotConverged,
  kOutOfRange,
  kUninitialized,
  kPrecondition,
  kWindowNotFull,
  kConfig,
  kIo,
};

std::string_view to_string(Errc code);

/// Exception type for every recoverable failure in the library. The code lets
/// callers (the harness, the CLI) map failures to outcomes without string
/// matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace whisker
