#include "whisker/error.hpp"

namespace whisker {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kDegenerateInput: return "degenerate-input";
    case Errc::kUnresolvableContact: return "unresolvable";
    case Errc::kEmptyGrid: return "empty-grid";
    case Errc::kRankDeficient: return "rank-deficient";
    case Errc::kOutOfDomain: return "out-of-domain";
    case Errc::kGradientVanished: return "gradient-vanished";
    case Errc::kLeftDomain: return "left-domain";
    case Errc::kNotConverged: return "not-converged";
    case Errc::kOutOfRange: return "out-of-range";
    case Errc::kUninitialized: return "uninitialized";
    case Errc::kPrecondition: return "precondition";
    case Errc::kWindowNotFull: return "window-not-full";
    case Errc::kConfig: return "config";
    case Errc::kIo: return "io";
  }
  return "unknown";
}

}  // namespace whisker
