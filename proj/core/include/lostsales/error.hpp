#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lostsales {

enum class ErrorCode {
  NonStochastic,
  Deterministic,
  NegativeAtom,
  BadParameter,
  RateTooHigh,
  LatticeMismatch,
  NoConvergence,
  BudgetExceeded,
  StateBudgetExceeded,
  CapTooTight,
  RStarDegenerate,
  BadEpsilon,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports carries one of the named codes above so
// that callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lostsales
