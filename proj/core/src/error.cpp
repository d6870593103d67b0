#include "lostsales/error.hpp"

namespace lostsales {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonStochastic: return "NonStochastic";
    case ErrorCode::Deterministic: return "Deterministic";
    case ErrorCode::NegativeAtom: return "NegativeAtom";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::RateTooHigh: return "RateTooHigh";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorCode::CapTooTight: return "CapTooTight";
    case ErrorCode::RStarDegenerate: return "RStarDegenerate";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace lostsales
