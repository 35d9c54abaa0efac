#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipslab {

enum class ErrorCode {
  CapExceeded,
  ZeroMass,
  NotErgodic,
  SiteClash,
  UnknownSite,
  SpectrumFailure,
  NegativeTime,
  BadExponent,
  NegativeInput,
  BadArgs,
  NotALeaf,
  OrderViolated,
  BadAlphabet,
  NotIncreasing,
  NotHeatBath,
  ThresholdHypothesisFailed,
  DegenerateEvent,
  FiniteRangeViolation,
  InvalidModel,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure the library reports carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ipslab
