// common.hpp - shared aliases, error taxonomy, warning sink
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace atomcav {

inline constexpr const char* kVersion = "1.0.0";

using Complex = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One type per failure mode named in the operation contracts.
struct InvalidDimension : Error { using Error::Error; };
struct ContractViolation : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct DivideByZero : Error { using Error::Error; };
struct NoCriticalCoupling : Error { using Error::Error; };
struct NotAMinimum : Error { using Error::Error; };
struct ImpossibleEvent : Error { using Error::Error; };
struct UndefinedCorrelator : Error { using Error::Error; };
struct TruncationError : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };
struct OptimizationFailure : Error { using Error::Error; };

// Non-fatal diagnostics. Operations append here when the caller passes a sink;
// the CLI forwards collected warnings to stderr.
using WarningList = std::vector<std::string>;

inline void warn(WarningList* sink, std::string msg) {
  if (sink) sink->push_back(std::move(msg));
}

}  // namespace atomcav
