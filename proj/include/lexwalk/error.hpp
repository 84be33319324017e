#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexwalk {

enum class Errc {
  EmptyProfile,
  NonPositiveOccupancy,
  OccupancyBelowTwo,
  InvalidBoundary,
  InvalidArgument,
  InfeasibleConstraints,
  NoConvergence,
  RevivalUnsupported,
  SingularSystem,
  ZeroSurvival,
  DegenerateLevel,
  HeavyTail,
  ZeroMean,
  SamplingBudgetExhausted,
  NoDatedRows,
  NonPositiveInput,
  CalibrationMissing,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

// Every recoverable failure in the library is reported through this type;
// `code()` is what the CLI serializes into its error JSON.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

private:
  Errc code_;
};

}  // namespace lexwalk
