#include "lexwalk/error.hpp"

namespace lexwalk {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
  case Errc::EmptyProfile: return "EmptyProfile";
  case Errc::NonPositiveOccupancy: return "NonPositiveOccupancy";
  case Errc::OccupancyBelowTwo: return "OccupancyBelowTwo";
  case Errc::InvalidBoundary: return "InvalidBoundary";
  case Errc::InvalidArgument: return "InvalidArgument";
  case Errc::InfeasibleConstraints: return "InfeasibleConstraints";
  case Errc::NoConvergence: return "NoConvergence";
  case Errc::RevivalUnsupported: return "RevivalUnsupported";
  case Errc::SingularSystem: return "SingularSystem";
  case Errc::ZeroSurvival: return "ZeroSurvival";
  case Errc::DegenerateLevel: return "DegenerateLevel";
  case Errc::HeavyTail: return "HeavyTail";
  case Errc::ZeroMean: return "ZeroMean";
  case Errc::SamplingBudgetExhausted: return "SamplingBudgetExhausted";
  case Errc::NoDatedRows: return "NoDatedRows";
  case Errc::NonPositiveInput: return "NonPositiveInput";
  case Errc::CalibrationMissing: return "CalibrationMissing";
  case Errc::ParseError: return "ParseError";
  case Errc::ValidationError: return "ValidationError";
  case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace lexwalk
