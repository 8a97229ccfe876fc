#include "sbmsi/error.hpp"

namespace sbmsi {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::RateExceedsN: return "RateExceedsN";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::VertexOutOfRange: return "VertexOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::MalformedGraph: return "MalformedGraph";
    case Errc::DepthTooLarge: return "DepthTooLarge";
    case Errc::NegativeV: return "NegativeV";
    case Errc::NonPositiveV: return "NonPositiveV";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

bool is_validation_error(Errc code) noexcept {
  switch (code) {
    case Errc::DepthTooLarge:
    case Errc::Io:
    case Errc::Internal:
      return false;
    default:
      return true;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace sbmsi
