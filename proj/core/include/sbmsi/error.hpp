#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbmsi {

enum class Errc {
  AlphaOutOfRange,
  NonPositiveRate,
  RateExceedsN,
  InvalidParameter,
  VertexOutOfRange,
  LengthMismatch,
  MalformedGraph,
  DepthTooLarge,
  NegativeV,
  NonPositiveV,
  TooLarge,
  InvalidConfig,
  Io,
  Internal,
};

std::string_view to_string(Errc code) noexcept;

/// Validation errors are caused by bad input; everything else is a runtime
/// failure. The CLI maps the two classes to exit codes 1 and 2.
bool is_validation_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  bool is_validation() const noexcept { return is_validation_error(code_); }

 private:
  Errc code_;
};

}  // namespace sbmsi
