#include "sbmsi/llr.hpp"

#include <algorithm>
#include <cmath>

namespace sbmsi {

namespace {

// F for x >= 0, b >= 0:
//   min(x, b) + 0.5 * (log1p(e^{-2(x+b)}) - log1p(e^{-2|x-b|}))
double transfer_nonneg(double x, double b) noexcept {
  if (std::isinf(x)) return b;
  const double v = std::min(x, b) + 0.5 * (std::log1p(std::exp(-2.0 * (x + b))) -
                                           std::log1p(std::exp(-2.0 * std::abs(x - b))));
  return std::clamp(v, 0.0, b);
}

}  // namespace

double llr_transfer(double x, double beta) noexcept {
  const bool negate = std::signbit(x) != std::signbit(beta);
  const double mag = transfer_nonneg(std::abs(x), std::abs(beta));
  return negate ? -mag : mag;
}

}  // namespace sbmsi
