#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace sbmsi {

/// Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error (unbiased sample variance / n). The values
/// are summed in index order, so the result is a pure function of the span.
inline Estimate mean_estimate(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return {};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace sbmsi
