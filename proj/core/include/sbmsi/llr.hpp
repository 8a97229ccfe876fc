#pragma once

namespace sbmsi {

/// Edge transfer map F(x) = atanh(tanh(beta) * tanh(x)): the half log-likelihood
/// ratio a parent receives from a child whose own ratio is x.
///
/// Evaluated as 0.5 * log((e^{2x+2beta} + 1) / (e^{2x} + e^{2beta})) in a
/// max-subtracted log1p form, with F(+-inf) = +-beta. The result is exactly odd
/// in both x and beta, and |F(x)| <= |beta| for every x.
double llr_transfer(double x, double beta) noexcept;

}  // namespace sbmsi
