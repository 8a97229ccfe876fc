#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sbmsi {

/// Large-degree density evolution: v <- (mu^2/4) h(v) with
/// h(v) = E tanh(v + sqrt(v) Z + U), Z standard normal and U = +gamma with
/// probability 1-alpha, -gamma with probability alpha.
struct DeConfig {
  double mu = 0.0;
  double alpha = 0.25;       ///< in (0, 1/2]
  unsigned quad_points = 61; ///< odd, >= 21; sets the resolution of the Z quadrature
  double tol = 1e-12;        ///< absolute step size that ends the iteration
  std::size_t max_iter = 1'000'000;
};

/// Throws InvalidConfig or AlphaOutOfRange.
void validate_de_config(const DeConfig& cfg);

/// Standard normal upper tail, 0.5 * erfc(x / sqrt 2). Accepts +-inf.
double q_function(double x) noexcept;

/// Gaussian expectation rule for E_Z f(m + s Z). The Z range [-9, 9] is cut
/// into equal panels carrying 10-point Gauss-Legendre rules; the panel count
/// grows with s so each panel spans at most a few units of the integrand.
class GaussianRule {
 public:
  GaussianRule(unsigned quad_points, double s);
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  template <class Fn>
  double expect(Fn&& f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) acc += weights_[k] * f(nodes_[k]);
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// h(v). Throws NegativeV.
double h_eval(double v, double alpha, unsigned quad_points = 61);

/// h'(v) = E[(1 - tanh W)(1 - tanh^2 W)], W = v + sqrt(v) Z + U. Throws NonPositiveV.
double h_prime(double v, double alpha, unsigned quad_points = 61);

struct TanhMoments {
  double mean_tanh = 0.0;    ///< E tanh W
  double mean_tanh_sq = 0.0; ///< E tanh^2 W
};

/// Both moments of tanh(v + sqrt(v) Z + U). Throws NegativeV.
TanhMoments tanh_moments(double v, double alpha, unsigned quad_points = 61);

enum class Direction { FromBelow, FromAbove };

struct FixedPoint {
  double value = 0.0;
  std::vector<double> trajectory;  ///< v_0 = 0, v_1, ... or w_1 = mu^2/4, w_2, ...
  bool converged = false;
};

/// Plain iteration of the DE map. A step against the expected direction by
/// more than tol throws Internal; hitting max_iter returns converged = false.
FixedPoint fixed_point(const DeConfig& cfg, Direction direction);

/// Predicted accuracy 1 - (1-alpha) Q((v+gamma)/sqrt v) - alpha Q((v-gamma)/sqrt v),
/// with the v = 0 limit 1 - alpha (1/2 when alpha = 1/2).
double de_accuracy(double v, double alpha);

struct DeResult {
  double v_low = 0.0;
  double v_high = 0.0;
  std::vector<double> trajectory_low;
  std::vector<double> trajectory_high;
  double acc_low = 0.0;
  double acc_high = 0.0;
  bool converged_low = false;
  bool converged_high = false;
  /// |v_high - v_low| < kFixedPointsEqualTol
  bool unique = false;
};

inline constexpr double kFixedPointsEqualTol = 1e-8;

DeResult solve_de(const DeConfig& cfg);

struct SweepRow {
  double mu = 0.0;
  double alpha = 0.0;
  double v_low = 0.0;
  double v_high = 0.0;
  double err_low = 0.0;
  double err_high = 0.0;
  bool converged = true;
};

struct HPrimeRow {
  double v = 0.0;
  double alpha = 0.0;
  double hprime = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;      ///< alpha-major, mu-minor
  std::vector<HPrimeRow> hprime;   ///< alpha-major, v-minor
};

/// One row per (mu, alpha) plus h' on v = 10 k / hprime_steps, k = 1..hprime_steps.
/// `base` supplies quad_points, tol and max_iter. Throws InvalidConfig on empty grids.
SweepResult sweep_curves(std::span<const double> mu_grid, std::span<const double> alphas,
                         const DeConfig& base, unsigned workers = 1, unsigned hprime_steps = 100);

struct GammaMoments {
  double mean_plus = 0.0;   ///< v_t
  double mean_minus = 0.0;  ///< -v_t
  double variance = 0.0;    ///< v_t
};

/// Gaussian prediction for the root statistic after t generations.
GammaMoments predict_gamma_moments(const DeConfig& cfg, unsigned t);

}  // namespace sbmsi
