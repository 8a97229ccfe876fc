#include "sbmsi/de.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <string>

#include "sbmsi/error.hpp"
#include "sbmsi/model.hpp"
#include "sbmsi/parallel.hpp"

namespace sbmsi {

namespace {

constexpr double kZRange = 9.0;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

using Legendre = boost::math::quadrature::gauss<double, 10>;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw Error(Errc::AlphaOutOfRange, "density evolution needs alpha in (0, 1/2], got " + std::to_string(alpha));
  }
}

void check_quad(unsigned quad_points) {
  if (quad_points < 21 || quad_points % 2 == 0) {
    throw Error(Errc::InvalidConfig, "quad_points must be odd and >= 21, got " + std::to_string(quad_points));
  }
}

double gamma_of(double alpha) { return side_info_strength(alpha); }

// E over Z and the two-point U of g(v + sqrt(v) Z + U).
template <class G>
double mixture_expect(double v, double alpha, unsigned quad_points, G&& g) {
  const double gamma = gamma_of(alpha);
  if (v == 0.0) return (1.0 - alpha) * g(gamma) + alpha * g(-gamma);
  const double s = std::sqrt(v);
  const GaussianRule rule(quad_points, s);
  const double plus = rule.expect([&](double z) { return g(v + s * z + gamma); });
  const double minus = rule.expect([&](double z) { return g(v + s * z - gamma); });
  return (1.0 - alpha) * plus + alpha * minus;
}

}  // namespace

void validate_de_config(const DeConfig& cfg) {
  check_alpha(cfg.alpha);
  check_quad(cfg.quad_points);
  if (!std::isfinite(cfg.mu)) throw Error(Errc::InvalidConfig, "mu must be finite");
  if (!(cfg.tol > 0.0)) throw Error(Errc::InvalidConfig, "tol must be positive");
  if (cfg.max_iter == 0) throw Error(Errc::InvalidConfig, "max_iter must be positive");
}

double q_function(double x) noexcept {
  if (x == INFINITY) return 0.0;
  if (x == -INFINITY) return 1.0;
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

GaussianRule::GaussianRule(unsigned quad_points, double s) {
  const double panels_per_unit = static_cast<double>(quad_points) / 3.0;
  const auto panels = static_cast<std::size_t>(std::ceil(panels_per_unit * std::max(1.0, s)));
  const double width = 2.0 * kZRange / static_cast<double>(panels);
  const auto& x = Legendre::abscissa();
  const auto& w = Legendre::weights();
  nodes_.reserve(panels * 10);
  weights_.reserve(panels * 10);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = -kZRange + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (double sign : {-1.0, 1.0}) {
        const double z = mid + sign * 0.5 * width * x[k];
        nodes_.push_back(z);
        weights_.push_back(0.5 * width * w[k] * kInvSqrt2Pi * std::exp(-0.5 * z * z));
      }
    }
  }
}

double h_eval(double v, double alpha, unsigned quad_points) {
  if (!(v >= 0.0)) throw Error(Errc::NegativeV, "h needs v >= 0");
  check_alpha(alpha);
  check_quad(quad_points);
  return mixture_expect(v, alpha, quad_points, [](double w) { return std::tanh(w); });
}

double h_prime(double v, double alpha, unsigned quad_points) {
  if (!(v > 0.0)) throw Error(Errc::NonPositiveV, "h' needs v > 0");
  check_alpha(alpha);
  check_quad(quad_points);
  return mixture_expect(v, alpha, quad_points, [](double w) {
    // 1 - tanh w = 2 / (1 + e^{2w}) avoids cancellation for large w.
    const double one_minus = 2.0 / (1.0 + std::exp(2.0 * w));
    const double sech2 = one_minus * (2.0 - one_minus);
    return one_minus * sech2;
  });
}

TanhMoments tanh_moments(double v, double alpha, unsigned quad_points) {
  if (!(v >= 0.0)) throw Error(Errc::NegativeV, "tanh moments need v >= 0");
  check_alpha(alpha);
  check_quad(quad_points);
  TanhMoments m;
  m.mean_tanh = mixture_expect(v, alpha, quad_points, [](double w) { return std::tanh(w); });
  m.mean_tanh_sq = mixture_expect(v, alpha, quad_points, [](double w) {
    const double th = std::tanh(w);
    return th * th;
  });
  return m;
}

FixedPoint fixed_point(const DeConfig& cfg, Direction direction) {
  validate_de_config(cfg);
  const double scale = cfg.mu * cfg.mu / 4.0;
  FixedPoint out;
  double v = direction == Direction::FromBelow ? 0.0 : scale;
  out.trajectory.push_back(v);
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    const double next = scale * h_eval(v, cfg.alpha, cfg.quad_points);
    const double step = next - v;
    const bool wrong_way = direction == Direction::FromBelow ? step < -cfg.tol : step > cfg.tol;
    if (wrong_way) {
      throw Error(Errc::Internal, "density evolution iterate moved against its monotone direction at step " +
                                      std::to_string(it + 1));
    }
    out.trajectory.push_back(next);
    v = next;
    if (std::abs(step) < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.value = v;
  return out;
}

double de_accuracy(double v, double alpha) {
  if (!(v >= 0.0)) throw Error(Errc::NegativeV, "accuracy needs v >= 0");
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw Error(Errc::AlphaOutOfRange, "alpha must be in [0, 1/2]");
  const double gamma = side_info_strength(alpha);
  if (v == 0.0) return gamma > 0.0 ? 1.0 - alpha : 0.5;
  const double s = std::sqrt(v);
  return 1.0 - (1.0 - alpha) * q_function((v + gamma) / s) - alpha * q_function((v - gamma) / s);
}

DeResult solve_de(const DeConfig& cfg) {
  auto low = fixed_point(cfg, Direction::FromBelow);
  auto high = fixed_point(cfg, Direction::FromAbove);
  DeResult r;
  r.v_low = low.value;
  r.v_high = high.value;
  r.converged_low = low.converged;
  r.converged_high = high.converged;
  r.trajectory_low = std::move(low.trajectory);
  r.trajectory_high = std::move(high.trajectory);
  r.acc_low = de_accuracy(r.v_low, cfg.alpha);
  r.acc_high = de_accuracy(r.v_high, cfg.alpha);
  r.unique = std::abs(r.v_high - r.v_low) < kFixedPointsEqualTol;
  return r;
}

SweepResult sweep_curves(std::span<const double> mu_grid, std::span<const double> alphas, const DeConfig& base,
                         unsigned workers, unsigned hprime_steps) {
  if (mu_grid.empty() || alphas.empty()) throw Error(Errc::InvalidConfig, "sweep grids must be nonempty");
  for (double a : alphas) check_alpha(a);
  check_quad(base.quad_points);

  SweepResult out;
  out.rows.resize(mu_grid.size() * alphas.size());
  parallel_for(out.rows.size(), workers, [&](std::size_t idx) {
    const std::size_t ai = idx / mu_grid.size();
    const std::size_t mi = idx % mu_grid.size();
    DeConfig cfg = base;
    cfg.mu = mu_grid[mi];
    cfg.alpha = alphas[ai];
    const DeResult r = solve_de(cfg);
    SweepRow& row = out.rows[idx];
    row.mu = cfg.mu;
    row.alpha = cfg.alpha;
    row.v_low = r.v_low;
    row.v_high = r.v_high;
    row.err_low = 1.0 - r.acc_low;
    row.err_high = 1.0 - r.acc_high;
    row.converged = r.converged_low && r.converged_high;
  });

  out.hprime.resize(static_cast<std::size_t>(hprime_steps) * alphas.size());
  parallel_for(out.hprime.size(), workers, [&](std::size_t idx) {
    const std::size_t ai = idx / hprime_steps;
    const std::size_t k = idx % hprime_steps + 1;
    HPrimeRow& row = out.hprime[idx];
    row.v = 10.0 * static_cast<double>(k) / static_cast<double>(hprime_steps);
    row.alpha = alphas[ai];
    row.hprime = h_prime(row.v, row.alpha, base.quad_points);
  });
  return out;
}

GammaMoments predict_gamma_moments(const DeConfig& cfg, unsigned t) {
  validate_de_config(cfg);
  const double scale = cfg.mu * cfg.mu / 4.0;
  double v = 0.0;
  for (unsigned k = 0; k < t; ++k) v = scale * h_eval(v, cfg.alpha, cfg.quad_points);
  return {v, -v, v};
}

}  // namespace sbmsi
