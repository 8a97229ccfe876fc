#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "reference.hpp"
#include "sbmsi/de.hpp"
#include "sbmsi/error.hpp"

namespace sbmsi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kAlphas[] = {0.05, 0.1, 0.2, 0.3, 0.45};

DeConfig config(double mu, double alpha) {
  DeConfig c;
  c.mu = mu;
  c.alpha = alpha;
  return c;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sbmsi::Error thrown";
  return Errc::Internal;
}

TEST(QFunction, Examples) {
  EXPECT_EQ(q_function(0.0), 0.5);
  EXPECT_EQ(q_function(kInf), 0.0);
  EXPECT_EQ(q_function(-kInf), 1.0);
  EXPECT_NEAR(q_function(1.959964), 0.025, 1e-6);
  // Upper tail keeps relative accuracy.
  EXPECT_NEAR(q_function(10.0) / 7.619853024160527e-24, 1.0, 1e-12);
  EXPECT_NEAR(q_function(-1.0) + q_function(1.0), 1.0, 1e-15);
}

TEST(HEval, ValueAtZeroIsSquaredChannelBias) {
  for (double a : kAlphas) EXPECT_NEAR(h_eval(0.0, a), (1 - 2 * a) * (1 - 2 * a), 1e-10);
  EXPECT_EQ(h_eval(0.0, 0.5), 0.0);
}

TEST(HEval, MatchesHighPrecisionReference) {
  // mpmath quad at 30 digits.
  EXPECT_NEAR(h_eval(1.0, 0.3), 0.6027106619288597, 1e-12);
  EXPECT_NEAR(h_eval(5.0, 0.3), 0.9652029653554888, 1e-12);
  EXPECT_NEAR(h_eval(10.0, 0.3), 0.9978063287634651, 1e-12);
}

TEST(HEval, SaturatesAndAgreesWithMonteCarlo) {
  EXPECT_GT(h_eval(50.0, 0.3), 0.9999);
  for (double v : {0.3, 2.0, 50.0}) {
    const double mc = testing::monte_carlo_h(v, 0.2, 2'000'000, 7);
    EXPECT_NEAR(h_eval(v, 0.2), mc, 5.0 * std::sqrt(1.0 / 2'000'000));
  }
}

TEST(HEval, QuadratureIsStableUnderRefinement) {
  for (double a : kAlphas) {
    for (double v = 0.0; v <= 50.0; v += 0.25) {
      ASSERT_LT(std::abs(h_eval(v, a, 61) - h_eval(v, a, 121)), 1e-10) << "v=" << v << " alpha=" << a;
    }
  }
}

TEST(HEval, NondecreasingInV) {
  for (double a : kAlphas) {
    double prev = h_eval(0.0, a);
    for (double v = 0.01; v <= 30.0; v += 0.01) {
      const double h = h_eval(v, a);
      ASSERT_LE(prev, h + 1e-10);
      prev = h;
    }
  }
}

TEST(HEval, RejectsBadInput) {
  EXPECT_EQ(code_of([] { h_eval(-1e-9, 0.2); }), Errc::NegativeV);
  EXPECT_EQ(code_of([] { h_prime(0.0, 0.2); }), Errc::NonPositiveV);
  EXPECT_EQ(code_of([] { h_eval(1.0, 0.0); }), Errc::AlphaOutOfRange);
  EXPECT_EQ(code_of([] { h_eval(1.0, 0.6); }), Errc::AlphaOutOfRange);
  EXPECT_EQ(code_of([] { h_eval(1.0, 0.2, 20); }), Errc::InvalidConfig);
  EXPECT_EQ(code_of([] { h_eval(1.0, 0.2, 62); }), Errc::InvalidConfig);
}

TEST(HPrime, FiniteDifferenceAgreement) {
  const double delta = 1e-5;
  for (double a : kAlphas) {
    for (double v : {0.5, 2.0, 5.0}) {
      const double fd = (h_eval(v + delta, a) - h_eval(v - delta, a)) / (2 * delta);
      EXPECT_NEAR(h_prime(v, a), fd, 1e-6) << "v=" << v << " alpha=" << a;
    }
  }
}

TEST(HPrime, StaysInUnitInterval) {
  for (double a : kAlphas) {
    for (double v = 1e-3; v <= 10.0; v += 0.01) {
      const double d = h_prime(v, a);
      ASSERT_GE(d, -1e-8);
      ASSERT_LE(d, 1.0 + 1e-8);
    }
  }
}

TEST(HPrime, DecaysInTail) { EXPECT_LT(h_prime(10.0, 0.3), h_prime(1.0, 0.3)); }

TEST(TanhMoments, SymmetricVariableIdentity) {
  for (double a : kAlphas) {
    const DeResult r = solve_de(config(2.5, a));
    for (double v : {r.v_low, 1.0, 5.0}) {
      const TanhMoments m = tanh_moments(v, a);
      EXPECT_NEAR(m.mean_tanh, m.mean_tanh_sq, 1e-8) << "v=" << v;
      EXPECT_NEAR(m.mean_tanh, h_eval(v, a), 1e-15);
    }
  }
}

TEST(FixedPoint, ZeroSignal) {
  const DeResult r = solve_de(config(0.0, 0.2));
  EXPECT_EQ(r.v_low, 0.0);
  EXPECT_EQ(r.v_high, 0.0);
  EXPECT_TRUE(r.converged_low);
  EXPECT_TRUE(r.unique);
  EXPECT_NEAR(r.acc_low, 0.8, 1e-15);
}

TEST(FixedPoint, UniqueBelowThreshold) {
  const DeResult r = solve_de(config(1.5, 0.25));
  EXPECT_NEAR(r.v_low, r.v_high, 1e-9);
  EXPECT_TRUE(r.unique);
}

TEST(FixedPoint, StructureAcrossGrid) {
  for (double mu = 0.0; mu <= 6.0; mu += 0.5) {
    for (double a : kAlphas) {
      const DeConfig c = config(mu, a);
      const DeResult r = solve_de(c);
      ASSERT_TRUE(r.converged_low && r.converged_high);
      EXPECT_LE(r.v_low, r.v_high + c.tol);
      EXPECT_GE(r.v_low, 0.0);
      EXPECT_LE(r.v_high, mu * mu / 4 + c.tol);
      for (std::size_t k = 1; k < r.trajectory_low.size(); ++k) {
        ASSERT_GE(r.trajectory_low[k], r.trajectory_low[k - 1] - 1e-12);
      }
      for (std::size_t k = 1; k < r.trajectory_high.size(); ++k) {
        ASSERT_LE(r.trajectory_high[k], r.trajectory_high[k - 1] + 1e-12);
      }
      EXPECT_LT(std::abs(r.v_low - mu * mu / 4 * h_eval(r.v_low, a)), 10 * c.tol);
    }
  }
}

TEST(FixedPoint, ContractionBelowThreshold) {
  for (double mu : {0.5, 1.0, 1.5, 1.9}) {
    for (double a : {0.1, 0.3}) {
      const auto low = fixed_point(config(mu, a), Direction::FromBelow);
      const auto high = fixed_point(config(mu, a), Direction::FromAbove);
      // low.trajectory[k] = v_k, high.trajectory[k-1] = w_k.
      const std::size_t n = std::min(low.trajectory.size(), high.trajectory.size() + 1);
      for (std::size_t k = 1; k + 1 < n; ++k) {
        const double gap = std::abs(high.trajectory[k - 1] - low.trajectory[k]);
        const double next = std::abs(high.trajectory[k] - low.trajectory[k + 1]);
        ASSERT_LE(next, mu * mu / 4 * gap + 1e-12);
      }
    }
  }
}

TEST(FixedPoint, IterationCapReportsNoConvergence) {
  DeConfig c = config(5.0, 0.1);
  c.max_iter = 2;
  const auto fp = fixed_point(c, Direction::FromBelow);
  EXPECT_FALSE(fp.converged);
  EXPECT_EQ(fp.trajectory.size(), 3u);
  c.tol = 0.0;
  EXPECT_EQ(code_of([&] { fixed_point(c, Direction::FromBelow); }), Errc::InvalidConfig);
}

TEST(DeAccuracy, Examples) {
  EXPECT_NEAR(de_accuracy(0.0, 0.2), 0.8, 1e-15);
  EXPECT_NEAR(de_accuracy(1e-12, 0.2), 0.8, 1e-12);
  EXPECT_EQ(de_accuracy(0.0, 0.5), 0.5);
  EXPECT_NEAR(de_accuracy(1.0, 0.5), 0.8413447460685429, 1e-12);
  EXPECT_GE(de_accuracy(25.0, 0.3), 0.999);
  EXPECT_EQ(code_of([] { de_accuracy(-1.0, 0.2); }), Errc::NegativeV);
}

TEST(SweepCurves, ShapeLimitsAndMonotonicity) {
  std::vector<double> mus;
  for (int k = 0; k <= 24; ++k) mus.push_back(0.25 * k);
  const std::vector<double> alphas(std::begin(kAlphas), std::end(kAlphas));
  const SweepResult s = sweep_curves(mus, alphas, DeConfig{}, 1, 50);
  ASSERT_EQ(s.rows.size(), mus.size() * alphas.size());
  ASSERT_EQ(s.hprime.size(), 50u * alphas.size());
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const SweepRow* row = &s.rows[ai * mus.size()];
    EXPECT_NEAR(row[0].err_low, alphas[ai], 1e-10);
    for (std::size_t k = 1; k < mus.size(); ++k) {
      EXPECT_EQ(row[k].alpha, alphas[ai]);
      EXPECT_LE(row[k].err_low, row[k - 1].err_low + 1e-9);
      EXPECT_TRUE(row[k].converged);
    }
  }
  EXPECT_THROW(sweep_curves({}, alphas, DeConfig{}), Error);
}

TEST(SweepCurves, WorkerCountIsInvisible) {
  const std::vector<double> mus{0.0, 1.0, 2.5, 4.0};
  const std::vector<double> alphas{0.1, 0.3};
  const SweepResult a = sweep_curves(mus, alphas, DeConfig{}, 1, 10);
  const SweepResult b = sweep_curves(mus, alphas, DeConfig{}, 8, 10);
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].v_low, b.rows[k].v_low);
    EXPECT_EQ(a.rows[k].err_high, b.rows[k].err_high);
  }
}

TEST(GammaMoments, Examples) {
  const GammaMoments m0 = predict_gamma_moments(config(3.0, 0.3), 0);
  EXPECT_EQ(m0.mean_plus, 0.0);
  EXPECT_EQ(m0.variance, 0.0);
  const GammaMoments m1 = predict_gamma_moments(config(3.0, 0.3), 1);
  EXPECT_NEAR(m1.mean_plus, 9.0 * 0.16 / 4.0, 1e-10);
  EXPECT_NEAR(m1.mean_minus, -m1.mean_plus, 0.0);
  EXPECT_EQ(m1.variance, m1.mean_plus);
  for (unsigned t = 1; t < 6; ++t) {
    const GammaMoments m = predict_gamma_moments(config(3.0, 0.3), t);
    EXPECT_EQ(m.mean_plus / m.variance, 1.0);
    EXPECT_EQ(m.mean_minus / m.variance, -1.0);
  }
}

}  // namespace
}  // namespace sbmsi
