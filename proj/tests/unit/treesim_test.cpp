#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "reference.hpp"
#include "sbmsi/error.hpp"
#include "sbmsi/llr.hpp"
#include "sbmsi/treesim.hpp"

namespace sbmsi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams tree_params(double a, double b, double alpha) { return validate_params(0, a, b, alpha); }

GwTree root_with_child(Label root_tau, Label root_noisy, Label child_tau, Label child_noisy) {
  const std::vector<std::int32_t> parent{-1, 0};
  const std::vector<Label> tau{root_tau, child_tau};
  const std::vector<Label> noisy{root_noisy, child_noisy};
  return GwTree::from_parents(1, parent, tau, noisy);
}

RecursionOptions with_mode(BoundaryMode m) {
  RecursionOptions o;
  o.mode = m;
  return o;
}

TEST(GwTree, DepthZeroIsRootOnly) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const GwTree t = sample_gw_tree(tree_params(15, 5, 0.2), 0, s);
    EXPECT_EQ(t.size(), 1u);
    EXPECT_EQ(t.node(0).child_count, 0u);
  }
}

TEST(GwTree, LayoutIsBreadthFirst) {
  const GwTree t = sample_gw_tree(tree_params(6, 2, 0.2), 4, 5);
  unsigned prev_depth = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const TreeNode& nd = t.node(i);
    EXPECT_GE(nd.depth, prev_depth);
    EXPECT_LE(nd.depth, 4u);
    prev_depth = nd.depth;
    if (i > 0) {
      EXPECT_EQ(nd.depth, t.node(nd.parent).depth + 1);
    }
    for (std::uint32_t c = 0; c < nd.child_count; ++c) EXPECT_EQ(t.node(nd.first_child + c).parent, static_cast<int>(i));
  }
  for (unsigned k = 0; k <= 4; ++k) {
    const auto [b, e] = t.level_range(k);
    for (std::size_t i = b; i < e; ++i) EXPECT_EQ(t.node(i).depth, k);
  }
}

TEST(GwTree, DeterministicInSeed) {
  const auto p = tree_params(15, 5, 0.2);
  const GwTree x = sample_gw_tree(p, 3, 99);
  const GwTree y = sample_gw_tree(p, 3, 99);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x.node(i).tau, y.node(i).tau);
    EXPECT_EQ(x.node(i).tau_tilde, y.node(i).tau_tilde);
    EXPECT_EQ(x.node(i).parent, y.node(i).parent);
  }
}

TEST(GwTree, OffspringStatistics) {
  const auto p = tree_params(15, 5, 0.2);
  const int replicas = 10000;
  double children = 0.0;
  double children_sq = 0.0;
  double same = 0.0;
  double total = 0.0;
  double flips = 0.0;
  double nodes = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const GwTree t = sample_gw_tree(p, 1, static_cast<std::uint64_t>(r));
    const double k = t.node(0).child_count;
    children += k;
    children_sq += k * k;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i > 0) {
        same += t.node(i).tau == t.node(0).tau ? 1.0 : 0.0;
        total += 1.0;
      }
      flips += t.node(i).tau != t.node(i).tau_tilde ? 1.0 : 0.0;
      nodes += 1.0;
    }
  }
  const double mean = children / replicas;
  const double var = children_sq / replicas - mean * mean;
  EXPECT_NEAR(mean, 10.0, 3.0 * std::sqrt(var / replicas));
  const double q = 0.75;
  EXPECT_NEAR(same / total, q, 3.0 * std::sqrt(q * (1 - q) / total));
  EXPECT_NEAR(flips / nodes, 0.2, 3.0 * std::sqrt(0.16 / nodes));
}

TEST(GwTree, RejectsBadLayouts) {
  const std::vector<Label> l3{1, 1, 1};
  EXPECT_THROW(GwTree::from_parents(2, std::vector<std::int32_t>{-1, 1, 0}, l3, l3), Error);
  EXPECT_THROW(GwTree::from_parents(1, std::vector<std::int32_t>{-1, 0, 1}, l3, l3), Error);
  EXPECT_THROW(GwTree::from_parents(2, std::vector<std::int32_t>{-1, 0}, l3, l3), Error);
}

TEST(GwTree, ExpectedSizeBudget) {
  EXPECT_DOUBLE_EQ(expected_tree_nodes(10.0, 3), 1111.0);
  try {
    sample_gw_tree(tree_params(40, 30, 0.1), 9, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DepthTooLarge);
    EXPECT_FALSE(e.is_validation());
  }
}

TEST(RecurseLlr, DepthZeroExactIsInfinite) {
  const Derived dc = derived_constants(tree_params(15, 5, 0.2));
  const std::vector<std::int32_t> parent{-1};
  for (Label tau : {Label{1}, Label{-1}}) {
    const std::vector<Label> lt{tau};
    const std::vector<Label> ln{1};
    const GwTree t = GwTree::from_parents(0, parent, lt, ln);
    const auto v = recurse_llr(t, dc, with_mode(BoundaryMode::ExactBoundary));
    EXPECT_EQ(v[0], tau > 0 ? kInf : -kInf);
    EXPECT_EQ(recurse_magnetization(t, dc, with_mode(BoundaryMode::ExactBoundary))[0], tau > 0 ? 1.0 : -1.0);
    const auto y = recurse_magnetization(t, dc, with_mode(BoundaryMode::NoisyOnly));
    EXPECT_NEAR(y[0], 0.6, 1e-15);
  }
}

TEST(RecurseLlr, ExactChildContributesBeta) {
  const Derived dc = derived_constants(tree_params(15, 5, 0.2));
  for (Label noisy : {Label{1}, Label{-1}}) {
    const GwTree t = root_with_child(1, noisy, 1, -1);
    const auto v = recurse_llr(t, dc, with_mode(BoundaryMode::ExactBoundary));
    EXPECT_NEAR(v[0], noisy * dc.gamma + dc.beta, 1e-15);
  }
}

TEST(RecurseLlr, NoisyChildHandValue) {
  // gamma = ln 2 and theta = 0.5 here, so F(-gamma) = -atanh(0.5 * 0.6) = -atanh(0.3).
  const Derived dc = derived_constants(tree_params(15, 5, 0.2));
  const GwTree t = root_with_child(-1, 1, 1, -1);
  const auto v = recurse_llr(t, dc, with_mode(BoundaryMode::NoisyOnly));
  EXPECT_NEAR(v[0], 0.38362757635683355, 1e-15);
  EXPECT_NEAR(v[1], -0.6931471805599453, 1e-15);
}

TEST(RecurseLlr, NodesBelowHorizonAreNan) {
  const Derived dc = derived_constants(tree_params(6, 2, 0.2));
  const GwTree t = sample_gw_tree(tree_params(6, 2, 0.2), 3, 4);
  RecursionOptions o = with_mode(BoundaryMode::NoisyOnly);
  o.horizon = 1;
  const auto v = recurse_llr(t, dc, o);
  const auto [b, e] = t.level_range(2);
  for (std::size_t i = b; i < t.size(); ++i) EXPECT_TRUE(std::isnan(v[i]));
  EXPECT_FALSE(std::isnan(v[0]));
  o.horizon = 4;
  EXPECT_THROW(recurse_llr(t, dc, o), Error);
}

TEST(RecurseLlr, OverrideRequiresExactModeAndMatchingLength) {
  const auto p = tree_params(6, 2, 0.2);
  const Derived dc = derived_constants(p);
  const GwTree t = root_with_child(1, 1, 1, 1);
  const std::vector<Label> one{1};
  const std::vector<Label> two{1, 1};
  RecursionOptions o = with_mode(BoundaryMode::NoisyOnly);
  o.boundary_override = one;
  EXPECT_THROW(recurse_llr(t, dc, o), Error);
  o.mode = BoundaryMode::ExactBoundary;
  o.boundary_override = two;
  EXPECT_THROW(recurse_llr(t, dc, o), Error);
}

TEST(RecurseMagnetization, LeafWithoutChildrenIsTanhField) {
  const Derived dc = derived_constants(tree_params(15, 5, 0.3));
  // Root at depth 0 with no children in a tree of depth limit 2.
  const std::vector<std::int32_t> parent{-1};
  const std::vector<Label> l{1};
  const GwTree t = GwTree::from_parents(2, parent, l, std::vector<Label>{-1});
  EXPECT_NEAR(recurse_magnetization(t, dc, with_mode(BoundaryMode::ExactBoundary))[0], std::tanh(-dc.gamma), 1e-15);
}

TEST(RecurseMagnetization, AgreesWithLlrOnRandomTrees) {
  std::mt19937_64 rng(8);
  for (const auto& [a, b] : {std::pair{15.0, 5.0}, std::pair{5.0, 15.0}, std::pair{3.0, 2.0}, std::pair{60.0, 1.0}}) {
    for (double alpha : {0.01, 0.2, 0.45}) {
      const auto p = tree_params(a, b, alpha);
      const Derived dc = derived_constants(p);
      for (int r = 0; r < 20; ++r) {
        const GwTree t = sample_gw_tree(p, 3, rng(), 200000);
        for (BoundaryMode m : {BoundaryMode::ExactBoundary, BoundaryMode::NoisyOnly}) {
          const auto llr = recurse_llr(t, dc, with_mode(m));
          const auto mag = recurse_magnetization(t, dc, with_mode(m));
          for (std::size_t i = 0; i < t.size(); ++i) {
            ASSERT_LE(std::abs(mag[i]), 1.0);
            if (std::isfinite(llr[i])) {
              ASSERT_NEAR(std::tanh(llr[i]), mag[i], 1e-9);
            }
          }
        }
      }
    }
  }
}

TEST(RecurseMagnetization, EqualRatesLeaveOnlySideInformation) {
  const auto p = tree_params(7, 7, 0.3);
  const Derived dc = derived_constants(p);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const GwTree t = sample_gw_tree(p, 3, s);
    const double expected = std::tanh(dc.gamma * t.node(0).tau_tilde);
    EXPECT_NEAR(recurse_magnetization(t, dc, with_mode(BoundaryMode::ExactBoundary))[0], expected, 1e-15);
    EXPECT_NEAR(recurse_magnetization(t, dc, with_mode(BoundaryMode::NoisyOnly))[0], expected, 1e-15);
  }
}

TEST(RecurseLlr, NoiselessLabelsGiveInfiniteField) {
  const auto p = tree_params(15, 5, 0.0);
  const Derived dc = derived_constants(p);
  const GwTree t = sample_gw_tree(p, 2, 3);
  const auto v = recurse_llr(t, dc, with_mode(BoundaryMode::NoisyOnly));
  const auto m = recurse_magnetization(t, dc, with_mode(BoundaryMode::NoisyOnly));
  EXPECT_EQ(v[0], t.node(0).tau * kInf);
  EXPECT_EQ(m[0], t.node(0).tau * 1.0);
}

double root_llr(const GwTree& t, const Derived& dc, std::span<const Label> boundary) {
  RecursionOptions o = with_mode(BoundaryMode::ExactBoundary);
  o.boundary_override = boundary;
  return recurse_llr(t, dc, o)[0];
}

TEST(BoundaryMonotonicity, SingleFlipsAndExtremes) {
  std::mt19937_64 rng(21);
  for (const auto& [a, b] : {std::pair{15.0, 5.0}, std::pair{5.0, 15.0}}) {
    const auto p = tree_params(a, b, 0.2);
    const Derived dc = derived_constants(p);
    for (std::size_t depth = 1; depth <= 3; ++depth) {
      // each level through F multiplies the boundary effect by sign(beta)
      const bool increasing = a > b || depth % 2 == 0;
      int trials = 0;
      while (trials < 200) {
        const GwTree t = sample_gw_tree(p, depth, rng());
        const auto [lb, le] = t.level_range(depth);
        if (lb == le || le - lb > 400) continue;
        std::vector<Label> xi(le - lb);
        for (auto& l : xi) l = testing::random_label(rng);
        const std::size_t pos = rng() % xi.size();
        xi[pos] = -1;
        const double lo = root_llr(t, dc, xi);
        xi[pos] = 1;
        const double hi = root_llr(t, dc, xi);
        if (increasing) {
          EXPECT_GE(hi - lo, -1e-12);
        } else {
          EXPECT_LE(hi - lo, 1e-12);
        }
        const std::vector<Label> plus(xi.size(), 1);
        const std::vector<Label> minus(xi.size(), -1);
        const double top = root_llr(t, dc, increasing ? plus : minus);
        const double bottom = root_llr(t, dc, increasing ? minus : plus);
        EXPECT_GE(top, hi - 1e-12);
        EXPECT_LE(bottom, hi + 1e-12);
        ++trials;
      }
    }
  }
}

TEST(TreeMetrics, EqualRatesGiveSideInformationAccuracy) {
  const auto p = tree_params(7, 7, 0.3);
  const TreeMetrics m = estimate_tree_metrics(p, 2, 4000, 5);
  EXPECT_NEAR(m.q_star.value, 0.7, 1e-12);
  EXPECT_NEAR(m.p_star.value, 0.7, 1e-12);
  EXPECT_EQ(m.gap.value, 0.0);
}

TEST(TreeMetrics, DepthZeroNoisyAccuracy) {
  const TreeMetrics m = estimate_tree_metrics(tree_params(15, 5, 0.2), 0, 2000, 5);
  EXPECT_NEAR(m.q_star.value, 0.8, 1e-12);
  EXPECT_EQ(m.p_star.value, 1.0);
}

TEST(TreeMetrics, ExtraInformationNeverHurts) {
  for (const auto& [a, b, alpha] : {std::tuple{15.0, 5.0, 0.2}, std::tuple{3.0, 1.0, 0.3}, std::tuple{5.0, 15.0, 0.1}}) {
    const TreeMetrics m = estimate_tree_metrics(tree_params(a, b, alpha), 3, 5000, 17);
    EXPECT_GE(m.q_star.value, 1.0 - alpha - 3.0 * m.q_star.std_error);
    EXPECT_GE(m.p_star.value, m.q_star.value - 3.0 * m.p_star.std_error);
    EXPECT_GE(m.gap.value, 0.0);
    EXPECT_LE(m.gap.value, 2.0);
    EXPECT_GT(m.q_star.std_error, 0.0);
  }
}

TEST(TreeMetrics, NoisyRootStatisticIsSignSymmetric) {
  const auto roots = sample_root_statistics(tree_params(15, 5, 0.2), 3, 10000, 31);
  std::vector<double> minus;
  std::vector<double> plus_negated;
  for (const auto& r : roots) {
    if (r.tau < 0) {
      minus.push_back(r.gamma);
    } else {
      plus_negated.push_back(-r.gamma);
    }
  }
  const double n1 = static_cast<double>(minus.size());
  const double n2 = static_cast<double>(plus_negated.size());
  const double critical = 1.628 * std::sqrt((n1 + n2) / (n1 * n2));
  EXPECT_LT(testing::ks_statistic(minus, plus_negated), critical);
}

TEST(TreeMetrics, WorkerCountDoesNotChangeSamples) {
  const auto p = tree_params(15, 5, 0.2);
  for (TreeEngine engine : {TreeEngine::Explicit, TreeEngine::Pooled}) {
    TreeSimOptions o1;
    o1.engine = engine;
    TreeSimOptions o4 = o1;
    o4.workers = 4;
    const auto x = sample_root_statistics(p, 3, 3000, 8, o1);
    const auto y = sample_root_statistics(p, 3, 3000, 8, o4);
    for (std::size_t r = 0; r < x.size(); ++r) {
      ASSERT_EQ(x[r].tau, y[r].tau);
      ASSERT_EQ(x[r].lambda, y[r].lambda);
      ASSERT_EQ(x[r].gamma, y[r].gamma);
    }
  }
}

TEST(TreeMetrics, PooledEngineAgreesWithExplicitTrees) {
  for (unsigned t : {1u, 2u, 3u}) {
    const auto p = tree_params(12, 4, 0.25);
    TreeSimOptions ex;
    ex.engine = TreeEngine::Explicit;
    TreeSimOptions po;
    po.engine = TreeEngine::Pooled;
    const TreeMetrics a = estimate_tree_metrics(p, t, 20000, 1, ex);
    const TreeMetrics b = estimate_tree_metrics(p, t, 20000, 2, po);
    const double se_q = std::hypot(a.q_star.std_error, b.q_star.std_error);
    const double se_p = std::hypot(a.p_star.std_error, b.p_star.std_error);
    EXPECT_NEAR(a.q_star.value, b.q_star.value, 4.0 * se_q) << "t=" << t;
    EXPECT_NEAR(a.p_star.value, b.p_star.value, 4.0 * se_p) << "t=" << t;
  }
}

TEST(TreeMetrics, GapShrinksWithDepthInStrongSignalRegime) {
  const auto p = tree_params(50, 10, 0.3);
  TreeSimOptions o;
  o.engine = TreeEngine::Pooled;
  Estimate prev{2.0, 0.0};
  for (unsigned t = 1; t <= 5; ++t) {
    const TreeMetrics m = estimate_tree_metrics(p, t, 4000, 100 + t, o);
    EXPECT_LE(m.gap.value, prev.value + 3.0 * std::hypot(prev.std_error, m.gap.std_error)) << "t=" << t;
    prev = m.gap;
  }
}

TEST(BoundaryGap, FirstLevelMatchesClosedForm) {
  const auto p = tree_params(2.5, 1.5, 0.2);
  const Derived dc = derived_constants(p);
  const BoundaryGapResult g = boundary_gap(p, 3, 20000, 4);
  ASSERT_EQ(g.gap.size(), 3u);
  ASSERT_EQ(g.ratio.size(), 2u);
  EXPECT_NEAR(g.gap[0].value, 2.0 * dc.beta * dc.d, 3.0 * g.gap[0].std_error);
  for (const auto& r : g.ratio) EXPECT_LE(r.value, std::abs(dc.theta) * dc.d + 3.0 * r.std_error);
}

TEST(BoundaryGap, EqualRatesGiveZero) {
  const BoundaryGapResult g = boundary_gap(tree_params(4, 4, 0.2), 3, 500, 4);
  for (const auto& e : g.gap) {
    EXPECT_EQ(e.value, 0.0);
    EXPECT_EQ(e.std_error, 0.0);
  }
}

TEST(BoundaryGap, NoiselessLabelsGiveZero) {
  const BoundaryGapResult g = boundary_gap(tree_params(4, 2, 0.0), 2, 200, 4);
  for (const auto& e : g.gap) EXPECT_EQ(e.value, 0.0);
}

TEST(TreeAsGraph, PreservesStructureAndLabels) {
  const auto p = tree_params(4, 2, 0.2);
  const GwTree t = sample_gw_tree(p, 3, 12);
  const LabeledGraph g = tree_as_graph(t);
  EXPECT_EQ(g.n(), t.size());
  EXPECT_EQ(g.edge_count() + 1, t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(g.sigma()[i], t.node(i).tau);
    EXPECT_EQ(g.sigma_tilde()[i], t.node(i).tau_tilde);
  }
}

}  // namespace
}  // namespace sbmsi
