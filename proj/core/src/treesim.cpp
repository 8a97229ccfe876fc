#include "sbmsi/treesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "sbmsi/error.hpp"
#include "sbmsi/llr.hpp"
#include "sbmsi/parallel.hpp"
#include "sbmsi/seed.hpp"

namespace sbmsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

// ---------------------------------------------------------------------------
// GwTree

GwTree::GwTree(std::vector<TreeNode> nodes, unsigned depth_limit)
    : nodes_(std::move(nodes)), depth_limit_(depth_limit) {
  if (nodes_.empty()) throw Error(Errc::MalformedGraph, "tree needs a root");
  if (nodes_[0].parent != -1 || nodes_[0].depth != 0) throw Error(Errc::MalformedGraph, "node 0 must be the root");
  std::size_t expected_child = 1;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& nd = nodes_[i];
    if (nd.depth > depth_limit_) throw Error(Errc::MalformedGraph, "node deeper than the depth limit");
    if ((nd.tau != 1 && nd.tau != -1) || (nd.tau_tilde != 1 && nd.tau_tilde != -1)) {
      throw Error(Errc::MalformedGraph, "labels must be +1 or -1");
    }
    if (i > 0) {
      if (nd.parent < 0 || static_cast<std::size_t>(nd.parent) >= i) {
        throw Error(Errc::MalformedGraph, "parents must precede children");
      }
      if (nd.depth != nodes_[nd.parent].depth + 1) throw Error(Errc::MalformedGraph, "child depth mismatch");
      if (nd.depth < nodes_[i - 1].depth) throw Error(Errc::MalformedGraph, "nodes not in BFS order");
    }
    if (nd.child_count > 0 && nd.first_child != expected_child) {
      throw Error(Errc::MalformedGraph, "child ranges must be contiguous in BFS order");
    }
    for (std::uint32_t c = 0; c < nd.child_count; ++c) {
      const std::size_t ci = nd.first_child + c;
      if (ci >= nodes_.size() || nodes_[ci].parent != static_cast<std::int32_t>(i)) {
        throw Error(Errc::MalformedGraph, "child range does not match parent links");
      }
    }
    expected_child += nd.child_count;
  }
  if (expected_child != nodes_.size()) throw Error(Errc::MalformedGraph, "orphan nodes");

  level_begin_.assign(depth_limit_ + 2, nodes_.size());
  for (std::size_t i = nodes_.size(); i-- > 0;) level_begin_[nodes_[i].depth] = i;
  for (unsigned k = depth_limit_ + 1; k-- > 0;) level_begin_[k] = std::min(level_begin_[k], level_begin_[k + 1]);
}

GwTree GwTree::from_parents(unsigned depth_limit, std::span<const std::int32_t> parent, std::span<const Label> tau,
                            std::span<const Label> tau_tilde) {
  const std::size_t n = parent.size();
  if (tau.size() != n || tau_tilde.size() != n) throw Error(Errc::LengthMismatch, "label spans must match parents");
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].parent = parent[i];
    nodes[i].tau = tau[i];
    nodes[i].tau_tilde = tau_tilde[i];
    if (i == 0) continue;
    if (parent[i] < 0 || static_cast<std::size_t>(parent[i]) >= i || parent[i] < parent[i - 1]) {
      throw Error(Errc::MalformedGraph, "parent list must be in BFS order");
    }
    TreeNode& par = nodes[parent[i]];
    if (par.child_count == 0) par.first_child = static_cast<std::uint32_t>(i);
    ++par.child_count;
    nodes[i].depth = par.depth + 1;
  }
  return GwTree(std::move(nodes), depth_limit);
}

std::pair<std::size_t, std::size_t> GwTree::level_range(unsigned depth) const noexcept {
  if (depth > depth_limit_) return {nodes_.size(), nodes_.size()};
  return {level_begin_[depth], level_begin_[depth + 1]};
}

double expected_tree_nodes(double d, unsigned t) {
  double total = 0.0;
  double level = 1.0;
  for (unsigned k = 0; k <= t; ++k) {
    total += level;
    level *= d;
  }
  return total;
}

GwTree sample_gw_tree(const ModelParams& p, unsigned t, std::uint64_t seed, std::size_t max_nodes) {
  const double expected = expected_tree_nodes(0.5 * (p.a + p.b), t);
  if (expected > static_cast<double>(max_nodes)) {
    throw Error(Errc::DepthTooLarge, "expected tree size " + std::to_string(expected) + " exceeds budget " +
                                         std::to_string(max_nodes));
  }
  const std::size_t hard_cap = 4 * max_nodes;

  Rng rng(seed);
  std::poisson_distribution<std::uint32_t> same(0.5 * p.a);
  std::poisson_distribution<std::uint32_t> opposite(0.5 * p.b);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution flip(p.alpha);

  auto noisy = [&](Label tau) { return flip(rng) ? static_cast<Label>(-tau) : tau; };

  std::vector<TreeNode> nodes;
  nodes.reserve(static_cast<std::size_t>(std::min(expected * 1.5 + 16.0, 1.0e7)));
  TreeNode root;
  root.tau = coin(rng) ? Label{1} : Label{-1};
  root.tau_tilde = noisy(root.tau);
  nodes.push_back(root);

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].depth >= t) continue;
    const std::uint32_t n_same = same(rng);
    const std::uint32_t n_opp = opposite(rng);
    const Label tau = nodes[i].tau;
    const std::uint32_t depth = nodes[i].depth + 1;
    nodes[i].first_child = static_cast<std::uint32_t>(nodes.size());
    nodes[i].child_count = n_same + n_opp;
    if (nodes.size() + n_same + n_opp > hard_cap) {
      throw Error(Errc::DepthTooLarge, "tree realization exceeded " + std::to_string(hard_cap) + " nodes");
    }
    for (std::uint32_t c = 0; c < n_same + n_opp; ++c) {
      TreeNode child;
      child.parent = static_cast<std::int32_t>(i);
      child.depth = depth;
      child.tau = c < n_same ? tau : static_cast<Label>(-tau);
      child.tau_tilde = noisy(child.tau);
      nodes.push_back(child);
    }
  }
  return GwTree(std::move(nodes), t);
}

// ---------------------------------------------------------------------------
// Recursions

namespace {

struct Horizon {
  unsigned depth;
  std::size_t boundary_begin;
  std::size_t boundary_end;
};

Horizon resolve_horizon(const GwTree& tree, const RecursionOptions& opts) {
  const unsigned h = opts.horizon.value_or(tree.depth_limit());
  if (h > tree.depth_limit()) throw Error(Errc::InvalidParameter, "horizon beyond the tree's depth limit");
  const auto [b, e] = tree.level_range(h);
  if (!opts.boundary_override.empty()) {
    if (opts.mode != BoundaryMode::ExactBoundary) {
      throw Error(Errc::InvalidParameter, "boundary override requires ExactBoundary mode");
    }
    if (opts.boundary_override.size() != e - b) {
      throw Error(Errc::LengthMismatch, "boundary override must have one label per boundary node");
    }
  }
  return {h, b, e};
}

Label boundary_label(const GwTree& tree, const RecursionOptions& opts, const Horizon& hz, std::size_t i) {
  return opts.boundary_override.empty() ? tree.node(i).tau : opts.boundary_override[i - hz.boundary_begin];
}

double field(const Derived& dc, Label tau_tilde) { return tau_tilde > 0 ? dc.gamma : -dc.gamma; }

}  // namespace

std::vector<double> recurse_llr(const GwTree& tree, const Derived& dc, const RecursionOptions& opts) {
  const Horizon hz = resolve_horizon(tree, opts);
  std::vector<double> value(tree.size(), kNaN);
  for (std::size_t i = hz.boundary_end; i-- > 0;) {
    const TreeNode& nd = tree.node(i);
    if (nd.depth == hz.depth) {
      if (opts.mode == BoundaryMode::ExactBoundary) {
        value[i] = boundary_label(tree, opts, hz, i) > 0 ? kInf : -kInf;
      } else {
        value[i] = field(dc, nd.tau_tilde);
      }
      continue;
    }
    double sum = 0.0;
    for (std::uint32_t c = 0; c < nd.child_count; ++c) sum += llr_transfer(value[nd.first_child + c], dc.beta);
    value[i] = field(dc, nd.tau_tilde) + sum;
  }
  return value;
}

std::vector<double> recurse_magnetization(const GwTree& tree, const Derived& dc, const RecursionOptions& opts) {
  const Horizon hz = resolve_horizon(tree, opts);
  const double side = std::tanh(dc.gamma);  // 1 - 2 alpha
  std::vector<double> mag(tree.size(), kNaN);
  for (std::size_t i = hz.boundary_end; i-- > 0;) {
    const TreeNode& nd = tree.node(i);
    if (nd.depth == hz.depth) {
      if (opts.mode == BoundaryMode::ExactBoundary) {
        mag[i] = boundary_label(tree, opts, hz, i) > 0 ? 1.0 : -1.0;
      } else {
        mag[i] = nd.tau_tilde > 0 ? side : -side;
      }
      continue;
    }
    const double h = field(dc, nd.tau_tilde);
    if (std::isinf(h)) {
      mag[i] = h > 0 ? 1.0 : -1.0;
      continue;
    }
    // log of e^{+h} prod(1 + theta x) and e^{-h} prod(1 - theta x)
    double log_plus = h;
    double log_minus = -h;
    for (std::uint32_t c = 0; c < nd.child_count; ++c) {
      const double x = mag[nd.first_child + c];
      log_plus += std::log1p(dc.theta * x);
      log_minus += std::log1p(-dc.theta * x);
    }
    const double top = std::max(log_plus, log_minus);
    const double wp = std::exp(log_plus - top);
    const double wm = std::exp(log_minus - top);
    mag[i] = (wp - wm) / (wp + wm);
  }
  return mag;
}

LabeledGraph tree_as_graph(const GwTree& tree) {
  std::vector<Edge> edges;
  edges.reserve(tree.size());
  std::vector<Label> sigma(tree.size());
  std::vector<Label> sigma_tilde(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const TreeNode& nd = tree.node(i);
    sigma[i] = nd.tau;
    sigma_tilde[i] = nd.tau_tilde;
    if (nd.parent >= 0) edges.push_back({static_cast<Vertex>(nd.parent), static_cast<Vertex>(i)});
  }
  return LabeledGraph(tree.size(), std::move(edges), std::move(sigma), std::move(sigma_tilde));
}

// ---------------------------------------------------------------------------
// Pooled engine

namespace {

/// Inverse-CDF table for a Poisson law, truncated 12 standard deviations (plus
/// a margin) away from the mean where the omitted mass is far below 2^-53.
class PoissonTable {
 public:
  explicit PoissonTable(double mean) {
    const double sd = std::sqrt(mean);
    lo_ = static_cast<std::uint32_t>(std::max(0.0, std::floor(mean - 12.0 * sd - 10.0)));
    const auto hi = static_cast<std::uint32_t>(std::ceil(mean + 12.0 * sd + 10.0));
    std::vector<double> pmf;
    for (std::uint32_t k = lo_; k <= hi; ++k) {
      const double kk = static_cast<double>(k);
      pmf.push_back(mean > 0.0 ? std::exp(-mean + kk * std::log(mean) - std::lgamma(kk + 1.0)) : (k == 0 ? 1.0 : 0.0));
    }
    double total = 0.0;
    for (double q : pmf) total += q;
    cdf_.reserve(pmf.size());
    double acc = 0.0;
    for (double q : pmf) {
      acc += q / total;
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }

  std::uint32_t operator()(Rng& rng) const {
    const double u = unit_uniform(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return lo_ + static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  }

 private:
  std::uint32_t lo_ = 0;
  std::vector<double> cdf_;
};

struct LlrPair {
  double lambda;
  double gamma;
  LlrPair operator-() const { return {-lambda, -gamma}; }
};

/// Exact sampler of (Lambda, Gamma) for a node with true label + whose subtree
/// reaches the boundary after `level` generations.
class SubtreeSampler {
 public:
  SubtreeSampler(const ModelParams& p, const Derived& dc)
      : dc_(dc),
        alpha_(p.alpha),
        same_prob_(p.a / (p.a + p.b)),
        gamma_transfer_(llr_transfer(dc.gamma, dc.beta)),
        children_(dc.d),
        same_kept_(0.5 * p.a * (1.0 - p.alpha)),
        same_flipped_(0.5 * p.a * p.alpha),
        opp_flipped_(0.5 * p.b * p.alpha),
        opp_kept_(0.5 * p.b * (1.0 - p.alpha)) {}

  Label noisy_plus(Rng& rng) const { return unit_uniform(rng) < alpha_ ? Label{-1} : Label{1}; }

  double field(Label tau_tilde) const { return tau_tilde > 0 ? dc_.gamma : -dc_.gamma; }

  LlrPair fresh(unsigned level, Rng& rng) const {
    const Label tt = noisy_plus(rng);
    return fresh_with_label(level, tt, rng);
  }

  LlrPair fresh_with_label(unsigned level, Label tau_tilde, Rng& rng) const {
    const double h = field(tau_tilde);
    if (level == 0) return {kInf, h};
    if (level == 1) {
      // Children sit on the boundary. Poisson splitting by (relative label,
      // noisy label) gives four independent counts.
      const double s_kept = same_kept_(rng);
      const double s_flip = same_flipped_(rng);
      const double o_flip = opp_flipped_(rng);
      const double o_kept = opp_kept_(rng);
      const double exact = s_kept + s_flip - o_flip - o_kept;
      const double noisy = s_kept - s_flip + o_flip - o_kept;
      return {h + dc_.beta * exact, h + gamma_transfer_ * noisy};
    }
    const std::uint32_t k = children_(rng);
    double sum_l = 0.0;
    double sum_g = 0.0;
    for (std::uint32_t c = 0; c < k; ++c) {
      const bool same = unit_uniform(rng) < same_prob_;
      LlrPair child = fresh(level - 1, rng);
      if (!same) child = -child;
      sum_l += llr_transfer(child.lambda, dc_.beta);
      sum_g += llr_transfer(child.gamma, dc_.beta);
    }
    return {h + sum_l, h + sum_g};
  }

  /// Root whose children are distinct members of `pool` (depth t-1 subtrees
  /// with label +). `stamp`/`mark` track members already used by this root.
  LlrPair from_pool(std::span<const LlrPair> pool, Label tau_tilde, Rng& rng, std::vector<std::uint32_t>& stamp,
                    std::uint32_t mark) const {
    const double h = field(tau_tilde);
    const std::uint32_t k = children_(rng);
    if (2 * static_cast<std::size_t>(k) > pool.size()) {
      throw Error(Errc::DepthTooLarge, "subtree pool too small for the drawn degree");
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    double sum_l = 0.0;
    double sum_g = 0.0;
    for (std::uint32_t c = 0; c < k; ++c) {
      const bool same = unit_uniform(rng) < same_prob_;
      std::size_t idx = pick(rng);
      while (stamp[idx] == mark) idx = pick(rng);
      stamp[idx] = mark;
      const LlrPair child = same ? pool[idx] : -pool[idx];
      sum_l += llr_transfer(child.lambda, dc_.beta);
      sum_g += llr_transfer(child.gamma, dc_.beta);
    }
    return {h + sum_l, h + sum_g};
  }

  /// Expected work (transfer evaluations) of fresh(level).
  double cost(unsigned level) const {
    if (level <= 1) return 1.0;
    return dc_.d * cost(level - 1);
  }

 private:
  Derived dc_;
  double alpha_;
  double same_prob_;
  double gamma_transfer_;
  PoissonTable children_;
  PoissonTable same_kept_;
  PoissonTable same_flipped_;
  PoissonTable opp_flipped_;
  PoissonTable opp_kept_;
};

RootSample mirror_root(LlrPair plus, Label tau, Label tau_tilde_plus) {
  if (tau > 0) return {tau, tau_tilde_plus, plus.lambda, plus.gamma};
  return {tau, static_cast<Label>(-tau_tilde_plus), -plus.lambda, -plus.gamma};
}

constexpr double kPooledWorkBudget = 5.0e10;
constexpr std::size_t kRootChunk = 1024;

std::vector<RootSample> pooled_roots(const ModelParams& p, unsigned t, std::size_t replicas, std::uint64_t seed,
                                     const TreeSimOptions& opts) {
  const Derived dc = derived_constants(p);
  const SubtreeSampler sampler(p, dc);
  std::vector<RootSample> out(replicas);

  // Every root is sampled conditioned on label + and mirrored when tau = -.
  if (t <= 2) {
    if (static_cast<double>(replicas) * sampler.cost(t) * dc.d > kPooledWorkBudget) {
      throw Error(Errc::DepthTooLarge, "pooled tree simulation exceeds the work budget");
    }
    parallel_for(replicas, opts.workers, [&](std::size_t r) {
      Rng rng = make_rng(seed, stream_id(StreamPurpose::Replica, r));
      const Label tau = unit_uniform(rng) < 0.5 ? Label{1} : Label{-1};
      const Label tt = sampler.noisy_plus(rng);
      out[r] = mirror_root(sampler.fresh_with_label(t, tt, rng), tau, tt);
    });
    return out;
  }

  const std::size_t pool_size =
      opts.pool_size != 0 ? opts.pool_size
                          : std::max<std::size_t>(replicas, static_cast<std::size_t>(100.0 * std::ceil(dc.d)));
  const double work = static_cast<double>(pool_size) * sampler.cost(t - 1) + static_cast<double>(replicas) * dc.d;
  if (work > kPooledWorkBudget) throw Error(Errc::DepthTooLarge, "pooled tree simulation exceeds the work budget");
  if (pool_size > std::numeric_limits<std::uint32_t>::max()) throw Error(Errc::DepthTooLarge, "pool too large");

  std::vector<LlrPair> pool(pool_size);
  parallel_for(pool_size, opts.workers, [&](std::size_t j) {
    Rng rng = make_rng(seed, stream_id(StreamPurpose::Pool, j));
    pool[j] = sampler.fresh(t - 1, rng);
  });

  const std::size_t chunks = (replicas + kRootChunk - 1) / kRootChunk;
  parallel_for(chunks, opts.workers, [&](std::size_t c) {
    std::vector<std::uint32_t> stamp(pool_size, 0);
    const std::size_t begin = c * kRootChunk;
    const std::size_t end = std::min(replicas, begin + kRootChunk);
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng = make_rng(seed, stream_id(StreamPurpose::Replica, r));
      const Label tau = unit_uniform(rng) < 0.5 ? Label{1} : Label{-1};
      const Label tt = sampler.noisy_plus(rng);
      const auto mark = static_cast<std::uint32_t>(r - begin + 1);
      out[r] = mirror_root(sampler.from_pool(pool, tt, rng, stamp, mark), tau, tt);
    }
  });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Monte Carlo drivers

namespace {

bool use_explicit(const ModelParams& p, unsigned t, const TreeSimOptions& opts) {
  switch (opts.engine) {
    case TreeEngine::Explicit: return true;
    case TreeEngine::Pooled: return false;
    case TreeEngine::Auto: break;
  }
  return expected_tree_nodes(0.5 * (p.a + p.b), t) <= kAutoExplicitNodes;
}

}  // namespace

std::vector<RootSample> sample_root_statistics(const ModelParams& p, unsigned t, std::size_t replicas,
                                               std::uint64_t seed, const TreeSimOptions& opts) {
  if (replicas == 0) throw Error(Errc::InvalidParameter, "replicas must be at least 1");
  if (!use_explicit(p, t, opts)) return pooled_roots(p, t, replicas, seed, opts);

  const Derived dc = derived_constants(p);
  RecursionOptions exact;
  exact.mode = BoundaryMode::ExactBoundary;
  RecursionOptions noisy;
  noisy.mode = BoundaryMode::NoisyOnly;
  std::vector<RootSample> out(replicas);
  parallel_for(replicas, opts.workers, [&](std::size_t r) {
    const GwTree tree = sample_gw_tree(p, t, derive_seed(seed, stream_id(StreamPurpose::Tree, r)), opts.max_nodes);
    const auto lambda = recurse_llr(tree, dc, exact);
    const auto gamma = recurse_llr(tree, dc, noisy);
    out[r] = {tree.node(0).tau, tree.node(0).tau_tilde, lambda[0], gamma[0]};
  });
  return out;
}

TreeMetrics estimate_tree_metrics(const ModelParams& p, unsigned t, std::size_t replicas, std::uint64_t seed,
                                  const TreeSimOptions& opts) {
  const auto roots = sample_root_statistics(p, t, replicas, seed, opts);
  std::vector<double> abs_x(replicas);
  std::vector<double> abs_y(replicas);
  std::vector<double> gap(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    const double x = std::tanh(roots[r].lambda);
    const double y = std::tanh(roots[r].gamma);
    abs_x[r] = std::abs(x);
    abs_y[r] = std::abs(y);
    gap[r] = std::abs(x - y);
  }
  const Estimate ex = mean_estimate(abs_x);
  const Estimate ey = mean_estimate(abs_y);
  TreeMetrics m;
  m.p_star = {0.5 * ex.value + 0.5, 0.5 * ex.std_error};
  m.q_star = {0.5 * ey.value + 0.5, 0.5 * ey.std_error};
  m.gap = mean_estimate(gap);
  m.replicas = replicas;
  return m;
}

BoundaryGapResult boundary_gap(const ModelParams& p, unsigned t, std::size_t replicas, std::uint64_t seed,
                               const TreeSimOptions& opts) {
  if (replicas == 0) throw Error(Errc::InvalidParameter, "replicas must be at least 1");
  if (t == 0) throw Error(Errc::InvalidParameter, "boundary gap needs t >= 1");
  const Derived dc = derived_constants(p);

  // diffs[r * t + (k-1)] = |Lambda^k(+) - Lambda^k(-)| for replica r
  std::vector<double> diffs(replicas * t);
  parallel_for(replicas, opts.workers, [&](std::size_t r) {
    const GwTree tree = sample_gw_tree(p, t, derive_seed(seed, stream_id(StreamPurpose::Tree, r)), opts.max_nodes);
    std::vector<Label> plus;
    std::vector<Label> minus;
    for (unsigned k = 1; k <= t; ++k) {
      const auto [b, e] = tree.level_range(k);
      plus.assign(e - b, Label{1});
      minus.assign(e - b, Label{-1});
      const auto up = recurse_llr(tree, dc, {.mode = BoundaryMode::ExactBoundary, .horizon = k, .boundary_override = plus});
      const auto down =
          recurse_llr(tree, dc, {.mode = BoundaryMode::ExactBoundary, .horizon = k, .boundary_override = minus});
      // Equal infinities (alpha = 0) carry no boundary dependence.
      diffs[r * t + (k - 1)] = up[0] == down[0] ? 0.0 : std::abs(up[0] - down[0]);
    }
  });

  BoundaryGapResult res;
  res.replicas = replicas;
  std::vector<double> column(replicas);
  std::vector<double> means(t);
  for (unsigned k = 0; k < t; ++k) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = diffs[r * t + k];
    res.gap.push_back(mean_estimate(column));
    means[k] = res.gap.back().value;
  }
  const double n = static_cast<double>(replicas);
  for (unsigned k = 0; k + 1 < t; ++k) {
    const double m1 = means[k];
    const double m2 = means[k + 1];
    if (m1 == 0.0) {
      res.ratio.push_back({0.0, 0.0});
      continue;
    }
    double v11 = 0.0;
    double v22 = 0.0;
    double v12 = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
      const double d1 = diffs[r * t + k] - m1;
      const double d2 = diffs[r * t + k + 1] - m2;
      v11 += d1 * d1;
      v22 += d2 * d2;
      v12 += d1 * d2;
    }
    const double denom = replicas > 1 ? n - 1.0 : 1.0;
    v11 /= denom;
    v22 /= denom;
    v12 /= denom;
    const double ratio = m2 / m1;
    const double var = (v22 - 2.0 * ratio * v12 + ratio * ratio * v11) / (m1 * m1 * n);
    res.ratio.push_back({ratio, std::sqrt(std::max(0.0, var))});
  }
  return res;
}

}  // namespace sbmsi
