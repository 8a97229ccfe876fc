#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sbmsi/model.hpp"
#include "sbmsi/stats.hpp"

namespace sbmsi {

/// What the tree estimator observes at the bottom level of the tree.
enum class BoundaryMode {
  ExactBoundary,  ///< true labels at the boundary are revealed (Lambda / X)
  NoisyOnly,      ///< only noisy labels everywhere (Gamma / Y)
};

struct TreeNode {
  std::int32_t parent = -1;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
  std::uint32_t depth = 0;
  Label tau = 1;
  Label tau_tilde = 1;
};

/// Depth-bounded two-type Galton-Watson tree stored flat in BFS order: node 0
/// is the root, children of a node are contiguous, and nodes of one depth form
/// a contiguous index range.
class GwTree {
 public:
  GwTree() = default;
  /// Validates the BFS layout; throws MalformedGraph.
  GwTree(std::vector<TreeNode> nodes, unsigned depth_limit);

  /// Builds a tree from a parent list given in BFS order (parent[0] == -1,
  /// parents nondecreasing). Depths and child ranges are filled in.
  static GwTree from_parents(unsigned depth_limit, std::span<const std::int32_t> parent,
                             std::span<const Label> tau, std::span<const Label> tau_tilde);

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::size_t i) const noexcept { return nodes_[i]; }
  std::size_t size() const noexcept { return nodes_.size(); }
  unsigned depth_limit() const noexcept { return depth_limit_; }

  /// Half-open index range of the nodes at `depth`.
  std::pair<std::size_t, std::size_t> level_range(unsigned depth) const noexcept;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> level_begin_;
  unsigned depth_limit_ = 0;
};

inline constexpr std::size_t kDefaultMaxTreeNodes = 20'000'000;

/// 1 + d + ... + d^t.
double expected_tree_nodes(double d, unsigned t);

/// Root label uniform; every node above depth t gets Pois(a/2) same-label and
/// Pois(b/2) opposite-label children; each noisy label flips with prob alpha.
/// Throws DepthTooLarge when the expected size exceeds `max_nodes`, or when a
/// realization grows past four times that budget.
GwTree sample_gw_tree(const ModelParams& p, unsigned t, std::uint64_t seed,
                      std::size_t max_nodes = kDefaultMaxTreeNodes);

struct RecursionOptions {
  BoundaryMode mode = BoundaryMode::NoisyOnly;
  /// Depth treated as the boundary; defaults to the tree's depth limit.
  std::optional<unsigned> horizon;
  /// ExactBoundary only: replacement labels for the nodes at the horizon, in
  /// BFS order. Empty means the sampled true labels.
  std::span<const Label> boundary_override;
};

/// Half log-likelihood ratio of every node given the evidence in its subtree:
/// boundary nodes start at +-inf (ExactBoundary) or gamma*tau_tilde
/// (NoisyOnly); an interior node is h_i + sum over children of F(child).
/// Nodes below the horizon are NaN.
std::vector<double> recurse_llr(const GwTree& tree, const Derived& dc, const RecursionOptions& opts = {});

/// Magnetization of every node, computed from the product form
///   (e^h prod(1 + theta x) - e^-h prod(1 - theta x)) /
///   (e^h prod(1 + theta x) + e^-h prod(1 - theta x))
/// with the products accumulated as log1p sums. Independent of recurse_llr.
std::vector<double> recurse_magnetization(const GwTree& tree, const Derived& dc,
                                          const RecursionOptions& opts = {});

/// Tree as an undirected graph: vertex i is node i, labels carried over.
LabeledGraph tree_as_graph(const GwTree& tree);

// ---------------------------------------------------------------------------
// Monte Carlo over random trees

enum class TreeEngine {
  Auto,      ///< Explicit when the expected tree is small, Pooled otherwise
  Explicit,  ///< materialize every tree and run both recursions
  Pooled,    ///< closed-form last level plus an independent pool of subtrees
};

struct TreeSimOptions {
  unsigned workers = 1;
  TreeEngine engine = TreeEngine::Auto;
  std::size_t max_nodes = kDefaultMaxTreeNodes;
  /// Pooled engine: number of depth t-1 subtree samples; 0 picks
  /// max(replicas, 100 * ceil(d)).
  std::size_t pool_size = 0;
};

/// Explicit engine is used under Auto while the expected tree has at most
/// this many nodes.
inline constexpr double kAutoExplicitNodes = 50'000.0;

/// Root of one sampled tree: its labels and both log-likelihood ratios.
struct RootSample {
  Label tau = 1;
  Label tau_tilde = 1;
  double lambda = 0.0;  ///< ExactBoundary
  double gamma = 0.0;   ///< NoisyOnly
};

/// One RootSample per replica, replica r seeded from derive_seed(seed, r).
///
/// The pooled engine samples the level above the boundary in closed form by
/// Poisson splitting and builds depth t-1 subtrees recursively from fresh
/// randomness. For t >= 3 each root draws its children without replacement
/// from a pool of independent depth t-1 subtrees, so every root is exactly
/// distributed but different roots may share subtrees; the reported standard
/// errors ignore that dependence.
std::vector<RootSample> sample_root_statistics(const ModelParams& p, unsigned t, std::size_t replicas,
                                               std::uint64_t seed, const TreeSimOptions& opts = {});

struct TreeMetrics {
  Estimate p_star;  ///< 0.5 E|X_root| + 0.5
  Estimate q_star;  ///< 0.5 E|Y_root| + 0.5
  Estimate gap;     ///< E|X_root - Y_root|
  std::size_t replicas = 0;
};

TreeMetrics estimate_tree_metrics(const ModelParams& p, unsigned t, std::size_t replicas, std::uint64_t seed,
                                  const TreeSimOptions& opts = {});

struct BoundaryGapResult {
  std::vector<Estimate> gap;    ///< gap[k-1] estimates e(k) = E|Lambda^k(+) - Lambda^k(-)|
  std::vector<Estimate> ratio;  ///< ratio[k-1] estimates e(k+1)/e(k) (delta-method SE)
  std::size_t replicas = 0;
};

/// Explicit engine only. For each replica one tree of depth t is sampled and
/// truncated at every horizon k = 1..t.
BoundaryGapResult boundary_gap(const ModelParams& p, unsigned t, std::size_t replicas, std::uint64_t seed,
                               const TreeSimOptions& opts = {});

}  // namespace sbmsi
