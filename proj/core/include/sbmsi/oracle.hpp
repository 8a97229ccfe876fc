#pragma once

#include <cstddef>
#include <cstdint>

#include "sbmsi/model.hpp"
#include "sbmsi/treesim.hpp"

namespace sbmsi {

/// Posterior of one label by brute-force enumeration.
struct PosteriorResult {
  double p_plus = 0.0;          ///< P(label = + | evidence)
  double log_partition = 0.0;   ///< log of the sum of unnormalized weights
  std::uint64_t enumerated_states = 0;
};

inline constexpr std::size_t kOracleMaxVertices = 16;

/// P(sigma_u = + | G, sigma_tilde) under the block model with edge
/// probabilities a/n, b/n where n = g.n(). Every vertex pair contributes,
/// absent pairs through 1 - a/n or 1 - b/n. Throws TooLarge (n > 16),
/// VertexOutOfRange.
PosteriorResult exact_graph_posterior(const LabeledGraph& g, const ModelParams& p, Vertex u);

/// P(tau_root = + | T, evidence) for the Ising form
///   exp(beta sum_{edges} tau_i tau_j + sum_i h_i tau_i),  h_i = gamma tau_tilde_i.
/// ExactBoundary pins the nodes at the depth limit to their true labels.
/// Throws TooLarge (more than 16 nodes).
PosteriorResult exact_tree_posterior(const GwTree& tree, const ModelParams& p, BoundaryMode mode);

}  // namespace sbmsi
