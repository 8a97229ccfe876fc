#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sbmsi {

using Vertex = std::uint32_t;
/// Community label, stored as +1 / -1.
using Label = std::int8_t;

/// Generative parameters of the two-community block model with noisy labels.
struct ModelParams {
  std::int64_t n = 0;  ///< vertex count
  double a = 0.0;      ///< in-class edge probability is a/n
  double b = 0.0;      ///< cross-class edge probability is b/n
  double alpha = 0.0;  ///< label-noise probability, in [0, 1/2)
};

/// Validates raw parameters. Never clamps: throws sbmsi::Error with
/// AlphaOutOfRange, NonPositiveRate, RateExceedsN or InvalidParameter.
ModelParams validate_params(std::int64_t n, double a, double b, double alpha);

/// Constants derived from ModelParams.
struct Derived {
  double beta = 0.0;   ///< 0.5 ln(a/b)
  double gamma = 0.0;  ///< 0.5 ln((1-alpha)/alpha); +inf when alpha == 0
  double theta = 0.0;  ///< tanh(beta)
  double eta = 0.0;    ///< (1 - theta) / 2
  double d = 0.0;      ///< mean degree (a+b)/2
  double mu_hat = 0.0; ///< (a-b)/sqrt(b)
};

Derived derived_constants(const ModelParams& p);

/// Half log-odds of the label channel, +inf for alpha == 0.
double side_info_strength(double alpha);

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph with hidden and noisy labels. Immutable after
/// construction. Edges are normalized to u < v and sorted; adjacency is kept in
/// compressed form where slot e in row i stands for the directed edge
/// i -> neighbors()[e], and reverse_slot(e) is the slot of the opposite edge.
class LabeledGraph {
 public:
  LabeledGraph() = default;
  /// Throws MalformedGraph (self-loop, duplicate, endpoint out of range) or
  /// LengthMismatch (label vectors not of length n).
  LabeledGraph(std::size_t n, std::vector<Edge> edges, std::vector<Label> sigma,
               std::vector<Label> sigma_tilde);

  std::size_t n() const noexcept { return sigma_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t directed_edge_count() const noexcept { return neighbors_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Label> sigma() const noexcept { return sigma_; }
  std::span<const Label> sigma_tilde() const noexcept { return sigma_tilde_; }

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const Vertex> neighbors() const noexcept { return neighbors_; }
  std::span<const std::size_t> reverse_slots() const noexcept { return reverse_; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return std::span<const Vertex>(neighbors_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }
  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  /// Same structure and labels, noisy labels replaced.
  LabeledGraph with_sigma_tilde(std::vector<Label> sigma_tilde) const;

  friend bool operator==(const LabeledGraph& x, const LabeledGraph& y) {
    return x.edges_ == y.edges_ && x.sigma_ == y.sigma_ && x.sigma_tilde_ == y.sigma_tilde_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<Label> sigma_;
  std::vector<Label> sigma_tilde_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> neighbors_;
  std::vector<std::size_t> reverse_;
};

/// Graphs with at most this many vertices use per-pair Bernoulli sampling
/// (with geometric skipping); larger graphs draw Binomial block edge counts
/// and place them uniformly without replacement.
inline constexpr std::int64_t kPairwiseSamplingLimit = 10'000;

/// Draws (G, sigma, sigma_tilde). Deterministic in (p, seed).
LabeledGraph sample_sbm(const ModelParams& p, std::uint64_t seed);

/// Radius-t ball around a vertex as an induced subgraph. Vertex 0 of
/// `subgraph` is the root; `original` maps local ids back to the source graph
/// and local ids are assigned in BFS order.
struct Neighborhood {
  LabeledGraph subgraph;
  std::vector<Vertex> original;
  std::vector<std::uint32_t> distance;
  bool is_tree = true;
};

/// Throws VertexOutOfRange.
Neighborhood extract_neighborhood(const LabeledGraph& g, Vertex u, unsigned t);

}  // namespace sbmsi
