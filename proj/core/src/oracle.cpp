#include "sbmsi/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sbmsi/error.hpp"

namespace sbmsi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp.
class LogSum {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

PosteriorResult finish(const LogSum& plus, const LogSum& minus, std::uint64_t states) {
  PosteriorResult r;
  r.enumerated_states = states;
  const double lp = plus.value();
  const double lm = minus.value();
  LogSum total;
  total.add(lp);
  total.add(lm);
  r.log_partition = total.value();
  if (r.log_partition == kNegInf) throw Error(Errc::Internal, "evidence has zero probability");
  r.p_plus = lp == kNegInf ? 0.0 : std::exp(lp - r.log_partition);
  return r;
}

}  // namespace

PosteriorResult exact_graph_posterior(const LabeledGraph& g, const ModelParams& p, Vertex u) {
  const std::size_t n = g.n();
  if (n > kOracleMaxVertices) {
    throw Error(Errc::TooLarge, "graph oracle supports at most 16 vertices, got " + std::to_string(n));
  }
  if (u >= n) throw Error(Errc::VertexOutOfRange, "vertex " + std::to_string(u) + " out of range");

  const double nn = static_cast<double>(n);
  const double p_in = p.a / nn;
  const double p_out = p.b / nn;
  const double log_edge[2] = {safe_log(p_out), safe_log(p_in)};        // [same]
  const double log_gap[2] = {safe_log(1.0 - p_out), safe_log(1.0 - p_in)};
  const double log_keep = safe_log(1.0 - p.alpha);
  const double log_flip = safe_log(p.alpha);

  std::vector<std::uint8_t> adjacent(n * n, 0);
  for (const Edge& e : g.edges()) {
    adjacent[e.u * n + e.v] = 1;
    adjacent[e.v * n + e.u] = 1;
  }
  const auto noisy = g.sigma_tilde();

  LogSum plus;
  LogSum minus;
  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < states; ++mask) {
    // Bit i set means label + for vertex i.
    double lw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pos = (mask >> i) & 1U;
      lw += (pos == (noisy[i] > 0)) ? log_keep : log_flip;
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool same = pos == static_cast<bool>((mask >> j) & 1U);
        lw += adjacent[i * n + j] ? log_edge[same] : log_gap[same];
      }
    }
    if ((mask >> u) & 1U) {
      plus.add(lw);
    } else {
      minus.add(lw);
    }
  }
  return finish(plus, minus, states);
}

PosteriorResult exact_tree_posterior(const GwTree& tree, const ModelParams& p, BoundaryMode mode) {
  const std::size_t n = tree.size();
  if (n > kOracleMaxVertices) {
    throw Error(Errc::TooLarge, "tree oracle supports at most 16 nodes, got " + std::to_string(n));
  }
  const double log_same = std::log(p.a);
  const double log_diff = std::log(p.b);
  const double log_keep = safe_log(1.0 - p.alpha);
  const double log_flip = safe_log(p.alpha);

  std::vector<std::size_t> free_nodes;
  std::vector<int> pinned(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& nd = tree.node(i);
    if (mode == BoundaryMode::ExactBoundary && nd.depth == tree.depth_limit()) {
      pinned[i] = nd.tau;
    } else {
      free_nodes.push_back(i);
    }
  }

  LogSum plus;
  LogSum minus;
  std::vector<int> label(n, 0);
  const std::uint64_t states = std::uint64_t{1} << free_nodes.size();
  for (std::uint64_t mask = 0; mask < states; ++mask) {
    for (std::size_t i = 0; i < n; ++i) label[i] = pinned[i];
    for (std::size_t k = 0; k < free_nodes.size(); ++k) label[free_nodes[k]] = ((mask >> k) & 1U) ? 1 : -1;
    double lw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const TreeNode& nd = tree.node(i);
      lw += label[i] == nd.tau_tilde ? log_keep : log_flip;
      if (nd.parent >= 0) lw += label[i] == label[static_cast<std::size_t>(nd.parent)] ? log_same : log_diff;
    }
    if (label[0] > 0) {
      plus.add(lw);
    } else {
      minus.add(lw);
    }
  }
  return finish(plus, minus, states);
}

}  // namespace sbmsi
