#include "sbmsi/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "sbmsi/error.hpp"
#include "sbmsi/seed.hpp"

namespace sbmsi {

ModelParams validate_params(std::int64_t n, double a, double b, double alpha) {
  if (n < 0) throw Error(Errc::InvalidParameter, "n must be nonnegative, got " + std::to_string(n));
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw Error(Errc::AlphaOutOfRange, "alpha must lie in [0, 1/2), got " + std::to_string(alpha));
  }
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(Errc::NonPositiveRate, "a and b must be positive and finite");
  }
  if (n > 0 && (a > static_cast<double>(n) || b > static_cast<double>(n))) {
    throw Error(Errc::RateExceedsN, "a and b must not exceed n");
  }
  return ModelParams{n, a, b, alpha};
}

double side_info_strength(double alpha) {
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::log((1.0 - alpha) / alpha);
}

Derived derived_constants(const ModelParams& p) {
  Derived dc;
  dc.beta = 0.5 * std::log(p.a / p.b);
  dc.gamma = side_info_strength(p.alpha);
  dc.theta = std::tanh(dc.beta);
  dc.eta = 0.5 * (1.0 - dc.theta);
  dc.d = 0.5 * (p.a + p.b);
  dc.mu_hat = (p.a - p.b) / std::sqrt(p.b);
  return dc;
}

// ---------------------------------------------------------------------------
// LabeledGraph

LabeledGraph::LabeledGraph(std::size_t n, std::vector<Edge> edges, std::vector<Label> sigma,
                           std::vector<Label> sigma_tilde)
    : edges_(std::move(edges)), sigma_(std::move(sigma)), sigma_tilde_(std::move(sigma_tilde)) {
  if (sigma_.size() != n || sigma_tilde_.size() != n) {
    throw Error(Errc::LengthMismatch, "label vectors must have length n = " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if ((sigma_[i] != 1 && sigma_[i] != -1) || (sigma_tilde_[i] != 1 && sigma_tilde_[i] != -1)) {
      throw Error(Errc::MalformedGraph, "labels must be +1 or -1 (vertex " + std::to_string(i) + ")");
    }
  }
  for (auto& e : edges_) {
    if (e.u >= n || e.v >= n) throw Error(Errc::MalformedGraph, "edge endpoint out of range");
    if (e.u == e.v) throw Error(Errc::MalformedGraph, "self-loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error(Errc::MalformedGraph, "duplicate edge");
  }

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];

  neighbors_.resize(2 * edges_.size());
  reverse_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Sorted edge order fills every row in ascending neighbor order.
  for (const auto& e : edges_) {
    const std::size_t su = cursor[e.u]++;
    const std::size_t sv = cursor[e.v]++;
    neighbors_[su] = e.v;
    neighbors_[sv] = e.u;
    reverse_[su] = sv;
    reverse_[sv] = su;
  }
}

LabeledGraph LabeledGraph::with_sigma_tilde(std::vector<Label> sigma_tilde) const {
  if (sigma_tilde.size() != n()) throw Error(Errc::LengthMismatch, "sigma_tilde length differs from n");
  LabeledGraph g = *this;
  g.sigma_tilde_ = std::move(sigma_tilde);
  for (Label l : g.sigma_tilde_) {
    if (l != 1 && l != -1) throw Error(Errc::MalformedGraph, "labels must be +1 or -1");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

// Number of failures before the next success of a Bernoulli(p) sequence.
std::uint64_t geometric_skip(double p, Rng& rng) {
  if (p >= 1.0) return 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = unif(rng);
  const double skip = std::floor(std::log1p(-r) / std::log1p(-p));
  if (!(skip < 9.0e18)) return std::numeric_limits<std::uint64_t>::max() / 2;
  return static_cast<std::uint64_t>(skip);
}

// Per-pair Bernoulli over unordered pairs of `block` (Batagelj-Brandes skipping).
void pairwise_within(std::span<const Vertex> block, double p, Rng& rng, std::vector<Edge>& out) {
  const std::uint64_t m = block.size();
  if (m < 2) return;
  std::uint64_t v = 1;
  std::uint64_t w = 0;
  bool first = true;
  while (v < m) {
    const std::uint64_t step = geometric_skip(p, rng);
    w = first ? step : w + 1 + step;
    first = false;
    while (w >= v && v < m) {
      w -= v;
      ++v;
    }
    if (v < m) out.push_back({block[w], block[v]});
  }
}

// Per-pair Bernoulli over the product of two blocks.
void pairwise_across(std::span<const Vertex> left, std::span<const Vertex> right, double p, Rng& rng,
                     std::vector<Edge>& out) {
  const std::uint64_t total = static_cast<std::uint64_t>(left.size()) * right.size();
  if (total == 0) return;
  std::uint64_t k = 0;
  bool first = true;
  while (true) {
    const std::uint64_t step = geometric_skip(p, rng);
    if (first) {
      k = step;
      first = false;
    } else {
      if (step >= total) break;
      k += 1 + step;
    }
    if (k >= total) break;
    out.push_back({left[k / right.size()], right[k % right.size()]});
  }
}

// Binomial count, then uniform placement without replacement.
void placed_within(std::span<const Vertex> block, double p, Rng& rng, std::vector<Edge>& out) {
  const std::uint64_t m = block.size();
  if (m < 2) return;
  const std::int64_t pairs = static_cast<std::int64_t>(m * (m - 1) / 2);
  const std::int64_t count = std::binomial_distribution<std::int64_t>(pairs, p)(rng);
  if (count > pairs / 4) {
    // Dense block: rejection would stall. Per-pair sampling has the same law.
    pairwise_within(block, p, rng, out);
    return;
  }
  std::uniform_int_distribution<std::uint64_t> pick(0, m - 1);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(count) * 2);
  while (static_cast<std::int64_t>(seen.size()) < count) {
    std::uint64_t i = pick(rng);
    std::uint64_t j = pick(rng);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (seen.insert(i * m + j).second) out.push_back({block[i], block[j]});
  }
}

void placed_across(std::span<const Vertex> left, std::span<const Vertex> right, double p, Rng& rng,
                   std::vector<Edge>& out) {
  const std::uint64_t ml = left.size();
  const std::uint64_t mr = right.size();
  if (ml == 0 || mr == 0) return;
  const std::int64_t pairs = static_cast<std::int64_t>(ml * mr);
  const std::int64_t count = std::binomial_distribution<std::int64_t>(pairs, p)(rng);
  if (count > pairs / 4) {
    pairwise_across(left, right, p, rng, out);
    return;
  }
  std::uniform_int_distribution<std::uint64_t> pick_l(0, ml - 1);
  std::uniform_int_distribution<std::uint64_t> pick_r(0, mr - 1);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(count) * 2);
  while (static_cast<std::int64_t>(seen.size()) < count) {
    const std::uint64_t i = pick_l(rng);
    const std::uint64_t j = pick_r(rng);
    if (seen.insert(i * mr + j).second) out.push_back({left[i], right[j]});
  }
}

}  // namespace

LabeledGraph sample_sbm(const ModelParams& p, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(p.n);
  std::vector<Label> sigma(n);
  std::vector<Label> sigma_tilde(n);
  {
    Rng rng = make_rng(seed, stream_id(StreamPurpose::Labels, 0));
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution flip(p.alpha);
    for (std::size_t i = 0; i < n; ++i) {
      sigma[i] = coin(rng) ? Label{1} : Label{-1};
      sigma_tilde[i] = flip(rng) ? static_cast<Label>(-sigma[i]) : sigma[i];
    }
  }

  std::vector<Vertex> plus;
  std::vector<Vertex> minus;
  for (std::size_t i = 0; i < n; ++i) (sigma[i] > 0 ? plus : minus).push_back(static_cast<Vertex>(i));

  std::vector<Edge> edges;
  if (n >= 2) {
    const double p_in = p.a / static_cast<double>(n);
    const double p_out = p.b / static_cast<double>(n);
    edges.reserve(static_cast<std::size_t>(0.3 * static_cast<double>(n) * (p.a + p.b)) + 16);
    Rng rng = make_rng(seed, stream_id(StreamPurpose::Edges, 0));
    if (p.n <= kPairwiseSamplingLimit) {
      pairwise_within(plus, p_in, rng, edges);
      pairwise_within(minus, p_in, rng, edges);
      pairwise_across(plus, minus, p_out, rng, edges);
    } else {
      placed_within(plus, p_in, rng, edges);
      placed_within(minus, p_in, rng, edges);
      placed_across(plus, minus, p_out, rng, edges);
    }
  }
  return LabeledGraph(n, std::move(edges), std::move(sigma), std::move(sigma_tilde));
}

Neighborhood extract_neighborhood(const LabeledGraph& g, Vertex u, unsigned t) {
  if (u >= g.n()) {
    throw Error(Errc::VertexOutOfRange, "vertex " + std::to_string(u) + " not in [0, " +
                                            std::to_string(g.n()) + ")");
  }
  Neighborhood nb;
  std::unordered_map<Vertex, Vertex> local;
  std::deque<Vertex> queue;
  local.emplace(u, 0);
  nb.original.push_back(u);
  nb.distance.push_back(0);
  queue.push_back(u);
  while (!queue.empty()) {
    const Vertex x = queue.front();
    queue.pop_front();
    const std::uint32_t dx = nb.distance[local[x]];
    if (dx == t) continue;
    for (Vertex y : g.neighbors(x)) {
      if (local.contains(y)) continue;
      local.emplace(y, static_cast<Vertex>(nb.original.size()));
      nb.original.push_back(y);
      nb.distance.push_back(dx + 1);
      queue.push_back(y);
    }
  }

  std::vector<Edge> edges;
  std::vector<Label> sigma;
  std::vector<Label> sigma_tilde;
  for (Vertex i = 0; i < nb.original.size(); ++i) {
    const Vertex x = nb.original[i];
    sigma.push_back(g.sigma()[x]);
    sigma_tilde.push_back(g.sigma_tilde()[x]);
    for (Vertex y : g.neighbors(x)) {
      auto it = local.find(y);
      if (it != local.end() && i < it->second) edges.push_back({i, it->second});
    }
  }
  // The ball is connected, so it is acyclic iff |E| = |V| - 1.
  nb.is_tree = edges.size() + 1 == nb.original.size();
  nb.subgraph = LabeledGraph(nb.original.size(), std::move(edges), std::move(sigma), std::move(sigma_tilde));
  return nb;
}

}  // namespace sbmsi
