#pragma once

#include <span>
#include <vector>

#include "sbmsi/model.hpp"

namespace sbmsi {

/// Message table for local belief propagation with noisy-label fields.
///
/// Messages live on directed edges in the graph's compressed adjacency order:
/// slot e of row i holds R_{i -> neighbors[e]}. Updates are synchronous: the
/// next buffer is computed from the current one only, then the two swap.
class BpState {
 public:
  /// Every message from i starts at h_i = gamma * sigma_tilde_i.
  /// The graph must outlive the state.
  BpState(const LabeledGraph& graph, const Derived& dc);

  /// One synchronous round:
  ///   R_{i->j} <- h_i + sum_{l in N(i), l != j} F(R_{l->i})
  /// computed as h_i + S_i - F(R_{j->i}) with S_i summed once per vertex.
  /// Directed edges are split across `workers`; the result does not depend
  /// on the split.
  void iterate(unsigned workers = 1);

  /// R_i = h_i + sum_{l in N(i)} F(R_{l->i}) over the current messages.
  std::vector<double> beliefs(unsigned workers = 1) const;

  unsigned iteration() const noexcept { return iteration_; }
  std::span<const double> messages() const noexcept { return current_; }
  std::span<const double> fields() const noexcept { return field_; }
  const LabeledGraph& graph() const noexcept { return *graph_; }
  const Derived& constants() const noexcept { return dc_; }

 private:
  void fill_transfers(unsigned workers);

  const LabeledGraph* graph_;
  Derived dc_;
  std::vector<double> field_;
  std::vector<double> current_;
  std::vector<double> next_;
  std::vector<double> transfer_;  // F(current_[e]) per slot
  unsigned iteration_ = 0;
};

inline BpState init_state(const LabeledGraph& g, const Derived& dc) { return BpState(g, dc); }

inline void bp_iterate(BpState& s, unsigned workers = 1) { s.iterate(workers); }

struct BeliefLabels {
  std::vector<double> beliefs;
  std::vector<Label> labels;  ///< +1 iff belief >= 0
};

BeliefLabels finalize_beliefs(const BpState& s, unsigned workers = 1);

struct BpRun {
  std::vector<Label> labels;
  std::vector<double> beliefs;
  std::vector<double> iteration_ms;  ///< wall time of each message-passing round
};

/// init, t-1 rounds of message passing, then combine. Requires t >= 1.
BpRun run_bp(const LabeledGraph& g, const Derived& dc, unsigned t, unsigned workers = 1);

/// Fraction of positions where the labels agree. Throws LengthMismatch.
double empirical_accuracy(std::span<const Label> labels, std::span<const Label> sigma);

}  // namespace sbmsi
