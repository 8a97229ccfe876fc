#include "sbmsi/bp.hpp"

#include <chrono>
#include <string>

#include "sbmsi/error.hpp"
#include "sbmsi/llr.hpp"
#include "sbmsi/parallel.hpp"

namespace sbmsi {

namespace {

constexpr std::size_t kVertexBlock = 4096;

template <class Fn>
void for_vertex_blocks(std::size_t n, unsigned workers, Fn&& fn) {
  const std::size_t blocks = (n + kVertexBlock - 1) / kVertexBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t begin = b * kVertexBlock;
    const std::size_t end = std::min(n, begin + kVertexBlock);
    for (std::size_t v = begin; v < end; ++v) fn(v);
  });
}

}  // namespace

BpState::BpState(const LabeledGraph& graph, const Derived& dc) : graph_(&graph), dc_(dc) {
  const std::size_t n = graph.n();
  field_.resize(n);
  for (std::size_t i = 0; i < n; ++i) field_[i] = graph.sigma_tilde()[i] > 0 ? dc.gamma : -dc.gamma;
  current_.resize(graph.directed_edge_count());
  next_.resize(graph.directed_edge_count());
  transfer_.resize(graph.directed_edge_count());
  const auto offsets = graph.offsets();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) current_[e] = field_[i];
  }
}

void BpState::fill_transfers(unsigned workers) {
  const auto offsets = graph_->offsets();
  for_vertex_blocks(graph_->n(), workers, [&](std::size_t i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) transfer_[e] = llr_transfer(current_[e], dc_.beta);
  });
}

void BpState::iterate(unsigned workers) {
  fill_transfers(workers);
  const auto offsets = graph_->offsets();
  const auto reverse = graph_->reverse_slots();
  for_vertex_blocks(graph_->n(), workers, [&](std::size_t i) {
    double incoming = 0.0;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) incoming += transfer_[reverse[e]];
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      next_[e] = field_[i] + (incoming - transfer_[reverse[e]]);
    }
  });
  current_.swap(next_);
  ++iteration_;
}

std::vector<double> BpState::beliefs(unsigned workers) const {
  const auto offsets = graph_->offsets();
  const auto reverse = graph_->reverse_slots();
  std::vector<double> out(graph_->n());
  for_vertex_blocks(graph_->n(), workers, [&](std::size_t i) {
    double incoming = 0.0;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      incoming += llr_transfer(current_[reverse[e]], dc_.beta);
    }
    out[i] = field_[i] + incoming;
  });
  return out;
}

BeliefLabels finalize_beliefs(const BpState& s, unsigned workers) {
  BeliefLabels out;
  out.beliefs = s.beliefs(workers);
  out.labels.resize(out.beliefs.size());
  for (std::size_t i = 0; i < out.beliefs.size(); ++i) out.labels[i] = out.beliefs[i] >= 0.0 ? Label{1} : Label{-1};
  return out;
}

BpRun run_bp(const LabeledGraph& g, const Derived& dc, unsigned t, unsigned workers) {
  if (t == 0) throw Error(Errc::InvalidParameter, "BP needs t >= 1");
  BpState state(g, dc);
  BpRun run;
  for (unsigned k = 1; k < t; ++k) {
    const auto start = std::chrono::steady_clock::now();
    state.iterate(workers);
    const auto stop = std::chrono::steady_clock::now();
    run.iteration_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  auto fin = finalize_beliefs(state, workers);
  run.labels = std::move(fin.labels);
  run.beliefs = std::move(fin.beliefs);
  return run;
}

double empirical_accuracy(std::span<const Label> labels, std::span<const Label> sigma) {
  if (labels.size() != sigma.size()) {
    throw Error(Errc::LengthMismatch, "labels have length " + std::to_string(labels.size()) + ", sigma has " +
                                          std::to_string(sigma.size()));
  }
  if (labels.empty()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) agree += labels[i] == sigma[i] ? 1 : 0;
  return static_cast<double>(agree) / static_cast<double>(labels.size());
}

}  // namespace sbmsi
