#pragma once

// Parameter-shift gradients of the fidelity scores and of the mean squared
// error over a batch.
//
// Every trainable angle feeds exactly one Pauli rotation exp(-i a P / 2), so
//   d score / d a = [score(a + pi/2) - score(a - pi/2)] / 2
// holds exactly. An entity that occurs in several roles of one example (head
// and a tail, or two tails) is shifted one occurrence at a time and the
// contributions are summed.

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "qkge/errors.hpp"
#include "qkge/model.hpp"
#include "qkge/parallel.hpp"

namespace qkge {

enum class Table : std::uint8_t { entity, relation };

struct TensorKey {
  Table table = Table::entity;
  std::uint32_t id = 0;

  friend auto operator<=>(const TensorKey&, const TensorKey&) = default;
};

/// Sparse gradient: one dense block per parameter tensor the batch touched.
/// Blocks are ordered by (table, id), which fixes the flattened coordinate
/// order (table, id, layer, qubit, angle).
class GradientVector {
 public:
  void accumulate(TensorKey key, std::span<const double> values, double scale = 1.0) {
    auto& block = blocks_[key];
    if (block.empty()) block.assign(values.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) block[i] += scale * values[i];
  }

  void accumulate(const GradientVector& other, double scale = 1.0) {
    for (const auto& [key, values] : other.blocks_) accumulate(key, values, scale);
  }

  const std::map<TensorKey, std::vector<double>>& blocks() const noexcept { return blocks_; }
  bool contains(TensorKey key) const { return blocks_.count(key) != 0; }
  std::span<const double> block(TensorKey key) const {
    auto it = blocks_.find(key);
    return it == blocks_.end() ? std::span<const double>{} : std::span<const double>(it->second);
  }

  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (const auto& [key, values] : blocks_) n += values.size();
    return n;
  }

  std::vector<double> flatten() const {
    std::vector<double> out;
    for (const auto& [key, values] : blocks_) out.insert(out.end(), values.begin(), values.end());
    return out;
  }

  bool all_finite() const noexcept {
    for (const auto& [key, values] : blocks_)
      for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::map<TensorKey, std::vector<double>> blocks_;
};

struct ScoredGradient {
  double score = 0.0;
  GradientVector gradient;
};

inline constexpr double kShift = std::numbers::pi / 2.0;

/// Score of one example and its gradient with respect to every angle of the
/// head, relation and tail circuits.
inline ScoredGradient score_gradient(const EmbeddingStore& store, const LabeledExample& ex) {
  if (ex.tails.empty()) throw UsageError("example has no tails");
  const ParameterTensor& head_params = store.entity(ex.head);
  const ParameterTensor& rel_params = store.relation(ex.relation);
  const double inv_k = 1.0 / static_cast<double>(ex.tails.size());

  const StateVector head = embed_entity(head_params);
  const StateVector evolved = apply_ansatz(head, rel_params);
  std::vector<StateVector> tails;
  tails.reserve(ex.tails.size());
  for (EntityId t : ex.tails) tails.push_back(embed_entity(store.entity(t)));

  const auto mean_overlap = [&](const StateVector& ev) {
    double acc = 0.0;
    for (const auto& t : tails) acc += fidelity(t, ev);
    return acc * inv_k;
  };

  ScoredGradient out;
  out.score = mean_overlap(evolved);

  // Head occurrence.
  {
    ParameterTensor shifted = head_params;
    std::vector<double> g(shifted.size());
    for (std::size_t j = 0; j < shifted.size(); ++j) {
      const double a = shifted[j];
      shifted[j] = a + kShift;
      const double plus = mean_overlap(apply_ansatz(embed_entity(shifted), rel_params));
      shifted[j] = a - kShift;
      const double minus = mean_overlap(apply_ansatz(embed_entity(shifted), rel_params));
      shifted[j] = a;
      g[j] = 0.5 * (plus - minus);
    }
    out.gradient.accumulate({Table::entity, ex.head}, g);
  }

  // Relation.
  {
    ParameterTensor shifted = rel_params;
    std::vector<double> g(shifted.size());
    for (std::size_t j = 0; j < shifted.size(); ++j) {
      const double a = shifted[j];
      shifted[j] = a + kShift;
      const double plus = mean_overlap(apply_ansatz(head, shifted));
      shifted[j] = a - kShift;
      const double minus = mean_overlap(apply_ansatz(head, shifted));
      shifted[j] = a;
      g[j] = 0.5 * (plus - minus);
    }
    out.gradient.accumulate({Table::relation, ex.relation}, g);
  }

  // Tail occurrences: only the shifted tail's overlap changes.
  for (std::size_t i = 0; i < ex.tails.size(); ++i) {
    ParameterTensor shifted = store.entity(ex.tails[i]);
    std::vector<double> g(shifted.size());
    for (std::size_t j = 0; j < shifted.size(); ++j) {
      const double a = shifted[j];
      shifted[j] = a + kShift;
      const double plus = fidelity(embed_entity(shifted), evolved);
      shifted[j] = a - kShift;
      const double minus = fidelity(embed_entity(shifted), evolved);
      shifted[j] = a;
      g[j] = 0.5 * (plus - minus) * inv_k;
    }
    out.gradient.accumulate({Table::entity, ex.tails[i]}, g);
  }
  return out;
}

struct LossGradient {
  double loss = 0.0;
  std::vector<double> scores;
  GradientVector gradient;
};

/// Mean squared error over the batch and its gradient,
/// (2/D) sum (score - label) * d score.
inline LossGradient loss_gradient(const EmbeddingStore& store, std::span<const LabeledExample> batch,
                                  int threads = 1) {
  if (batch.empty()) throw UsageError("loss gradient of an empty batch");
  std::vector<ScoredGradient> per_example(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t i) { per_example[i] = score_gradient(store, batch[i]); });

  const double d = static_cast<double>(batch.size());
  LossGradient out;
  out.scores.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double residual = per_example[i].score - batch[i].label;
    out.loss += residual * residual;
    out.scores.push_back(per_example[i].score);
    out.gradient.accumulate(per_example[i].gradient, 2.0 * residual / d);
  }
  out.loss /= d;
  return out;
}

}  // namespace qkge
