#pragma once

// Mini-batch Adam on the mean squared error between fidelity scores and
// labels (1 for observed triples, 0 for corrupted ones).

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkge/data.hpp"
#include "qkge/errors.hpp"
#include "qkge/eval.hpp"
#include "qkge/gradient.hpp"
#include "qkge/model.hpp"
#include "qkge/random.hpp"
#include "qkge/sampling.hpp"

namespace qkge {

struct TrainingConfig {
  double learning_rate = 0.01;
  int epochs = 10;
  int batch_size = 8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  NegativeSpec negatives{};
  std::uint64_t seed = 42;
  int n_qubits = 2;
  int entity_layers = 2;
  int relation_layers = 2;
  bool validate_each_epoch = true;
  int threads = 1;

  AnsatzShape entity_shape() const { return {n_qubits, entity_layers}; }
  AnsatzShape relation_shape() const { return {n_qubits, relation_layers}; }

  void validate(std::size_t n_train) const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (n_train == 0) throw ConfigError("training split is empty");
    if (batch_size < 1 || static_cast<std::size_t>(batch_size) > n_train) {
      throw ConfigError("batch size must lie in [1, " + std::to_string(n_train) + "]");
    }
    if (n_qubits < 1 || n_qubits > kMaxQubits) throw ConfigError("qubit count out of range");
    if (entity_layers < 1 || relation_layers < 1) throw ConfigError("layer counts must be at least 1");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
      throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(adam_epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
    if (threads < 1) throw ConfigError("thread count must be at least 1");
    negatives.validate();
  }
};

inline double mse_loss(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw UsageError("score and label counts differ");
  if (scores.empty()) throw UsageError("loss of an empty batch");
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) acc += (scores[i] - labels[i]) * (scores[i] - labels[i]);
  return acc / static_cast<double>(scores.size());
}

/// First and second moments laid out like the store's tables.
struct AdamState {
  std::vector<std::vector<double>> entity_m, entity_v, relation_m, relation_v;
  std::uint64_t step = 0;

  explicit AdamState(const EmbeddingStore& store) {
    for (const auto& p : store.entities()) {
      entity_m.emplace_back(p.size(), 0.0);
      entity_v.emplace_back(p.size(), 0.0);
    }
    for (const auto& p : store.relations()) {
      relation_m.emplace_back(p.size(), 0.0);
      relation_v.emplace_back(p.size(), 0.0);
    }
  }
};

/// One bias-corrected Adam update on the coordinates present in `grad`.
inline void adam_step(EmbeddingStore& store, const GradientVector& grad, AdamState& state,
                      const TrainingConfig& config) {
  if (!grad.all_finite()) {
    throw NumericalError("non-finite gradient at optimizer step " + std::to_string(state.step + 1));
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(config.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(config.adam_beta2, t);
  for (const auto& [key, g] : grad.blocks()) {
    const bool is_entity = key.table == Table::entity;
    ParameterTensor& p = is_entity ? store.entity(key.id) : store.relation(key.id);
    auto& m = is_entity ? state.entity_m.at(key.id) : state.relation_m.at(key.id);
    auto& v = is_entity ? state.entity_v.at(key.id) : state.relation_v.at(key.id);
    if (g.size() != p.size()) throw UsageError("gradient block does not match parameter tensor");
    for (std::size_t j = 0; j < g.size(); ++j) {
      m[j] = config.adam_beta1 * m[j] + (1.0 - config.adam_beta1) * g[j];
      v[j] = config.adam_beta2 * v[j] + (1.0 - config.adam_beta2) * g[j] * g[j];
      const double m_hat = m[j] / bias1;
      const double v_hat = v[j] / bias2;
      p[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

/// Positives of one batch followed by their negatives: one k-tail example per
/// positive in superposed mode, k single-tail examples in separate mode.
inline std::vector<LabeledExample> build_batch(std::span<const Triple> train, std::span<const std::size_t> order,
                                               std::size_t n_entities, const NegativeSpec& spec, int epoch) {
  std::vector<LabeledExample> batch;
  batch.reserve(order.size() * (spec.mode == NegativeMode::separate ? 1 + spec.k : 2));
  for (std::size_t idx : order) batch.push_back(LabeledExample::positive(train[idx]));
  for (std::size_t idx : order) {
    const Triple& pos = train[idx];
    const std::uint64_t draw = static_cast<std::uint64_t>(epoch) * train.size() + idx;
    auto tails = sample_negative_tails(n_entities, pos, spec, draw);
    if (spec.mode == NegativeMode::superposed) {
      batch.push_back(LabeledExample::negative(pos.head, pos.relation, std::move(tails)));
    } else {
      for (EntityId t : tails) batch.push_back(LabeledExample::negative(pos.head, pos.relation, {t}));
    }
  }
  return batch;
}

struct EpochStats {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  std::optional<double> valid_mrr;
};

struct TrainResult {
  EmbeddingStore store;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Trains from `initial` (see initial_store) for config.epochs epochs.
inline TrainResult train(const KnowledgeGraph& kg, const TrainingConfig& config, EmbeddingStore initial,
                         const EpochCallback& on_epoch = {}) {
  config.validate(kg.train.size());
  if (initial.n_entities() != kg.n_entities() || initial.n_relations() != kg.n_relations()) {
    throw ConfigError("initial store does not match the knowledge graph");
  }
  TrainResult result{std::move(initial), {}};
  EmbeddingStore& store = result.store;
  AdamState adam(store);

  std::vector<std::size_t> order(kg.train.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Engine shuffle_rng(derive_seed(config.seed, 0x5348u, epoch));
    shuffle(std::span<std::size_t>(order), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t scored = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      const auto batch = build_batch(kg.train, std::span(order).subspan(begin, end - begin), kg.n_entities(),
                                     config.negatives, epoch);
      const LossGradient lg = loss_gradient(store, batch, config.threads);
      if (!std::isfinite(lg.loss)) throw NumericalError("non-finite loss in epoch " + std::to_string(epoch + 1));
      adam_step(store, lg.gradient, adam, config);
      if (!store.all_finite()) throw NumericalError("non-finite parameter after optimizer step");
      loss_sum += lg.loss * static_cast<double>(batch.size());
      scored += batch.size();
    }

    EpochStats stats{epoch + 1, loss_sum / static_cast<double>(scored), std::nullopt};
    if (config.validate_each_epoch && !kg.valid.empty()) {
      stats.valid_mrr = evaluate(store, kg, Split::valid, EvalMode::tail_only, config.threads).mrr;
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

/// Uniform [0, 2pi) initialization seeded from config.seed.
inline EmbeddingStore initial_store(const KnowledgeGraph& kg, const TrainingConfig& config) {
  return EmbeddingStore::random(kg.n_entities(), kg.n_relations(), config.entity_shape(), config.relation_shape(),
                                derive_seed(config.seed, 0x1417u));
}

inline TrainResult train(const KnowledgeGraph& kg, const TrainingConfig& config, const EpochCallback& on_epoch = {}) {
  config.validate(kg.train.size());
  return train(kg, config, initial_store(kg, config), on_epoch);
}

}  // namespace qkge
