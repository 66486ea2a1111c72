#pragma once

// Embedding tables and the fidelity scores built on them.

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qkge/ansatz.hpp"
#include "qkge/errors.hpp"
#include "qkge/random.hpp"
#include "qkge/types.hpp"

namespace qkge {

/// Entity and relation parameter tables. Entities use one table for both the
/// head and the tail role.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::size_t n_entities, std::size_t n_relations, AnsatzShape entity_shape,
                 AnsatzShape relation_shape)
      : entity_shape_(entity_shape),
        relation_shape_(relation_shape),
        entities_(n_entities, ParameterTensor(entity_shape)),
        relations_(n_relations, ParameterTensor(relation_shape)) {
    if (entity_shape.n_qubits != relation_shape.n_qubits) {
      throw ConfigError("entity and relation circuits must act on the same number of qubits");
    }
  }

  /// Every angle drawn uniformly from [0, 2pi), entities first, in id order.
  static EmbeddingStore random(std::size_t n_entities, std::size_t n_relations, AnsatzShape entity_shape,
                               AnsatzShape relation_shape, std::uint64_t seed) {
    EmbeddingStore store(n_entities, n_relations, entity_shape, relation_shape);
    Engine rng(seed);
    for (auto* table : {&store.entities_, &store.relations_})
      for (auto& tensor : *table)
        for (double& v : tensor.values()) v = 2.0 * std::numbers::pi * uniform_unit(rng);
    return store;
  }

  std::size_t n_entities() const noexcept { return entities_.size(); }
  std::size_t n_relations() const noexcept { return relations_.size(); }
  const AnsatzShape& entity_shape() const noexcept { return entity_shape_; }
  const AnsatzShape& relation_shape() const noexcept { return relation_shape_; }
  int n_qubits() const noexcept { return entity_shape_.n_qubits; }

  const ParameterTensor& entity(EntityId id) const { return entities_.at(check_entity(id)); }
  ParameterTensor& entity(EntityId id) { return entities_.at(check_entity(id)); }
  const ParameterTensor& relation(RelationId id) const { return relations_.at(check_relation(id)); }
  ParameterTensor& relation(RelationId id) { return relations_.at(check_relation(id)); }

  std::span<const ParameterTensor> entities() const noexcept { return entities_; }
  std::span<const ParameterTensor> relations() const noexcept { return relations_; }

  EntityId check_entity(EntityId id) const {
    if (id >= entities_.size()) throw UsageError("entity id " + std::to_string(id) + " out of range");
    return id;
  }
  RelationId check_relation(RelationId id) const {
    if (id >= relations_.size()) throw UsageError("relation id " + std::to_string(id) + " out of range");
    return id;
  }

  bool all_finite() const noexcept {
    for (const auto* table : {&entities_, &relations_})
      for (const auto& t : *table)
        if (!t.all_finite()) return false;
    return true;
  }

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  AnsatzShape entity_shape_{};
  AnsatzShape relation_shape_{};
  std::vector<ParameterTensor> entities_;
  std::vector<ParameterTensor> relations_;
};

/// U(beta_r) |h>.
inline StateVector evolved_head(const EmbeddingStore& store, EntityId h, RelationId r) {
  return apply_ansatz(embed_entity(store.entity(h)), store.relation(r));
}

/// Fidelity score |<t| U(beta_r) |h>|^2.
inline double score_triple(const EmbeddingStore& store, EntityId h, RelationId r, EntityId t) {
  return fidelity(embed_entity(store.entity(t)), evolved_head(store, h, r));
}

/// Same score evaluated by un-computing the tail circuit on the evolved head
/// and overlapping with the shared reference state.
inline double score_triple_via_inverse(const EmbeddingStore& store, EntityId h, RelationId r, EntityId t) {
  const StateVector back = apply_ansatz_inverse(evolved_head(store, h, r), store.entity(t));
  return fidelity(uniform_superposition(store.n_qubits()), back);
}

/// Mean fidelity of the evolved head against k tails (the superposed
/// negative score). The evolved head is built once.
inline double score_multi_tail(const EmbeddingStore& store, EntityId h, RelationId r,
                               std::span<const EntityId> tails) {
  if (tails.empty()) throw UsageError("multi-tail score needs at least one tail");
  const StateVector head = evolved_head(store, h, r);
  double acc = 0.0;
  for (EntityId t : tails) acc += fidelity(embed_entity(store.entity(t)), head);
  return acc / static_cast<double>(tails.size());
}

inline double score_example(const EmbeddingStore& store, const LabeledExample& ex) {
  return score_multi_tail(store, ex.head, ex.relation, ex.tails);
}

}  // namespace qkge
