#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace qkge {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// A scored unit of supervision. Positives carry one tail and label 1;
/// a superposed negative carries k tails and label 0.
struct LabeledExample {
  EntityId head = 0;
  RelationId relation = 0;
  std::vector<EntityId> tails;
  double label = 0.0;

  static LabeledExample positive(const Triple& t) { return {t.head, t.relation, {t.tail}, 1.0}; }
  static LabeledExample negative(EntityId h, RelationId r, std::vector<EntityId> tails) {
    return {h, r, std::move(tails), 0.0};
  }
};

}  // namespace qkge
