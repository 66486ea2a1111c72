#pragma once

// Uniform tail corruption. A draw is a pure function of (seed, draw index),
// so serial and parallel training see the same negatives.

#include <cstdint>
#include <string>
#include <vector>

#include "qkge/errors.hpp"
#include "qkge/random.hpp"
#include "qkge/types.hpp"

namespace qkge {

enum class SamplingStrategy { uniform_tail };

/// How k corrupted tails enter the loss: one example averaging all k
/// fidelities, or k separate single-tail examples.
enum class NegativeMode { superposed, separate };

struct NegativeSpec {
  int k = 1;
  SamplingStrategy strategy = SamplingStrategy::uniform_tail;
  NegativeMode mode = NegativeMode::superposed;
  std::uint64_t seed = 42;

  void validate() const {
    if (k < 1) throw ConfigError("negatives per positive must be at least 1, got " + std::to_string(k));
  }
};

/// k distinct entity ids drawn uniformly from [0, n_entities) minus the
/// positive's tail.
inline std::vector<EntityId> sample_negative_tails(std::size_t n_entities, const Triple& positive,
                                                   const NegativeSpec& spec, std::uint64_t draw_index) {
  spec.validate();
  if (n_entities < static_cast<std::size_t>(spec.k) + 1) {
    throw ConfigError("need at least " + std::to_string(spec.k + 1) + " entities to sample " + std::to_string(spec.k) +
                      " negative tails, have " + std::to_string(n_entities));
  }
  if (positive.tail >= n_entities) throw UsageError("positive tail id out of range");

  Engine rng(derive_seed(spec.seed, draw_index));
  // Partial Fisher-Yates over the candidate ids, with the true tail removed
  // by swapping it to the end.
  std::vector<EntityId> pool(n_entities);
  for (EntityId i = 0; i < pool.size(); ++i) pool[i] = i;
  std::swap(pool[positive.tail], pool.back());
  const std::size_t candidates = n_entities - 1;

  std::vector<EntityId> out;
  out.reserve(spec.k);
  for (std::size_t i = 0; i < static_cast<std::size_t>(spec.k); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, candidates - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace qkge
