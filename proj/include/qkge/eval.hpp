#pragma once

// Filtered link prediction: MRR, Hits@1 and Hits@10.

#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkge/data.hpp"
#include "qkge/errors.hpp"
#include "qkge/model.hpp"
#include "qkge/parallel.hpp"

namespace qkge {

enum class EvalMode { tail_only, both_directions };
enum class Split { valid, test };

inline const char* to_string(EvalMode m) { return m == EvalMode::tail_only ? "tail" : "both"; }
inline const char* to_string(Split s) { return s == Split::valid ? "valid" : "test"; }

/// Filtered rank of `truth` among `scores`. Candidates in `filter` other than
/// the truth are dropped; ties with the truth count half:
///   rank = 1 + #(score > truth) + #(score == truth) / 2.
inline double filtered_rank(std::span<const double> scores, std::size_t truth, const std::set<EntityId>& filter) {
  const double target = scores[truth];
  std::size_t greater = 0, ties = 0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (c == truth || filter.count(static_cast<EntityId>(c))) continue;
    if (scores[c] > target)
      ++greater;
    else if (scores[c] == target)
      ++ties;
  }
  return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(ties);
}

/// Integer rank used for Hits@k: half-integers round up.
inline long hits_rank(double rank) { return static_cast<long>(std::floor(rank + 0.5)); }

struct RankingReport {
  std::string split;
  EvalMode mode = EvalMode::tail_only;
  std::size_t n_triples = 0;
  std::vector<double> ranks;  // tail ranks, then head ranks in both-directions mode
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits10 = 0.0;
};

inline RankingReport summarize_ranks(std::vector<double> ranks) {
  RankingReport r;
  if (ranks.empty()) throw UsageError("cannot summarize an empty ranking");
  double recip = 0.0;
  std::size_t h1 = 0, h10 = 0;
  for (double rank : ranks) {
    recip += 1.0 / rank;
    h1 += hits_rank(rank) <= 1;
    h10 += hits_rank(rank) <= 10;
  }
  const double n = static_cast<double>(ranks.size());
  r.mrr = recip / n;
  r.hits1 = static_cast<double>(h1) / n;
  r.hits10 = static_cast<double>(h10) / n;
  r.ranks = std::move(ranks);
  return r;
}

/// Entity states computed once per evaluation.
class EntityStateCache {
 public:
  explicit EntityStateCache(const EmbeddingStore& store) {
    states_.reserve(store.n_entities());
    for (const auto& p : store.entities()) states_.push_back(embed_entity(p));
  }
  const StateVector& operator[](EntityId id) const { return states_.at(id); }
  std::size_t size() const noexcept { return states_.size(); }

 private:
  std::vector<StateVector> states_;
};

inline void check_triple(const EmbeddingStore& store, const Triple& t) {
  store.check_entity(t.head);
  store.check_relation(t.relation);
  store.check_entity(t.tail);
}

inline double rank_tail(const EmbeddingStore& store, const KnowledgeGraph& kg, const EntityStateCache& cache,
                        const Triple& t) {
  check_triple(store, t);
  const StateVector evolved = apply_ansatz(cache[t.head], store.relation(t.relation));
  std::vector<double> scores(cache.size());
  for (EntityId c = 0; c < cache.size(); ++c) scores[c] = fidelity(cache[c], evolved);
  return filtered_rank(scores, t.tail, kg.tail_filter.find(t.head, t.relation));
}

inline double rank_head(const EmbeddingStore& store, const KnowledgeGraph& kg, const EntityStateCache& cache,
                        const Triple& t) {
  check_triple(store, t);
  const ParameterTensor& rel = store.relation(t.relation);
  const StateVector& tail = cache[t.tail];
  std::vector<double> scores(cache.size());
  for (EntityId c = 0; c < cache.size(); ++c) scores[c] = fidelity(tail, apply_ansatz(cache[c], rel));
  return filtered_rank(scores, t.head, kg.head_filter.find(t.relation, t.tail));
}

/// Filtered tail rank of a single triple.
inline double rank_triple(const EmbeddingStore& store, const KnowledgeGraph& kg, const Triple& t) {
  return rank_tail(store, kg, EntityStateCache(store), t);
}

inline RankingReport evaluate_triples(const EmbeddingStore& store, const KnowledgeGraph& kg,
                                      std::span<const Triple> triples, EvalMode mode, int threads = 1) {
  if (triples.empty()) throw UsageError("evaluation split is empty");
  if (store.n_entities() != kg.n_entities() || store.n_relations() != kg.n_relations()) {
    throw IntegrityError("embedding store does not match the knowledge graph vocabulary");
  }
  const EntityStateCache cache(store);
  const std::size_t n = triples.size();
  std::vector<double> ranks(mode == EvalMode::both_directions ? 2 * n : n);
  parallel_for(n, threads, [&](std::size_t i) {
    ranks[i] = rank_tail(store, kg, cache, triples[i]);
    if (mode == EvalMode::both_directions) ranks[n + i] = rank_head(store, kg, cache, triples[i]);
  });
  RankingReport report = summarize_ranks(std::move(ranks));
  report.mode = mode;
  report.n_triples = n;
  return report;
}

inline RankingReport evaluate(const EmbeddingStore& store, const KnowledgeGraph& kg, Split split, EvalMode mode,
                              int threads = 1) {
  RankingReport r = evaluate_triples(store, kg, split == Split::valid ? kg.valid : kg.test, mode, threads);
  r.split = to_string(split);
  return r;
}

inline nlohmann::json report_json(const RankingReport& r) {
  return {{"split", r.split}, {"mode", to_string(r.mode)}, {"mrr", r.mrr},
          {"hits1", r.hits1}, {"hits10", r.hits10},        {"n_triples", r.n_triples}};
}

}  // namespace qkge
