#include <gtest/gtest.h>

#include <random>
#include <set>
#include <vector>

#include "qkge/eval.hpp"

using namespace qkge;

TEST(FilteredRank, StrictlyHighestIsOne) {
  const std::vector<double> scores{0.1, 0.9, 0.3};
  EXPECT_EQ(filtered_rank(scores, 1, {}), 1.0);
}

TEST(FilteredRank, OneGreaterCandidate) {
  const std::vector<double> scores{0.9, 0.5, 0.1};
  const double r = filtered_rank(scores, 1, {});
  EXPECT_EQ(r, 2.0);
  EXPECT_EQ(1.0 / r, 0.5);
}

TEST(FilteredRank, AllTiedGivesMeanRank) {
  for (std::size_t m : {1u, 2u, 5u, 10u}) {
    const std::vector<double> scores(m, 0.25);
    EXPECT_EQ(filtered_rank(scores, 0, {}), (m + 1) / 2.0);
  }
}

TEST(FilteredRank, FilteredCandidatesAreSkipped) {
  const std::vector<double> scores{0.9, 0.8, 0.5, 0.1};
  EXPECT_EQ(filtered_rank(scores, 2, {}), 3.0);
  EXPECT_EQ(filtered_rank(scores, 2, {0, 2}), 2.0);
  EXPECT_EQ(filtered_rank(scores, 2, {0, 1, 2}), 1.0);
}

TEST(FilteredRank, NeverWorseThanRawAndMonotoneInTruthScore) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(40);
    for (double& s : scores) s = u(rng);
    const std::size_t truth = rng() % 40;
    std::set<EntityId> filter{static_cast<EntityId>(truth)};
    for (int i = 0; i < 5; ++i) filter.insert(rng() % 40);
    const double filtered = filtered_rank(scores, truth, filter);
    EXPECT_LE(filtered, filtered_rank(scores, truth, {}));

    const double before = 1.0 / filtered;
    scores[truth] *= 0.5;
    EXPECT_LE(1.0 / filtered_rank(scores, truth, filter), before);
  }
}

TEST(FilteredRank, MrrStrictlyDropsWhenTruthFallsBelowACandidate) {
  std::vector<double> scores{0.4, 0.6, 0.2};
  const double before = summarize_ranks({filtered_rank(scores, 1, {})}).mrr;
  scores[1] = 0.3;
  EXPECT_LT(summarize_ranks({filtered_rank(scores, 1, {})}).mrr, before);
}

TEST(Summarize, DefinitionArithmetic) {
  const auto r = summarize_ranks({1, 2, 4});
  EXPECT_NEAR(r.mrr, (1 + 0.5 + 0.25) / 3, 1e-15);
  EXPECT_NEAR(r.hits1, 1.0 / 3, 1e-15);
  EXPECT_EQ(r.hits10, 1.0);
}

TEST(Summarize, SingleRankOne) {
  const auto r = summarize_ranks({1});
  EXPECT_EQ(r.mrr, 1.0);
  EXPECT_EQ(r.hits1, 1.0);
  EXPECT_EQ(r.hits10, 1.0);
}

TEST(Summarize, HalfRanksRoundUpForHits) {
  // 1.5 -> 2, 10.5 -> 11, 10.0 -> 10.
  const auto r = summarize_ranks({1.5, 10.5, 10.0});
  EXPECT_EQ(r.hits1, 0.0);
  EXPECT_NEAR(r.hits10, 2.0 / 3, 1e-15);
  EXPECT_NEAR(r.mrr, (1 / 1.5 + 1 / 10.5 + 0.1) / 3, 1e-15);
  EXPECT_LE(r.hits1, r.hits10);
}

namespace {

KnowledgeGraph small_graph() {
  std::vector<RawTriple> train, test;
  for (int i = 0; i < 8; ++i)
    train.push_back({"e" + std::to_string(i), i % 2 ? "r" : "s", "e" + std::to_string((i * 3 + 1) % 8)});
  test = {{"e0", "r", "e5"}, {"e3", "s", "e2"}, {"e6", "r", "e6"}};
  return make_knowledge_graph(train, test, test);
}

}  // namespace

TEST(Evaluate, TailRanksMatchPerTripleRanking) {
  const auto kg = small_graph();
  const auto store = EmbeddingStore::random(kg.n_entities(), kg.n_relations(), {2, 2}, {2, 2}, 3);
  const auto report = evaluate(store, kg, Split::test, EvalMode::tail_only);
  ASSERT_EQ(report.ranks.size(), kg.test.size());
  EXPECT_EQ(report.n_triples, 3u);
  EXPECT_EQ(report.split, "test");
  for (std::size_t i = 0; i < kg.test.size(); ++i) EXPECT_EQ(report.ranks[i], rank_triple(store, kg, kg.test[i]));
}

TEST(Evaluate, TailRankAgreesWithDirectScoring) {
  const auto kg = small_graph();
  const auto store = EmbeddingStore::random(kg.n_entities(), kg.n_relations(), {2, 2}, {2, 2}, 4);
  for (const Triple& t : kg.test) {
    std::vector<double> scores(kg.n_entities());
    for (EntityId c = 0; c < scores.size(); ++c) scores[c] = score_triple(store, t.head, t.relation, c);
    EXPECT_EQ(rank_triple(store, kg, t), filtered_rank(scores, t.tail, kg.tail_filter.find(t.head, t.relation)));
  }
}

TEST(Evaluate, BothDirectionsAveragesHeadAndTailRanks) {
  const auto kg = small_graph();
  const auto store = EmbeddingStore::random(kg.n_entities(), kg.n_relations(), {2, 2}, {2, 2}, 5);
  const auto tail = evaluate(store, kg, Split::valid, EvalMode::tail_only);
  const auto both = evaluate(store, kg, Split::valid, EvalMode::both_directions);
  ASSERT_EQ(both.ranks.size(), 2 * kg.valid.size());
  for (std::size_t i = 0; i < kg.valid.size(); ++i) EXPECT_EQ(both.ranks[i], tail.ranks[i]);
  const EntityStateCache cache(store);
  for (std::size_t i = 0; i < kg.valid.size(); ++i) {
    const Triple& t = kg.valid[i];
    std::vector<double> scores(kg.n_entities());
    for (EntityId c = 0; c < scores.size(); ++c) scores[c] = score_triple(store, c, t.relation, t.tail);
    EXPECT_EQ(both.ranks[kg.valid.size() + i], filtered_rank(scores, t.head, kg.head_filter.find(t.relation, t.tail)));
  }
}

TEST(Evaluate, PureAndThreadCountIndependent) {
  const auto kg = small_graph();
  const auto store = EmbeddingStore::random(kg.n_entities(), kg.n_relations(), {2, 2}, {2, 2}, 6);
  const auto a = evaluate(store, kg, Split::test, EvalMode::both_directions, 1);
  const auto b = evaluate(store, kg, Split::test, EvalMode::both_directions, 3);
  EXPECT_EQ(a.ranks, b.ranks);
  EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
}

TEST(Evaluate, RejectsEmptySplitAndBadIds) {
  const std::vector<RawTriple> train{{"a", "r", "b"}};
  const auto kg = make_knowledge_graph(train, {}, {});
  const auto store = EmbeddingStore::random(kg.n_entities(), kg.n_relations(), {1, 1}, {1, 1}, 7);
  EXPECT_THROW(evaluate(store, kg, Split::test, EvalMode::tail_only), UsageError);
  EXPECT_THROW(rank_triple(store, kg, Triple{0, 0, 9}), UsageError);
}

TEST(ReportJson, HasTheMetricFields) {
  auto r = summarize_ranks({1, 3});
  r.split = "valid";
  r.n_triples = 2;
  const auto j = report_json(r);
  for (const char* key : {"split", "mode", "mrr", "hits1", "hits10", "n_triples"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["mode"], "tail");
}
