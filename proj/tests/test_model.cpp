#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qkge/model.hpp"

using namespace qkge;

namespace {

EmbeddingStore random_store(std::size_t e, std::size_t r, int n, int layers, std::uint64_t seed) {
  return EmbeddingStore::random(e, r, {n, layers}, {n, layers}, seed);
}

}  // namespace

TEST(EmbeddingStore, TableSizesAndShapes) {
  const auto s = random_store(135, 46, 2, 2, 1);
  EXPECT_EQ(s.n_entities(), 135u);
  EXPECT_EQ(s.n_relations(), 46u);
  for (const auto& p : s.entities()) EXPECT_EQ(p.size(), 12u);
  for (const auto& p : s.relations()) EXPECT_EQ(p.size(), 12u);
  for (const auto& p : s.entities())
    for (double v : p.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 2 * std::numbers::pi);
    }
}

TEST(EmbeddingStore, RandomIsSeedDeterministic) {
  EXPECT_EQ(random_store(10, 3, 2, 2, 7), random_store(10, 3, 2, 2, 7));
  EXPECT_FALSE(random_store(10, 3, 2, 2, 7) == random_store(10, 3, 2, 2, 8));
}

TEST(EmbeddingStore, RejectsMismatchedQubits) {
  EXPECT_THROW(EmbeddingStore(2, 1, {2, 2}, {3, 2}), ConfigError);
}

TEST(ScoreTriple, IdentityRelationAndSameEntityIsOne) {
  auto store = EmbeddingStore::random(3, 1, {2, 2}, {2, 0}, 3);
  EXPECT_NEAR(score_triple(store, 1, 0, 1), 1.0, 1e-10);
}

TEST(ScoreTriple, SingleQubitOrthogonalTail) {
  // Head H|0>, tail RY(pi) H|0> = [-1/sqrt2, 1/sqrt2]: orthogonal.
  EmbeddingStore store(2, 1, {1, 1}, {1, 0});
  store.entity(1).at(0, 0, 1) = std::numbers::pi;
  const double r = 1.0 / std::sqrt(2.0);
  const auto tail = oracle::apply(oracle::ry(std::numbers::pi), {r, r});
  EXPECT_NEAR(tail[0].real(), -r, 1e-15);
  EXPECT_NEAR(tail[1].real(), r, 1e-15);
  EXPECT_NEAR(score_triple(store, 0, 0, 1), 0.0, 1e-10);
}

TEST(ScoreTriple, MatchesDenseOracleAndInversePath) {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 3; ++n) {
    const auto store = random_store(4, 2, n, 2, 100 + n);
    for (EntityId h = 0; h < 4; ++h) {
      for (EntityId t = 0; t < 4; ++t) {
        const double s = score_triple(store, h, 1, t);
        EXPECT_NEAR(s, oracle::score(store.entity(h), store.relation(1), store.entity(t)), 1e-10);
        EXPECT_NEAR(s, score_triple_via_inverse(store, h, 1, t), 1e-10);
      }
    }
  }
}

TEST(ScoreTriple, AlwaysInUnitInterval) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto store = random_store(3, 1, 1 + seed % 3, 1 + seed % 2, seed);
    const double s = score_triple(store, seed % 3, 0, (seed / 3) % 3);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0 + 1e-10);
  }
}

TEST(ScoreTriple, RejectsOutOfRangeIds) {
  const auto store = random_store(3, 1, 2, 1, 0);
  EXPECT_THROW(score_triple(store, 3, 0, 0), UsageError);
  EXPECT_THROW(score_triple(store, 0, 1, 0), UsageError);
  EXPECT_THROW(score_triple(store, 0, 0, 7), UsageError);
}

TEST(ScoreMultiTail, SingleTailEqualsScoreTripleExactly) {
  const auto store = random_store(5, 2, 2, 2, 9);
  const std::vector<EntityId> tails{3};
  EXPECT_EQ(score_multi_tail(store, 0, 1, tails), score_triple(store, 0, 1, 3));
}

TEST(ScoreMultiTail, RepeatedTailEqualsSingleScore) {
  const auto store = random_store(5, 2, 2, 2, 10);
  const std::vector<EntityId> tails{2, 2, 2, 2};
  EXPECT_NEAR(score_multi_tail(store, 4, 0, tails), score_triple(store, 4, 0, 2), 1e-12);
}

TEST(ScoreMultiTail, IsMeanOfIndependentScoresAndPermutationInvariant) {
  std::mt19937_64 rng(11);
  const auto store = random_store(20, 4, 2, 2, 11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EntityId> tails(4);
    for (auto& t : tails) t = rng() % 20;
    const EntityId h = rng() % 20;
    const RelationId r = rng() % 4;
    double naive = 0.0;
    for (EntityId t : tails) naive += score_triple(store, h, r, t);
    naive /= 4.0;
    const double s = score_multi_tail(store, h, r, tails);
    EXPECT_NEAR(s, naive, 1e-12);
    std::reverse(tails.begin(), tails.end());
    EXPECT_NEAR(score_multi_tail(store, h, r, tails), s, 1e-15);
  }
}

TEST(ScoreMultiTail, RejectsEmptyTails) {
  const auto store = random_store(3, 1, 2, 1, 0);
  EXPECT_THROW(score_multi_tail(store, 0, 0, {}), UsageError);
}
