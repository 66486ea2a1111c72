// Trains a six-triple family graph in memory and prints every score.

#include <cstdio>
#include <vector>

#include "qkge/qkge.hpp"

int main() {
  const std::vector<qkge::RawTriple> facts = {
      {"alice", "parent_of", "bob"},  {"bob", "parent_of", "carol"}, {"alice", "likes", "carol"},
      {"carol", "likes", "dave"},     {"dave", "parent_of", "erin"}, {"erin", "likes", "alice"},
  };
  const qkge::KnowledgeGraph kg = qkge::make_knowledge_graph(facts, {}, {});

  qkge::TrainingConfig config;
  config.epochs = 60;
  config.batch_size = 2;
  config.learning_rate = 0.05;
  const qkge::TrainResult result = qkge::train(kg, config);
  std::printf("final loss %.4f\n", result.history.back().loss);

  for (const auto& t : kg.train) {
    std::printf("%-6s %-10s %-6s %.3f\n", kg.entities.name(t.head).c_str(), kg.relations.name(t.relation).c_str(),
                kg.entities.name(t.tail).c_str(), qkge::score_triple(result.store, t.head, t.relation, t.tail));
  }
  return 0;
}
