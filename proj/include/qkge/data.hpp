#pragma once

// Triple datasets: tab-separated "head<TAB>relation<TAB>tail" files, sorted
// vocabularies and the filter indices used by ranking.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkge/errors.hpp"
#include "qkge/types.hpp"

namespace qkge {

/// Sorted, duplicate-free string table; an id is the position in sort order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
    for (std::uint32_t i = 0; i < names_.size(); ++i) ids_.emplace(names_[i], i);
  }

  std::size_t size() const noexcept { return names_.size(); }
  std::span<const std::string> names() const noexcept { return names_; }
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  bool contains(std::string_view s) const { return ids_.find(std::string(s)) != ids_.end(); }

  std::uint32_t id(std::string_view s) const {
    auto it = ids_.find(std::string(s));
    if (it == ids_.end()) throw VocabularyError("unknown symbol '" + std::string(s) + "'");
    return it->second;
  }

  /// New vocabulary containing this one's names plus `extra`.
  Vocabulary merged(std::span<const std::string> extra) const {
    std::vector<std::string> all(names_.begin(), names_.end());
    all.insert(all.end(), extra.begin(), extra.end());
    return Vocabulary(std::move(all));
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct RawTriple {
  std::string head, relation, tail;
  std::size_t line = 0;
};

inline std::vector<RawTriple> read_raw_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IntegrityError("cannot open " + path.string());
  std::vector<RawTriple> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1)
      fields.push_back(line.substr(start, tab - start));
    fields.push_back(line.substr(start));
    if (fields.size() != 3) {
      throw ParseError(path.string(), lineno, "expected 3 tab-separated fields, found " + std::to_string(fields.size()));
    }
    for (const auto& f : fields)
      if (f.empty()) throw ParseError(path.string(), lineno, "empty field");
    out.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2]), lineno});
  }
  return out;
}

inline std::vector<Triple> resolve_triples(std::span<const RawTriple> raw, const Vocabulary& entities,
                                           const Vocabulary& relations) {
  std::vector<Triple> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    out.push_back({entities.id(r.head), relations.id(r.relation), entities.id(r.tail)});
  }
  return out;
}

enum class VocabMode { build, reuse };

/// Parses one file against the given vocabularies. In build mode unseen
/// symbols are merged in first, which can renumber existing ids.
inline std::vector<Triple> parse_triples(const std::filesystem::path& path, VocabMode mode, Vocabulary& entities,
                                         Vocabulary& relations) {
  const auto raw = read_raw_triples(path);
  if (mode == VocabMode::build) {
    std::vector<std::string> ents, rels;
    for (const auto& r : raw) {
      ents.push_back(r.head);
      ents.push_back(r.tail);
      rels.push_back(r.relation);
    }
    entities = entities.merged(ents);
    relations = relations.merged(rels);
  }
  try {
    return resolve_triples(raw, entities, relations);
  } catch (const VocabularyError& e) {
    throw VocabularyError(path.string() + ": " + e.what());
  }
}

using PairKey = std::pair<std::uint32_t, std::uint32_t>;

/// Known answers per query pair, over all splits.
class FilterIndex {
 public:
  void add(std::uint32_t a, std::uint32_t b, EntityId answer) { index_[{a, b}].insert(answer); }

  const std::set<EntityId>& find(std::uint32_t a, std::uint32_t b) const {
    static const std::set<EntityId> empty;
    auto it = index_.find({a, b});
    return it == index_.end() ? empty : it->second;
  }
  std::size_t size() const noexcept { return index_.size(); }

 private:
  std::map<PairKey, std::set<EntityId>> index_;
};

struct KnowledgeGraph {
  Vocabulary entities;
  Vocabulary relations;
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  FilterIndex tail_filter;  // (head, relation) -> tails
  FilterIndex head_filter;  // (relation, tail) -> heads

  std::size_t n_entities() const noexcept { return entities.size(); }
  std::size_t n_relations() const noexcept { return relations.size(); }
};

inline void build_filter_index(KnowledgeGraph& kg) {
  kg.tail_filter = {};
  kg.head_filter = {};
  for (const auto* split : {&kg.train, &kg.valid, &kg.test}) {
    for (const Triple& t : *split) {
      kg.tail_filter.add(t.head, t.relation, t.tail);
      kg.head_filter.add(t.relation, t.tail, t.head);
    }
  }
}

/// Builds a graph from in-memory triples, assigning ids in sort order.
inline KnowledgeGraph make_knowledge_graph(std::span<const RawTriple> train, std::span<const RawTriple> valid,
                                           std::span<const RawTriple> test) {
  std::vector<std::string> ents, rels;
  for (auto split : {train, valid, test}) {
    for (const auto& r : split) {
      ents.push_back(r.head);
      ents.push_back(r.tail);
      rels.push_back(r.relation);
    }
  }
  KnowledgeGraph kg;
  kg.entities = Vocabulary(std::move(ents));
  kg.relations = Vocabulary(std::move(rels));
  kg.train = resolve_triples(train, kg.entities, kg.relations);
  kg.valid = resolve_triples(valid, kg.entities, kg.relations);
  kg.test = resolve_triples(test, kg.entities, kg.relations);
  build_filter_index(kg);
  return kg;
}

/// Loads train.txt, valid.txt and test.txt from `dir`. valid/test may be absent.
inline KnowledgeGraph load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw UsageError("data directory not found: " + dir.string());
  const auto read = [&](const char* name, bool required) {
    const auto p = dir / name;
    if (!std::filesystem::exists(p)) {
      if (required) throw UsageError("missing " + p.string());
      return std::vector<RawTriple>{};
    }
    return read_raw_triples(p);
  };
  const auto train = read("train.txt", true);
  const auto valid = read("valid.txt", false);
  const auto test = read("test.txt", false);
  return make_knowledge_graph(train, valid, test);
}

inline nlohmann::json vocabulary_json(const Vocabulary& entities, const Vocabulary& relations) {
  return {{"entities", std::vector<std::string>(entities.names().begin(), entities.names().end())},
          {"relations", std::vector<std::string>(relations.names().begin(), relations.names().end())}};
}

inline std::pair<Vocabulary, Vocabulary> vocabulary_from_json(const nlohmann::json& j) {
  try {
    auto ents = j.at("entities").get<std::vector<std::string>>();
    auto rels = j.at("relations").get<std::vector<std::string>>();
    const auto check = [](const std::vector<std::string>& v, const char* what) {
      if (!std::is_sorted(v.begin(), v.end()) || std::adjacent_find(v.begin(), v.end()) != v.end()) {
        throw IntegrityError(std::string(what) + " vocabulary is not sorted and unique");
      }
    };
    check(ents, "entity");
    check(rels, "relation");
    return {Vocabulary(std::move(ents)), Vocabulary(std::move(rels))};
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("malformed vocabulary: ") + e.what());
  }
}

}  // namespace qkge
