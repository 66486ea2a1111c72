#pragma once

// Versioned JSON checkpoints. Angles and losses are written as decimal
// strings with 17 significant digits so that reloading reproduces every
// double exactly.

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "qkge/data.hpp"
#include "qkge/errors.hpp"
#include "qkge/model.hpp"
#include "qkge/training.hpp"

namespace qkge {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointFormat = "qkge-checkpoint";

struct Checkpoint {
  Vocabulary entities;
  Vocabulary relations;
  EmbeddingStore store;
  TrainingConfig config;
  std::vector<EpochStats> history;
};

inline std::string format_exact(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw NumericalError("cannot format value");
  return std::string(buf.data(), end);
}

inline double parse_exact(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
    throw IntegrityError("invalid number '" + s + "' in checkpoint");
  }
  return v;
}

namespace detail {

inline nlohmann::json shape_json(const AnsatzShape& s) { return {{"n_qubits", s.n_qubits}, {"n_layers", s.n_layers}}; }

inline AnsatzShape shape_from_json(const nlohmann::json& j) {
  AnsatzShape s{j.at("n_qubits").get<int>(), j.at("n_layers").get<int>()};
  if (s.n_qubits < 1 || s.n_qubits > kMaxQubits || s.n_layers < 0) throw IntegrityError("invalid ansatz shape");
  return s;
}

inline nlohmann::json table_json(std::span<const ParameterTensor> table) {
  auto out = nlohmann::json::array();
  for (const auto& p : table) {
    auto row = nlohmann::json::array();
    for (double v : p.values()) row.push_back(format_exact(v));
    out.push_back(std::move(row));
  }
  return out;
}

inline const char* mode_name(NegativeMode m) { return m == NegativeMode::superposed ? "superposed" : "separate"; }

inline nlohmann::json config_json(const TrainingConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon},
          {"negatives", c.negatives.k},
          {"negative_mode", mode_name(c.negatives.mode)},
          {"negative_strategy", "uniform-tail"},
          {"qubits", c.n_qubits},
          {"entity_layers", c.entity_layers},
          {"relation_layers", c.relation_layers},
          {"init", "uniform[0,2pi)"}};
}

inline TrainingConfig config_from_json(const nlohmann::json& j, std::uint64_t seed) {
  TrainingConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.negatives.k = j.at("negatives").get<int>();
  const auto mode = j.at("negative_mode").get<std::string>();
  if (mode != "superposed" && mode != "separate") throw IntegrityError("unknown negative mode '" + mode + "'");
  c.negatives.mode = mode == "superposed" ? NegativeMode::superposed : NegativeMode::separate;
  c.n_qubits = j.at("qubits").get<int>();
  c.entity_layers = j.at("entity_layers").get<int>();
  c.relation_layers = j.at("relation_layers").get<int>();
  c.seed = seed;
  c.negatives.seed = seed;
  return c;
}

}  // namespace detail

inline nlohmann::json checkpoint_json(const Checkpoint& ck) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : ck.history) {
    history.push_back({{"epoch", e.epoch},
                       {"loss", format_exact(e.loss)},
                       {"val_mrr", e.valid_mrr ? nlohmann::json(format_exact(*e.valid_mrr)) : nlohmann::json()}});
  }
  return {{"format", kCheckpointFormat},
          {"format_version", kCheckpointVersion},
          {"entity_shape", detail::shape_json(ck.store.entity_shape())},
          {"relation_shape", detail::shape_json(ck.store.relation_shape())},
          {"vocabulary", vocabulary_json(ck.entities, ck.relations)},
          {"entity_params", detail::table_json(ck.store.entities())},
          {"relation_params", detail::table_json(ck.store.relations())},
          {"config", detail::config_json(ck.config)},
          {"seed", ck.config.seed},
          {"loss_history", std::move(history)}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) throw IntegrityError("not a checkpoint file");
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw IntegrityError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ck;
    std::tie(ck.entities, ck.relations) = vocabulary_from_json(j.at("vocabulary"));
    const AnsatzShape es = detail::shape_from_json(j.at("entity_shape"));
    const AnsatzShape rs = detail::shape_from_json(j.at("relation_shape"));
    const auto& ep = j.at("entity_params");
    const auto& rp = j.at("relation_params");
    if (ep.size() != ck.entities.size() || rp.size() != ck.relations.size()) {
      throw IntegrityError("parameter tables do not match vocabulary sizes");
    }
    ck.store = EmbeddingStore(ep.size(), rp.size(), es, rs);
    const auto fill = [](const nlohmann::json& rows, auto&& tensor_at) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ParameterTensor& p = tensor_at(static_cast<std::uint32_t>(i));
        const auto& row = rows[i];
        if (row.size() != p.size()) throw IntegrityError("parameter tensor " + std::to_string(i) + " has wrong size");
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = parse_exact(row[k].get<std::string>());
      }
    };
    fill(ep, [&](std::uint32_t i) -> ParameterTensor& { return ck.store.entity(i); });
    fill(rp, [&](std::uint32_t i) -> ParameterTensor& { return ck.store.relation(i); });
    ck.config = detail::config_from_json(j.at("config"), j.at("seed").get<std::uint64_t>());
    if (ck.config.entity_shape() != es || ck.config.relation_shape() != rs) {
      throw IntegrityError("config shapes disagree with parameter shapes");
    }
    for (const auto& e : j.at("loss_history")) {
      EpochStats s{e.at("epoch").get<int>(), parse_exact(e.at("loss").get<std::string>()), std::nullopt};
      if (!e.at("val_mrr").is_null()) s.valid_mrr = parse_exact(e.at("val_mrr").get<std::string>());
      ck.history.push_back(s);
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint: ") + e.what());
  } catch (const UsageError& e) {
    throw IntegrityError(std::string("inconsistent checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IntegrityError("cannot write " + path.string());
  out << checkpoint_json(ck).dump(1) << '\n';
  if (!out) throw IntegrityError("failed writing " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError("corrupted checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

/// Rejects a checkpoint whose vocabulary differs from the dataset's.
inline void check_compatible(const Checkpoint& ck, const KnowledgeGraph& kg) {
  if (!(ck.entities == kg.entities) || !(ck.relations == kg.relations)) {
    throw IntegrityError("checkpoint vocabulary (" + std::to_string(ck.entities.size()) + " entities, " +
                         std::to_string(ck.relations.size()) + " relations) does not match the data directory (" +
                         std::to_string(kg.n_entities()) + ", " + std::to_string(kg.n_relations()) + ")");
  }
}

}  // namespace qkge
