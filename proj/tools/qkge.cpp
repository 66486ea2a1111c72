// qkge: train, evaluate and inspect quantum-circuit knowledge graph embeddings.
//
//   qkge train   --data-dir data/umls --out model.json
//   qkge eval    --model model.json --data-dir data/umls --split test --mode tail
//   qkge inspect --model model.json --triple "alga isa entity"
//   qkge init    --data-dir data/umls --out untrained.json

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkge/qkge.hpp"

namespace {

using namespace qkge;

struct TrainFlags {
  std::string data_dir;
  std::string out = "model.json";
  std::string loss_log;
  int qubits = 2;
  int entity_layers = 2;
  int relation_layers = 2;
  int negatives = 1;
  std::string negative_mode = "superposed";
  int epochs = 10;
  double lr = 0.01;
  int batch_size = 8;
  std::uint64_t seed = 42;
  int threads = default_thread_count();
  bool no_validation = false;
};

void add_model_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--data-dir", f.data_dir, "Directory with train.txt, valid.txt, test.txt")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--out", f.out, "Checkpoint path")->capture_default_str();
  cmd->add_option("--qubits", f.qubits, "Qubits per entity state")->capture_default_str()->check(CLI::Range(1, 16));
  cmd->add_option("--entity-layers", f.entity_layers, "Layers of the entity circuit")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--relation-layers", f.relation_layers, "Layers of the relation circuit")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--negatives", f.negatives, "Corrupted tails per positive (k)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--negative-mode", f.negative_mode,
                  "superposed: one example averaging k tail fidelities; separate: k single-tail examples")
      ->capture_default_str()
      ->check(CLI::IsMember({"superposed", "separate"}));
  cmd->add_option("--epochs", f.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", f.batch_size, "Positives per optimizer step")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Seed for initialization, shuffling and sampling")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (1 = serial reference)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--config", "key=value file mirroring these flags; flags take precedence")
      ->check(CLI::ExistingFile);
}

bool given(const std::vector<std::string>& args, const std::string& flag) {
  return std::ranges::any_of(args, [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
}

/// Appends the entries of a --config file as flags, skipping any flag the
/// command line already sets.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty() || !std::filesystem::is_regular_file(path)) return args;
  std::vector<std::string> extra;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    if (item.name.empty() || item.name == "config") continue;
    const std::string flag = "--" + item.name;
    if (given(args, flag)) continue;
    if (item.inputs.size() == 1 && item.inputs[0] == "true") {
      extra.push_back(flag);
    } else if (!(item.inputs.size() == 1 && item.inputs[0] == "false")) {
      extra.push_back(flag);
      extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

TrainingConfig to_config(const TrainFlags& f) {
  TrainingConfig c;
  c.learning_rate = f.lr;
  c.epochs = f.epochs;
  c.batch_size = f.batch_size;
  c.negatives.k = f.negatives;
  c.negatives.mode = f.negative_mode == "separate" ? NegativeMode::separate : NegativeMode::superposed;
  c.negatives.seed = f.seed;
  c.seed = f.seed;
  c.n_qubits = f.qubits;
  c.entity_layers = f.entity_layers;
  c.relation_layers = f.relation_layers;
  c.validate_each_epoch = !f.no_validation;
  c.threads = f.threads;
  return c;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int cmd_train(const TrainFlags& f) {
  const KnowledgeGraph kg = load_dataset(f.data_dir);
  const TrainingConfig config = to_config(f);
  config.validate(kg.train.size());

  const std::string log_path = f.loss_log.empty() ? f.out + ".loss.csv" : f.loss_log;
  std::ofstream log(log_path);
  if (!log) throw IntegrityError("cannot write " + log_path);
  log << "epoch,loss,val_mrr\n";

  std::cout << "training on " << kg.train.size() << " triples (" << kg.n_entities() << " entities, "
            << kg.n_relations() << " relations), " << config.n_qubits << " qubits, k=" << config.negatives.k << "\n";
  TrainResult result = train(kg, config, [&](const EpochStats& s) {
    const std::string val = s.valid_mrr ? fmt("%.6f", *s.valid_mrr) : "";
    log << s.epoch << ',' << fmt("%.10g", s.loss) << ',' << val << '\n';
    log.flush();
    std::cout << "epoch " << s.epoch << "  loss " << fmt("%.6f", s.loss);
    if (s.valid_mrr) std::cout << "  valid MRR " << val;
    std::cout << std::endl;
  });

  save_checkpoint({kg.entities, kg.relations, std::move(result.store), config, std::move(result.history)}, f.out);
  std::cout << "wrote " << f.out << " and " << log_path << "\n";
  return 0;
}

int cmd_init(const TrainFlags& f) {
  const KnowledgeGraph kg = load_dataset(f.data_dir);
  const TrainingConfig config = to_config(f);
  config.validate(kg.train.size());
  save_checkpoint({kg.entities, kg.relations, initial_store(kg, config), config, {}}, f.out);
  std::cout << "wrote untrained checkpoint " << f.out << "\n";
  return 0;
}

struct EvalFlags {
  std::string model;
  std::string data_dir;
  std::string split = "test";
  std::string mode = "tail";
  std::string json;
  int threads = default_thread_count();
};

int cmd_eval(const EvalFlags& f) {
  const Checkpoint ck = load_checkpoint(f.model);
  const KnowledgeGraph kg = load_dataset(f.data_dir);
  check_compatible(ck, kg);
  const RankingReport r = evaluate(ck.store, kg, f.split == "valid" ? Split::valid : Split::test,
                                   f.mode == "both" ? EvalMode::both_directions : EvalMode::tail_only, f.threads);

  std::printf("%-6s %-5s %9s  %-18s %-18s %-18s\n", "split", "mode", "n_triples", "MRR", "Hits@1", "Hits@10");
  const auto cell = [](double v) { return fmt("%.4f", v) + " (" + fmt("%.2f", 100.0 * v) + "%)"; };
  std::printf("%-6s %-5s %9zu  %-18s %-18s %-18s\n", r.split.c_str(), to_string(r.mode), r.n_triples,
              cell(r.mrr).c_str(), cell(r.hits1).c_str(), cell(r.hits10).c_str());

  if (!f.json.empty()) {
    std::ofstream out(f.json, std::ios::binary);
    if (!out) throw IntegrityError("cannot write " + f.json);
    out << report_json(r).dump(2) << '\n';
  }
  return 0;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::uint32_t lookup(const Vocabulary& vocab, const std::string& name, const char* what) {
  if (vocab.contains(name)) return vocab.id(name);
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const auto& n : vocab.names()) ranked.emplace_back(edit_distance(name, n), n);
  std::sort(ranked.begin(), ranked.end());
  std::string msg = std::string("unknown ") + what + " '" + name + "'; nearest:";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i) msg += " " + ranked[i].second;
  throw VocabularyError(msg);
}

struct InspectFlags {
  std::string model;
  std::string triple;
};

int cmd_inspect(const InspectFlags& f) {
  const Checkpoint ck = load_checkpoint(f.model);
  const auto& c = ck.config;
  std::cout << "qubits:          " << ck.store.n_qubits() << "\n"
            << "layers:          " << ck.store.entity_shape().n_layers << "/" << ck.store.relation_shape().n_layers
            << " (entity/relation)\n"
            << "angles/tensor:   " << ck.store.entity_shape().parameter_count() << "/"
            << ck.store.relation_shape().parameter_count() << "\n"
            << "entities:        " << ck.entities.size() << "\n"
            << "relations:       " << ck.relations.size() << "\n"
            << "learning rate:   " << c.learning_rate << "\n"
            << "epochs:          " << c.epochs << "\n"
            << "batch size:      " << c.batch_size << "\n"
            << "negatives:       " << c.negatives.k << " ("
            << (c.negatives.mode == NegativeMode::superposed ? "superposed" : "separate") << ")\n"
            << "seed:            " << c.seed << "\n";
  if (ck.history.empty()) {
    std::cout << "loss history:    (untrained)\n";
  } else {
    std::cout << "loss history:\n";
    for (const auto& e : ck.history) {
      std::cout << "  epoch " << e.epoch << "  loss " << fmt("%.6f", e.loss);
      if (e.valid_mrr) std::cout << "  valid MRR " << fmt("%.6f", *e.valid_mrr);
      std::cout << "\n";
    }
  }
  if (!f.triple.empty()) {
    std::istringstream in(f.triple);
    std::string h, r, t, extra;
    if (!(in >> h >> r >> t) || (in >> extra)) throw UsageError("--triple expects \"head relation tail\"");
    const double s = score_triple(ck.store, lookup(ck.entities, h, "entity"), lookup(ck.relations, r, "relation"),
                                  lookup(ck.entities, t, "entity"));
    std::cout << "score(" << h << ", " << r << ", " << t << ") = " << fmt("%.6f", s) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-circuit knowledge graph embeddings", "qkge"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train embeddings and write a checkpoint plus CSV loss log");
  add_model_flags(train_cmd, train_flags);
  train_cmd->add_option("--loss-log", train_flags.loss_log, "CSV loss log path (default: <out>.loss.csv)");
  train_cmd->add_flag("--no-validation", train_flags.no_validation, "Skip per-epoch validation MRR");

  TrainFlags init_flags;
  auto* init_cmd = app.add_subcommand("init", "Write a freshly initialized (untrained) checkpoint");
  add_model_flags(init_cmd, init_flags);

  EvalFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("eval", "Filtered link-prediction metrics for a checkpoint");
  eval_cmd->add_option("--model", eval_flags.model, "Checkpoint path")->required();
  eval_cmd->add_option("--data-dir", eval_flags.data_dir, "Dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--split", eval_flags.split, "valid or test")
      ->capture_default_str()
      ->check(CLI::IsMember({"valid", "test"}));
  eval_cmd->add_option("--mode", eval_flags.mode, "tail: tail corruption only; both: tails and heads")
      ->capture_default_str()
      ->check(CLI::IsMember({"tail", "both"}));
  eval_cmd->add_option("--json", eval_flags.json, "Also write metrics JSON here");
  eval_cmd->add_option("--threads", eval_flags.threads, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  InspectFlags inspect_flags;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print checkpoint contents");
  inspect_cmd->add_option("--model", inspect_flags.model, "Checkpoint path")->required();
  inspect_cmd->add_option("--triple", inspect_flags.triple, "\"head relation tail\" to score");

  try {
    auto args = expand_config({argv + 1, argv + argc});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) return cmd_train(train_flags);
    if (*init_cmd) return cmd_init(init_flags);
    if (*eval_cmd) return cmd_eval(eval_flags);
    if (*inspect_cmd) return cmd_inspect(inspect_flags);
  } catch (const qkge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
