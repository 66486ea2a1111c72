// Drives the qkge binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QKGE_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "qkge_cli_test";
    fs::create_directories(dir_);
  }
  static fs::path dir_;
  const std::string data_ = std::string("--data-dir ") + QKGE_DATA_DIR;
};
fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, TrainEvalInspect) {
  const auto model = dir_ / "m.json";
  const auto r = run("train " + data_ + " --epochs 1 --threads 1 --out " + model.string());
  ASSERT_EQ(r.code, 0) << r.out;

  const auto ck = nlohmann::json::parse(slurp(model));
  EXPECT_EQ(ck["entity_params"].size(), 135u);
  EXPECT_EQ(ck["relation_params"].size(), 46u);
  EXPECT_EQ(ck["entity_params"][0].size(), 12u);
  EXPECT_EQ(ck["relation_params"][45].size(), 12u);

  const std::string log = slurp(model.string() + ".loss.csv");
  EXPECT_EQ(log.rfind("epoch,loss,val_mrr\n1,", 0), 0u) << log;

  const auto json = dir_ / "metrics.json";
  const auto e = run("eval --model " + model.string() + " " + data_ + " --split valid --json " + json.string());
  ASSERT_EQ(e.code, 0) << e.out;
  const auto metrics = nlohmann::json::parse(slurp(json));
  EXPECT_EQ(metrics["n_triples"], 652);
  EXPECT_EQ(metrics["split"], "valid");
  EXPECT_EQ(metrics["mode"], "tail");
  EXPECT_NE(e.out.find("%"), std::string::npos);

  const auto i = run("inspect --model " + model.string() + " --triple \"alga isa entity\"");
  ASSERT_EQ(i.code, 0) << i.out;
  EXPECT_NE(i.out.find("qubits:          2"), std::string::npos) << i.out;
  EXPECT_NE(i.out.find("entities:        135"), std::string::npos);
  EXPECT_NE(i.out.find("relations:       46"), std::string::npos);
  EXPECT_NE(i.out.find("score(alga, isa, entity) = 0."), std::string::npos) << i.out;
}

TEST_F(Cli, EvalIsByteStableAcrossSaveAndThreads) {
  const auto model = dir_ / "stable.json";
  ASSERT_EQ(run("init " + data_ + " --out " + model.string()).code, 0);
  const auto a = dir_ / "a.json", b = dir_ / "b.json";
  ASSERT_EQ(run("eval --model " + model.string() + " " + data_ + " --mode both --threads 1 --json " + a.string()).code, 0);
  ASSERT_EQ(run("eval --model " + model.string() + " " + data_ + " --mode both --threads 3 --json " + b.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(Cli, QubitsFlagSetsTensorSize) {
  const auto model = dir_ / "q4.json";
  ASSERT_EQ(run("init " + data_ + " --qubits 4 --out " + model.string()).code, 0);
  const auto ck = nlohmann::json::parse(slurp(model));
  EXPECT_EQ(ck["entity_params"][0].size(), 24u);
  EXPECT_EQ(ck["relation_params"][0].size(), 24u);
}

TEST_F(Cli, ConfigFileWithFlagPrecedence) {
  const auto cfg = dir_ / "run.ini";
  std::ofstream(cfg) << "qubits=3\nentity-layers=1\n";
  const auto model = dir_ / "cfg.json";
  ASSERT_EQ(run("init " + data_ + " --config " + cfg.string() + " --entity-layers 2 --out " + model.string()).code, 0);
  const auto ck = nlohmann::json::parse(slurp(model));
  EXPECT_EQ(ck["entity_shape"]["n_qubits"], 3);
  EXPECT_EQ(ck["entity_shape"]["n_layers"], 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("train " + data_ + " --negatives 0").code, 1);
  EXPECT_EQ(run("train --data-dir /nonexistent/dir").code, 1);
  EXPECT_EQ(run("train " + data_ + " --batch-size 100000 --out " + (dir_ / "x.json").string()).code, 1);
  EXPECT_EQ(run("eval --model m.json").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST_F(Cli, IntegrityErrors) {
  const auto bad = dir_ / "corrupt.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run("inspect --model " + bad.string()).code, 2);

  // A checkpoint built on another vocabulary.
  const auto other = dir_ / "other_data";
  fs::create_directories(other);
  std::ofstream(other / "train.txt") << "a\tr\tb\nb\tr\tc\n";
  std::ofstream(other / "valid.txt") << "a\tr\tc\n";
  const auto model = dir_ / "other.json";
  ASSERT_EQ(run("init --data-dir " + other.string() + " --batch-size 1 --out " + model.string()).code, 0);
  EXPECT_EQ(run("eval --model " + model.string() + " " + data_).code, 2);
}

TEST_F(Cli, UnknownTripleSymbolSuggestsNearest) {
  const auto model = dir_ / "lookup.json";
  ASSERT_EQ(run("init " + data_ + " --out " + model.string()).code, 0);
  const auto r = run("inspect --model " + model.string() + " --triple \"algae isa entity\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("nearest: alga"), std::string::npos) << r.out;
}
