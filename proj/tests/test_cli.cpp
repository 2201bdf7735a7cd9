#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>

#include "test_util.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr interleaved
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run run_cli(const std::vector<std::string>& args, const std::string& stdin_file = "") {
  std::string cmd = quote(WSD_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  if (!stdin_file.empty()) cmd += " < " + quote(stdin_file);
  cmd += " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// The fixture corpus prepared once for the whole suite.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testutil::TempDir("cli");
    const auto r = run_cli({"prepare", "--data", testutil::fixture("statements.csv").string(),
                        "--out-dir", split().string()});
    ASSERT_EQ(r.code, 0) << r.out;
    prepare_out_ = new std::string(r.out);
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete prepare_out_;
  }
  static std::filesystem::path split() { return dir_->path() / "split"; }
  static std::filesystem::path path(const std::string& name) { return dir_->path() / name; }

  static std::filesystem::path toy_config(const std::string& body) {
    static int n = 0;
    const auto p = path("toy" + std::to_string(n++) + ".cfg");
    testutil::write_file(p, body);
    return p;
  }

  static inline testutil::TempDir* dir_ = nullptr;
  static inline std::string* prepare_out_ = nullptr;
};

}  // namespace

TEST_F(Cli, PrepareReportsDedupAndRefusesOverwrite) {
  EXPECT_TRUE(contains(*prepare_out_, "duplicates dropped: 6")) << *prepare_out_;
  EXPECT_TRUE(std::filesystem::exists(split() / "train.csv"));
  EXPECT_TRUE(std::filesystem::exists(split() / "test.csv"));
  EXPECT_TRUE(std::filesystem::exists(split() / "stats.json"));
  const auto again = run_cli({"prepare", "--data", testutil::fixture("statements.csv").string(),
                          "--out-dir", split().string()});
  EXPECT_EQ(again.code, 1) << again.out;
  EXPECT_TRUE(contains(again.out, "--force")) << again.out;
}

TEST_F(Cli, PrepareIsDeterministic) {
  const auto other = path("split2");
  const auto r = run_cli({"prepare", "--data", testutil::fixture("statements.csv").string(),
                      "--out-dir", other.string()});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(testutil::read_file(other / "train.csv"), testutil::read_file(split() / "train.csv"));
  EXPECT_EQ(testutil::read_file(other / "test.csv"), testutil::read_file(split() / "test.csv"));
}

TEST_F(Cli, BadRowsAreUserErrors) {
  const auto bad = path("bad.csv");
  testutil::write_file(bad, "text,label\nfine,1\noops,maybe\n");
  const auto r = run_cli({"prepare", "--data", bad.string(), "--out-dir", path("bad-out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "row 2")) << r.out;
}

TEST_F(Cli, TrainEvalClassifyRoundTrip) {
  const auto cfg = toy_config("version = \"V3a\"\nepochs = 3\nhidden = 8\n");
  const auto model = path("v3a.json").string();
  const auto t = run_cli({"train", "--config", cfg.string(), "--train-csv",
                      (split() / "train.csv").string(), "--out-model", model, "--vocab-from",
                      (split() / "test.csv").string()});
  ASSERT_EQ(t.code, 0) << t.out;
  EXPECT_TRUE(contains(t.out, "final loss: ")) << t.out;
  const auto sidecar = testutil::read_file(model + ".loss.tsv");
  EXPECT_EQ(sidecar.rfind("step\tloss\n", 0), 0u);

  const auto e = run_cli({"eval", "--model", model, "--test-csv", (split() / "test.csv").string(),
                      "--out-json", path("scores.json").string()});
  ASSERT_EQ(e.code, 0) << e.out;
  const auto scores = nlohmann::json::parse(testutil::read_file(path("scores.json")));
  EXPECT_GE(scores.at("f1").get<double>(), 0.0);
  EXPECT_LE(scores.at("f1").get<double>(), 1.0);

  // Same statement twice, then one that normalizes to nothing.
  const auto in = path("stdin.txt");
  testutil::write_file(in, "Women should stay at home\nWomen should stay at home\n@someone http://example.com/x\n");
  const auto c = run_cli({"classify", "--model", model, "--stdin"}, in.string());
  ASSERT_EQ(c.code, 0) << c.out;
  std::istringstream lines(c.out);
  std::string a, b, skip;
  std::getline(lines, a);
  std::getline(lines, b);
  std::getline(lines, skip);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.find('\t') == 6u) << a;
  EXPECT_EQ(skip, "skip");

  // The checkpoint alone reproduces what eval saw.
  const auto again = run_cli({"classify", "--model", model, "--text", "Women should stay at home"});
  EXPECT_EQ(again.out, a + "\n");
}

TEST_F(Cli, MissingEmbeddingFileNamesThePath) {
  const auto cfg = toy_config("version = \"V3b\"\nepochs = 1\n");
  const auto r = run_cli({"train", "--config", cfg.string(), "--train-csv",
                      (split() / "train.csv").string(), "--out-model", path("x.json").string(),
                      "--embeddings", "/no/such/glove.100d.txt"});
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_TRUE(contains(r.out, "/no/such/glove.100d.txt")) << r.out;
}

TEST_F(Cli, DivergentLearningRateIsInternalError) {
  const auto cfg = toy_config("version = \"V3a\"\nepochs = 2\nhidden = 8\n");
  const auto r = run_cli({"train", "--config", cfg.string(), "--train-csv",
                      (split() / "train.csv").string(), "--out-model", path("nan.json").string(),
                      "--set", "lr=1e200"});
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_TRUE(contains(r.out, "non-finite loss at epoch 1, batch")) << r.out;
}

TEST_F(Cli, UnknownFlagAndBadConfigAreUserErrors) {
  EXPECT_EQ(run_cli({"train", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
  const auto cfg = toy_config("version = \"V3a\"\nwidth = 3\n");
  const auto r = run_cli({"train", "--config", cfg.string(), "--train-csv",
                      (split() / "train.csv").string(), "--out-model", path("y.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "width")) << r.out;
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(Cli, TrainedAttentionModelLabelsNeutralSentence) {
  const auto cfg = toy_config("version = \"V4b\"\n");
  const auto model = path("v4b.json").string();
  const auto t = run_cli({"train", "--config", cfg.string(), "--train-csv",
                      (split() / "train.csv").string(), "--out-model", model, "--vocab-from",
                      (split() / "test.csv").string(), "--embeddings",
                      testutil::fixture("glove.fixture.100d.txt").string()});
  ASSERT_EQ(t.code, 0) << t.out;
  const auto c = run_cli({"classify", "--model", model, "--text",
                      "The Belgian bar near the end of the road was a great spot to go after work"});
  ASSERT_EQ(c.code, 0) << c.out;
  EXPECT_TRUE(c.out.size() > 7 && c.out.substr(7) == "0\n") << c.out;
}

TEST_F(Cli, BenchWritesBothReports) {
  const auto set = toy_config(
      "versions = \"V1a, V3a\"\nepochs = 1\nhidden = 4\nlogreg_epochs = 10\n"
      "glove_path = \"" + testutil::fixture("glove.fixture.100d.txt").string() + "\"\n");
  const auto report = path("bench").string();
  const auto r = run_cli({"bench", "--config-set", set.string(), "--data-dir", split().string(),
                      "--out-report", report, "--seeds", "1,2", "--no-timing", "--quiet",
                      "--note", "toy run"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto text = testutil::read_file(report + ".txt");
  EXPECT_TRUE(contains(text, "# toy run")) << text;
  EXPECT_TRUE(contains(text, "V1a")) << text;
  EXPECT_TRUE(contains(text, "V3a")) << text;
  std::istringstream jl(testutil::read_file(report + ".jsonl"));
  std::size_t rows = 0;
  for (std::string line; std::getline(jl, line);) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("f1"));
    ++rows;
  }
  EXPECT_EQ(rows, 2u * 4u);
}
