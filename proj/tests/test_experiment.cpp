#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace wsd;

namespace {

ExperimentConfig quick(ModelVersion v) {
  ExperimentConfig c;
  c.version = v;
  c.glove_path = testutil::fixture("glove.fixture.100d.txt").string();
  c.gn_glove_path = testutil::fixture("gn_glove.fixture.100d.txt").string();
  c.shape.hidden = 4;
  c.shape.attention_dim = 4;
  c.epochs = 2;
  c.batch_size = 8;
  c.gbdt.n_trees = 4;
  c.logreg.epochs = 30;
  c.record_wallclock = false;
  c.seeds = {1, 2};
  return c;
}

SplitPair mini_split() {
  auto res = load_dataset(testutil::fixture("mini20.csv"));
  normalize_corpus(res.corpus, default_slang_map());
  return stratified_split(res.corpus, 0.8, 42);
}

std::vector<ExperimentConfig> quick_ladder() {
  std::vector<ExperimentConfig> out;
  for (const auto& e : kLadder) out.push_back(quick(e.version));
  return out;
}

}  // namespace

TEST(Experiment, RepeatedSeedGivesIdenticalRows) {
  const auto data = mini_split();
  EmbeddingCache cache;
  for (auto v : {ModelVersion::V1b, ModelVersion::V4b}) {
    auto c = quick(v);
    c.seeds = {5, 5};
    const auto rows = run_experiment(c, data, cache);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].precision, rows[1].precision);
    EXPECT_EQ(rows[0].recall, rows[1].recall);
    EXPECT_EQ(rows[0].f1, rows[1].f1);
    EXPECT_EQ(rows[3].seed, "std");
    EXPECT_EQ(rows[3].f1, 0.0);
  }
}

TEST(Experiment, LadderTableShape) {
  const auto data = mini_split();
  EmbeddingCache cache;
  auto configs = quick_ladder();
  std::reverse(configs.begin(), configs.end());
  const auto report = reproduce_table(configs, data, cache);
  std::vector<std::string> means;
  for (const auto& r : report.rows) {
    EXPECT_FALSE(r.failed) << r.model << ": " << r.error;
    EXPECT_GE(r.precision, 0.0);
    EXPECT_LE(r.precision, 1.0);
    EXPECT_GE(r.recall, 0.0);
    EXPECT_LE(r.recall, 1.0);
    EXPECT_GE(r.f1, 0.0);
    EXPECT_LE(r.f1, 1.0);
    if (r.seed == "mean") means.push_back(r.model);
    // Per-seed rows obey the harmonic identity.
    if (r.seed != "mean" && r.seed != "std" && r.precision + r.recall > 0) {
      EXPECT_NEAR(r.f1, 2 * r.precision * r.recall / (r.precision + r.recall), 1e-12);
    }
  }
  const std::vector<std::string> order = {"V1a", "V1b", "V2", "V3a", "V3b",
                                          "V3c", "V4a", "V4b", "V4c"};
  EXPECT_EQ(means, order);
  EXPECT_EQ(report.rows.size(), 9u * 4u);
}

TEST(Experiment, ReportsByteIdenticalAcrossRuns) {
  const auto data = mini_split();
  std::string text[2], jsonl[2];
  for (int run = 0; run < 2; ++run) {
    EmbeddingCache cache;
    auto report = reproduce_table(quick_ladder(), data, cache, nullptr, run == 0 ? 1 : 3);
    report.header.push_back("fixture");
    text[run] = report.to_text();
    jsonl[run] = report.to_jsonl();
  }
  EXPECT_EQ(text[0], text[1]);
  EXPECT_EQ(jsonl[0], jsonl[1]);
  EXPECT_EQ(text[0].rfind("# fixture\n", 0), 0u);
}

TEST(Experiment, FailedRowDoesNotAbortTheRest) {
  const auto data = mini_split();
  EmbeddingCache cache;
  auto bad = quick(ModelVersion::V3b);
  bad.glove_path = "/nonexistent/glove.txt";
  const auto report = reproduce_table({quick(ModelVersion::V1a), bad, quick(ModelVersion::V3a)},
                                      data, cache);
  ASSERT_EQ(report.rows.size(), 4u + 1u + 4u);
  const auto* failed = report.find("V3b", "mean");
  ASSERT_NE(failed, nullptr);
  EXPECT_TRUE(failed->failed);
  EXPECT_NE(failed->error.find("/nonexistent/glove.txt"), std::string::npos);
  EXPECT_NE(report.to_text().find("failed: "), std::string::npos);
  EXPECT_FALSE(report.find("V3a", "mean")->failed);
  EXPECT_FALSE(report.find("V1a", "mean")->failed);
}

TEST(Experiment, MeanRowAveragesSeeds) {
  const auto data = mini_split();
  EmbeddingCache cache;
  auto c = quick(ModelVersion::V3a);
  c.seeds = {1, 2, 3};
  const auto rows = run_experiment(c, data, cache);
  ASSERT_EQ(rows.size(), 5u);
  const auto ms = mean_std({rows[0].f1, rows[1].f1, rows[2].f1});
  EXPECT_DOUBLE_EQ(rows[3].f1, ms.mean);
  EXPECT_DOUBLE_EQ(rows[4].f1, ms.stddev);
}

TEST(Experiment, EmbeddingPathFromEnvironment) {
  auto c = quick(ModelVersion::V3b);
  c.glove_path = "glove.fixture.100d.txt";
  const auto dir = testutil::fixture("");
  ::setenv(kEmbeddingPathEnv, dir.string().c_str(), 1);
  EXPECT_EQ(std::filesystem::weakly_canonical(resolve_embedding_path(c.glove_path)),
            std::filesystem::weakly_canonical(testutil::fixture("glove.fixture.100d.txt")));
  ::unsetenv(kEmbeddingPathEnv);
}
