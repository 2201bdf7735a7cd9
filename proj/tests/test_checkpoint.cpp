#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace wsd;

namespace {

ExperimentConfig small_config(ModelVersion v) {
  ExperimentConfig c;
  c.version = v;
  c.glove_path = testutil::fixture("glove.fixture.100d.txt").string();
  c.gn_glove_path = testutil::fixture("gn_glove.fixture.100d.txt").string();
  c.shape.hidden = 6;
  c.shape.attention_dim = 5;
  c.epochs = 2;
  c.batch_size = 8;
  c.gbdt.n_trees = 5;
  c.logreg.epochs = 20;
  return c;
}

Corpus mini_corpus() {
  auto res = load_dataset(testutil::fixture("mini20.csv"));
  normalize_corpus(res.corpus, default_slang_map());
  return res.corpus;
}

}  // namespace

class CheckpointRoundTrip : public ::testing::TestWithParam<ModelVersion> {};

TEST_P(CheckpointRoundTrip, IdenticalPredictions) {
  const auto corpus = mini_corpus();
  EmbeddingCache cache;
  auto trained = train_classifier(small_config(GetParam()), corpus, {}, 3, cache);
  testutil::TempDir dir("ckpt");
  save_checkpoint(dir / "m.json", trained.classifier);
  const auto loaded = load_checkpoint(dir / "m.json");
  EXPECT_EQ(loaded.vocab.fingerprint(), trained.classifier.vocab.fingerprint());
  EXPECT_EQ(loaded.config.hash(), trained.classifier.config.hash());
  for (const auto& s : corpus.statements) {
    const auto a = trained.classifier.classify_tokens(s.tokens);
    const auto b = loaded.classify_tokens(s.tokens);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(a->probability, b->probability);
    EXPECT_EQ(a->label, b->label);
  }
  // Saving the loaded model reproduces the file byte for byte.
  save_checkpoint(dir / "again.json", loaded);
  EXPECT_EQ(testutil::read_file(dir / "m.json"), testutil::read_file(dir / "again.json"));
}

INSTANTIATE_TEST_SUITE_P(Kinds, CheckpointRoundTrip,
                         ::testing::Values(ModelVersion::V1a, ModelVersion::V1b, ModelVersion::V2,
                                           ModelVersion::V3c, ModelVersion::V4a),
                         [](const auto& info) { return std::string(ladder_entry(info.param).id); });

TEST(Checkpoint, VocabularyHashMismatch) {
  EmbeddingCache cache;
  auto trained = train_classifier(small_config(ModelVersion::V1a), mini_corpus(), {}, 1, cache);
  auto j = checkpoint_to_json(trained.classifier);
  j["vocab"]["tokens"][0] = "tampered";
  try {
    checkpoint_from_json(j);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("hash mismatch"), std::string::npos);
  }
}

TEST(Checkpoint, MalformedFiles) {
  testutil::TempDir dir("ckpt-bad");
  EXPECT_THROW(load_checkpoint(dir / "missing.json"), InputError);
  testutil::write_file(dir / "trunc.json", "{\"format\": \"wsd-check");
  EXPECT_THROW(load_checkpoint(dir / "trunc.json"), InputError);
  testutil::write_file(dir / "other.json", "{\"format\": \"something\"}");
  EXPECT_THROW(load_checkpoint(dir / "other.json"), InputError);
  testutil::write_file(dir / "partial.json", "{\"format\": \"wsd-checkpoint\", \"format_version\": 1}");
  EXPECT_THROW(load_checkpoint(dir / "partial.json"), InputError);
}

TEST(Checkpoint, TensorShapeMismatch) {
  EmbeddingCache cache;
  auto trained = train_classifier(small_config(ModelVersion::V3a), mini_corpus(), {}, 1, cache);
  auto j = checkpoint_to_json(trained.classifier);
  j["tensors"][1]["data"].erase(0);
  EXPECT_THROW(checkpoint_from_json(j), InputError);
}
