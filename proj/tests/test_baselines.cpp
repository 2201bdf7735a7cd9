#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace wsd;
using namespace wsd::baselines;

namespace {

struct Toy {
  Vocabulary vocab;
  EmbeddingMatrix matrix;
};

Toy dim2_toy() {
  Toy t;
  for (const char* w : {"a", "b", "c", "d"}) t.vocab.add(w, 1);
  t.matrix.rows = RowMatrix::Zero(6, 2);
  t.matrix.rows.row(kOovIndex) << 0.5, 0.5;
  t.matrix.rows.row(2) << 1.0, 2.0;
  t.matrix.rows.row(3) << -1.0, -2.0;
  t.matrix.rows.row(4) << 3.0, 0.0;
  t.matrix.rows.row(5) << 2.0, 4.0;
  return t;
}

Vector v1(double x) { return (Vector(1) << x).finished(); }
Vector v2(double x, double y) { return (Vector(2) << x, y).finished(); }

double accuracy(const std::vector<double>& probs, const std::vector<int>& y) {
  double hit = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hit += ((probs[i] >= 0.5) == (y[i] == 1));
  return hit / static_cast<double>(y.size());
}

}  // namespace

TEST(MeanEmbedding, Cases) {
  const auto t = dim2_toy();
  EXPECT_EQ(mean_embedding({"a"}, t.vocab, t.matrix), v2(1.0, 2.0));
  EXPECT_EQ(mean_embedding({"a", "b"}, t.vocab, t.matrix), v2(0.0, 0.0));
  // (1,2) + (3,0) + (2,4) = (6,6) over 3 tokens.
  EXPECT_TRUE(mean_embedding({"a", "c", "d"}, t.vocab, t.matrix).isApprox(v2(2.0, 2.0)));
  EXPECT_EQ(mean_embedding({}, t.vocab, t.matrix), v2(0.0, 0.0));
  EXPECT_EQ(mean_embedding({"zzz"}, t.vocab, t.matrix), v2(0.5, 0.5));
}

TEST(MeanEmbedding, PermutationInvariant) {
  const auto t = dim2_toy();
  Tokens toks = {"a", "c", "zzz", "d", "b", "a"};
  const Vector base = mean_embedding(toks, t.vocab, t.matrix);
  std::sort(toks.begin(), toks.end());
  do {
    ASSERT_TRUE(mean_embedding(toks, t.vocab, t.matrix).isApprox(base, 1e-15));
  } while (std::next_permutation(toks.begin(), toks.end()));
}

TEST(LogReg, SinglePositiveMonotone) {
  LogRegOptions opt;
  opt.l2 = 0.0;
  double prev = 0.0;
  for (std::size_t epochs : {1u, 5u, 20u, 100u, 400u, 3000u}) {
    opt.epochs = epochs;
    const double p = logreg_fit({v1(1.0)}, {1}, opt).model.predict(v1(1.0));
    EXPECT_GT(p, prev);
    prev = p;
  }
  EXPECT_GT(prev, 0.99);
}

TEST(LogReg, SeparableOneDimensional) {
  std::vector<Vector> x = {v1(-1), v1(-1.2), v1(-0.8), v1(1), v1(1.2), v1(0.8)};
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  auto fit = logreg_fit(x, y);
  std::vector<double> probs;
  for (double q : {-1.0, -0.5, 0.5, 1.0}) probs.push_back(fit.model.predict(v1(q)));
  EXPECT_EQ(accuracy(probs, {0, 0, 1, 1}), 1.0);
}

TEST(LogReg, ConstantLabelsStayFinite) {
  std::vector<Vector> x = {v2(1, 2), v2(-1, 0.5), v2(3, 3)};
  LogRegOptions opt;
  opt.l2 = 0.1;
  opt.epochs = 5000;
  auto fit = logreg_fit(x, {1, 1, 1}, opt);
  EXPECT_TRUE(fit.model.w.allFinite());
  EXPECT_TRUE(std::isfinite(fit.model.b));
}

TEST(LogReg, EmptyIsError) { EXPECT_THROW(logreg_fit({}, {}), InputError); }

TEST(LogReg, LossNonIncreasingWithSmallStep) {
  auto res = load_dataset(testutil::fixture("statements.csv"));
  normalize_corpus(res.corpus, default_slang_map());
  auto vocab = build_vocab(res.corpus, 1);
  auto table = parse_embedding_file(testutil::fixture("glove.fixture.100d.txt"));
  auto m = build_matrix(vocab, &table, 100, EmbeddingMode::Glove, 1);
  std::vector<Vector> x;
  std::vector<int> y;
  for (const auto& s : res.corpus.statements) {
    x.push_back(mean_embedding(s.tokens, vocab, m));
    y.push_back(s.label);
  }
  LogRegOptions opt;
  opt.lr = 1e-3;
  opt.epochs = 300;
  auto fit = logreg_fit(x, y, opt);
  for (std::size_t k = 1; k < fit.loss_history.size(); ++k)
    ASSERT_LE(fit.loss_history[k], fit.loss_history[k - 1]) << k;
}

TEST(Gbdt, RejectsBadOptions) {
  GbdtOptions opt;
  opt.n_trees = 0;
  EXPECT_THROW(gbdt_fit({v1(0)}, {1}, opt), InputError);
  opt.n_trees = 1;
  opt.max_depth = 0;
  EXPECT_THROW(gbdt_fit({v1(0)}, {1}, opt), InputError);
}

TEST(Gbdt, StumpRecoversThreshold) {
  std::vector<Vector> x = {v1(-3), v1(-2), v1(-0.5), v1(0.5), v1(1), v1(4)};
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  GbdtOptions opt;
  opt.n_trees = 1;
  opt.max_depth = 1;
  auto m = gbdt_fit(x, y, opt);
  ASSERT_EQ(m.trees.size(), 1u);
  const auto& root = m.trees[0].nodes[0];
  ASSERT_FALSE(root.is_leaf());
  EXPECT_EQ(root.feature, 0);
  EXPECT_GT(root.threshold, -0.5);
  EXPECT_LT(root.threshold, 0.5);
  EXPECT_EQ(m.trees[0].depth(), 1);
  EXPECT_EQ(m.trees[0].nodes.size(), 3u);
  // Opposite sides of the split land on opposite sides of 0.5.
  EXPECT_LT(gbdt_predict(m, v1(-1)), 0.5);
  EXPECT_GT(gbdt_predict(m, v1(1)), 0.5);
  EXPECT_EQ(gbdt_predict(m, v1(1)), gbdt_predict(m, v1(1)));
}

TEST(Gbdt, ConstantLabels) {
  std::vector<Vector> x = {v2(0, 1), v2(1, 0), v2(2, 2), v2(-1, 3)};
  auto m = gbdt_fit(x, {1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(m.base_score, clamped_logit(1.0));
  EXPECT_NEAR(m.base_score, std::log((1 - 1e-7) / 1e-7), 1e-6);
  const double prior = nn::sigmoid(m.base_score);
  for (const auto& xi : x) EXPECT_NEAR(gbdt_predict(m, xi), prior, 1e-6);
}

TEST(Gbdt, ZeroTreesIsSigmoidOfBase) {
  GbdtModel m;
  m.base_score = 0.3;
  EXPECT_EQ(gbdt_predict(m, v1(5)), nn::sigmoid(0.3));
}

TEST(Gbdt, XorBeatsLogisticRegression) {
  std::vector<Vector> x = {v2(0, 0), v2(0, 1), v2(1, 0), v2(1, 1)};
  std::vector<int> y = {0, 1, 1, 0};
  GbdtOptions opt;
  opt.n_trees = 50;
  opt.max_depth = 2;
  auto m = gbdt_fit(x, y, opt);
  std::vector<double> pg, pl;
  auto lr = logreg_fit(x, y);
  for (const auto& xi : x) {
    pg.push_back(gbdt_predict(m, xi));
    pl.push_back(lr.model.predict(xi));
  }
  EXPECT_EQ(accuracy(pg, y), 1.0);
  EXPECT_EQ(accuracy(pl, y), 0.5);
  for (const auto& t : m.trees) EXPECT_LE(t.depth(), 2);
}

TEST(Gbdt, TrainingLossNonIncreasingPerTree) {
  Rng rng(3);
  std::vector<Vector> x;
  std::vector<int> y;
  for (int i = 0; i < 80; ++i) {
    Vector v(3);
    for (int k = 0; k < 3; ++k) v(k) = rng.uniform(-1, 1);
    x.push_back(v);
    y.push_back(v(0) * v(1) + 0.3 * v(2) + rng.uniform(-0.2, 0.2) > 0 ? 1 : 0);
  }
  GbdtOptions opt;
  opt.n_trees = 40;
  auto m = gbdt_fit(x, y, opt);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t <= m.trees.size(); ++t) {
    GbdtModel partial = m;
    partial.trees.resize(t);
    const double l = gbdt_training_loss(partial, x, y);
    ASSERT_LE(l, prev + 1e-12) << t;
    prev = l;
  }
  for (const auto& t : m.trees) {
    EXPECT_LE(t.depth(), opt.max_depth);
    for (const auto& nd : t.nodes) EXPECT_TRUE(std::isfinite(nd.value));
  }
}
