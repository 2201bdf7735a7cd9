#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "test_util.hpp"

using namespace wsd;
using testutil::TempDir;
using testutil::write_file;

namespace {

Tokens norm(std::string_view s) { return normalize_statement(s, default_slang_map()); }

Corpus load_fixture_corpus() {
  auto res = load_dataset(testutil::fixture("statements.csv"));
  EXPECT_EQ(res.rejected, 0u);
  normalize_corpus(res.corpus, default_slang_map());
  return deduplicate(res.corpus).corpus;
}

}  // namespace

TEST(Csv, QuotedFieldsAndEmbeddedNewlines) {
  std::istringstream in("\xEF\xBB\xBFtext,label\r\n\"a, \"\"quoted\"\"\nline\",1\r\nplain,0\n");
  auto recs = csv::read_all(in);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].fields, (std::vector<std::string>{"text", "label"}));
  EXPECT_EQ(recs[1].fields[0], "a, \"quoted\"\nline");
  EXPECT_EQ(recs[2].fields, (std::vector<std::string>{"plain", "0"}));
  EXPECT_EQ(recs[2].line, 4u);

  std::ostringstream out;
  csv::write_record(out, recs[1].fields);
  std::istringstream back(out.str());
  EXPECT_EQ(csv::read_all(back)[0].fields, recs[1].fields);
}

TEST(Normalize, ExampleSentence) {
  EXPECT_EQ(norm("Women always get more upset than men."),
            (Tokens{"women", "always", "get", "more", "upset", "than", "men", "."}));
}

TEST(Normalize, EmptyInput) { EXPECT_TRUE(norm("").empty()); }

TEST(Normalize, SlangAndFinalHashtag) {
  EXPECT_EQ(norm("u rock #winning"), (Tokens{"you", "rock"}));
}

TEST(Normalize, InternalHashtagKeepsWord) {
  EXPECT_EQ(norm("#Women in tech rock"), (Tokens{"women", "in", "tech", "rock"}));
  EXPECT_EQ(norm("I love #MondayMotivation at work!"),
            (Tokens{"i", "love", "mondaymotivation", "at", "work", "!"}));
}

TEST(Normalize, TrailingRunOfHashtagsDropped) {
  EXPECT_EQ(norm("great meeting today. #team #work"),
            (Tokens{"great", "meeting", "today", "."}));
}

TEST(Normalize, UrlsAndMentionsRemoved) {
  EXPECT_EQ(norm("@boss see https://t.co/abc and www.example.com now"),
            (Tokens{"see", "and", "now"}));
}

TEST(Normalize, TerminalPunctuationSplit) {
  EXPECT_EQ(norm("Really?! yes, really."),
            (Tokens{"really", "?", "!", "yes", ",", "really", "."}));
  EXPECT_EQ(norm("it's  fine   "), (Tokens{"it's", "fine"}));
}

TEST(Normalize, OutputInvariants) {
  for (const auto& s : load_fixture_corpus().statements) {
    ASSERT_FALSE(s.tokens.empty());
    for (const auto& t : s.tokens) {
      EXPECT_EQ(t.find('#'), std::string::npos) << s.raw_text;
      EXPECT_EQ(t.find('@'), std::string::npos) << s.raw_text;
      EXPECT_EQ(t.rfind("http", 0), std::string::npos) << s.raw_text;
      for (char c : t) EXPECT_FALSE(c >= 'A' && c <= 'Z') << s.raw_text;
    }
  }
}

// Property: normalizing the joined tokens again is a fixed point.
TEST(Normalize, IdempotentOnFixtureCorpus) {
  auto res = load_dataset(testutil::fixture("statements.csv"));
  for (const auto& s : res.corpus.statements) {
    const auto once = norm(s.raw_text);
    EXPECT_EQ(norm(join_tokens(once)), once) << s.raw_text;
  }
}

TEST(Normalize, IdempotentOnGeneratedStrings) {
  const std::vector<std::string> parts = {"U", "r", "#Tag", "@who", "http://x.y", "word.",
                                          "\"quoted\"", "(aside)", "end!", "#", "??", "Im",
                                          "'single'", "gonna", "don't", ",", "#final"};
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const auto n = rng.below(9);
    for (std::uint64_t k = 0; k < n; ++k) {
      s += parts[rng.below(parts.size())];
      s += rng.below(3) == 0 ? "  " : " ";
    }
    const auto once = norm(s);
    EXPECT_EQ(norm(join_tokens(once)), once) << s;
  }
}

TEST(SlangMap, FileMatchesBuiltIn) {
  EXPECT_EQ(load_slang_map(testutil::source_dir() / "data" / "slang_map.tsv"), default_slang_map());
}

TEST(SlangMap, MalformedLineNamed) {
  TempDir tmp("slang");
  write_file(tmp / "s.tsv", "# c\nu\tyou\nbroken\n");
  try {
    load_slang_map(tmp / "s.tsv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LoadDataset, SingleRow) {
  TempDir tmp("load");
  write_file(tmp / "d.csv", "text,label\n\"No mountain is high enough for a girl to climb.\",0\n");
  auto res = load_dataset(tmp / "d.csv");
  ASSERT_EQ(res.corpus.size(), 1u);
  EXPECT_EQ(res.corpus.statements[0].label, 0);
  EXPECT_EQ(res.corpus.statements[0].raw_text, "No mountain is high enough for a girl to climb.");
}

TEST(LoadDataset, HeaderOnlyIsEmptyDataset) {
  TempDir tmp("load");
  write_file(tmp / "d.csv", "text,label\n");
  try {
    load_dataset(tmp / "d.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("empty dataset"), std::string::npos);
  }
}

TEST(LoadDataset, ZeroByteFileAndMissingFile) {
  TempDir tmp("load");
  write_file(tmp / "d.csv", "");
  EXPECT_THROW(load_dataset(tmp / "d.csv"), InputError);
  EXPECT_THROW(load_dataset(tmp / "missing.csv"), InputError);
}

TEST(LoadDataset, MissingColumn) {
  TempDir tmp("load");
  write_file(tmp / "d.csv", "body,label\nhello,1\n");
  EXPECT_THROW(load_dataset(tmp / "d.csv"), InputError);
}

TEST(LoadDataset, BadLabelRowRejected) {
  TempDir tmp("load");
  write_file(tmp / "d.csv", "text,label\nfirst,1\nsecond,2\nthird,0\n");
  auto res = load_dataset(tmp / "d.csv");
  EXPECT_EQ(res.corpus.size(), 2u);
  EXPECT_EQ(res.rejected, 1u);
  ASSERT_EQ(res.diagnostics.size(), 1u);
  EXPECT_NE(res.diagnostics[0].find("row 2"), std::string::npos) << res.diagnostics[0];
  EXPECT_EQ(res.corpus.statements[1].raw_text, "third");
}

TEST(LoadDataset, RawTextByteExactAndCustomSchema) {
  TempDir tmp("load");
  const std::string text = "  Caf\xC3\xA9 \"du\" monde  ";
  write_file(tmp / "d.csv", "id,sentence,y\n7,\"  Caf\xC3\xA9 \"\"du\"\" monde  \",1\n");
  Schema schema;
  schema.text_column = "sentence";
  schema.label_column = "y";
  auto res = load_dataset(tmp / "d.csv", schema);
  ASSERT_EQ(res.corpus.size(), 1u);
  EXPECT_EQ(res.corpus.statements[0].raw_text, text);
}

TEST(LoadDataset, Jsonl) {
  TempDir tmp("load");
  write_file(tmp / "d.jsonl",
             "{\"text\": \"Women always get more upset than men.\", \"label\": 1}\n"
             "{\"text\": \"fine\", \"label\": 3}\n"
             "{\"text\": \"ok\", \"label\": \"0\"}\n");
  auto res = load_dataset(tmp / "d.jsonl");
  EXPECT_EQ(res.corpus.size(), 2u);
  EXPECT_EQ(res.rejected, 1u);
}

TEST(Deduplicate, DropsLaterCopies) {
  auto c = testutil::corpus_of({{"Women always get more upset", 1},
                                {"the report is due", 0},
                                {"WOMEN always get more upset #mkr", 1},
                                {"#Women always get more upset", 1}});
  auto d = deduplicate(c);
  EXPECT_EQ(d.dropped, 2u);
  ASSERT_EQ(d.corpus.size(), 2u);
  EXPECT_EQ(d.corpus.statements[0].raw_text, "Women always get more upset");
  EXPECT_EQ(d.corpus.statements[1].raw_text, "the report is due");
}

TEST(Deduplicate, DistinctRowsUnchangedAndIdempotent) {
  auto c = testutil::corpus_of({{"a b", 1}, {"b a", 0}, {"c", 1}});
  auto once = deduplicate(c);
  EXPECT_EQ(once.dropped, 0u);
  EXPECT_EQ(once.corpus.size(), 3u);
  auto twice = deduplicate(once.corpus);
  EXPECT_EQ(twice.dropped, 0u);
  ASSERT_EQ(twice.corpus.size(), once.corpus.size());
  for (std::size_t i = 0; i < once.corpus.size(); ++i)
    EXPECT_EQ(twice.corpus.statements[i].tokens, once.corpus.statements[i].tokens);
}

TEST(Deduplicate, FixtureHasDecoratedDuplicates) {
  auto res = load_dataset(testutil::fixture("statements.csv"));
  normalize_corpus(res.corpus, default_slang_map());
  auto d = deduplicate(res.corpus);
  EXPECT_GT(d.dropped, 0u);
  EXPECT_EQ(d.corpus.size(), 200u);
  EXPECT_EQ(deduplicate(d.corpus).dropped, 0u);
}

TEST(ClassBalance, Cases) {
  auto half = testutil::corpus_of({{"a", 1}, {"b", 1}, {"c", 0}, {"d", 0}});
  EXPECT_EQ(class_balance(half), (std::pair<double, double>{0.5, 0.5}));
  auto all = testutil::corpus_of({{"a", 1}, {"b", 1}, {"c", 1}});
  EXPECT_EQ(class_balance(all), (std::pair<double, double>{1.0, 0.0}));
  EXPECT_THROW(class_balance(Corpus{}), InputError);
  const auto [pos, neg] = class_balance(load_fixture_corpus());
  EXPECT_NEAR(pos + neg, 1.0, 1e-12);
  EXPECT_NEAR(pos, 0.55, 1e-12);
}

namespace {
Corpus ten_statements() {
  std::vector<std::pair<std::string, int>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({"statement number " + std::to_string(i), i % 2});
  return testutil::corpus_of(rows);
}
}  // namespace

TEST(StratifiedSplit, TenStatements) {
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 12345ull}) {
    auto s = stratified_split(ten_statements(), 0.8, seed);
    EXPECT_EQ(s.train.size(), 8u);
    ASSERT_EQ(s.test.size(), 2u);
    EXPECT_EQ(s.test.count_label(0), 1u);
    EXPECT_EQ(s.test.count_label(1), 1u);
  }
}

TEST(StratifiedSplit, Deterministic) {
  auto a = stratified_split(load_fixture_corpus(), 0.8, 42);
  auto b = stratified_split(load_fixture_corpus(), 0.8, 42);
  ASSERT_EQ(a.test.size(), b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i)
    EXPECT_EQ(a.test.statements[i].raw_text, b.test.statements[i].raw_text);
  auto c = stratified_split(load_fixture_corpus(), 0.8, 43);
  bool differs = false;
  for (std::size_t i = 0; i < a.test.size(); ++i)
    differs |= a.test.statements[i].raw_text != c.test.statements[i].raw_text;
  EXPECT_TRUE(differs);
}

TEST(StratifiedSplit, Preconditions) {
  auto one_class = testutil::corpus_of({{"a", 1}, {"b", 1}, {"c", 1}});
  EXPECT_THROW(stratified_split(one_class, 0.8, 1), InputError);
  auto singleton = testutil::corpus_of({{"a", 1}, {"b", 1}, {"c", 0}});
  EXPECT_THROW(stratified_split(singleton, 0.8, 1), InputError);
  EXPECT_THROW(stratified_split(ten_statements(), 1.0, 1), InputError);
  EXPECT_THROW(stratified_split(ten_statements(), 0.0, 1), InputError);
  auto dup = testutil::corpus_of({{"a", 1}, {"A", 1}, {"b", 0}, {"c", 0}});
  EXPECT_THROW(stratified_split(dup, 0.5, 1), InputError);
}

// Property: partition, disjointness and stratification over many seeds.
TEST(StratifiedSplit, PartitionAndStratificationProperty) {
  const auto corpus = load_fixture_corpus();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto s = stratified_split(corpus, 0.8, seed);
    ASSERT_EQ(s.train.size() + s.test.size(), corpus.size());
    std::set<std::string> train_keys;
    for (const auto& st : s.train.statements) train_keys.insert(token_key(st.tokens));
    for (const auto& st : s.test.statements) ASSERT_FALSE(train_keys.count(token_key(st.tokens)));
    const double pt = class_balance(s.train).first, pe = class_balance(s.test).first;
    ASSERT_LE(std::abs(pt - pe), 0.02) << "seed " << seed;
  }
}

TEST(WriteSplit, RoundTripsWithNormalizedColumn) {
  TempDir tmp("split");
  auto res = load_dataset(testutil::fixture("mini20.csv"));
  normalize_corpus(res.corpus, default_slang_map());
  write_split_csv(tmp / "out.csv", res.corpus);
  auto back = load_dataset(tmp / "out.csv");
  ASSERT_EQ(back.corpus.size(), res.corpus.size());
  EXPECT_EQ(back.corpus.columns.back(), "normalized");
  for (std::size_t i = 0; i < back.corpus.size(); ++i) {
    EXPECT_EQ(back.corpus.statements[i].raw_text, res.corpus.statements[i].raw_text);
    EXPECT_EQ(back.corpus.statements[i].tokens, res.corpus.statements[i].tokens);
    EXPECT_EQ(back.corpus.statements[i].label, res.corpus.statements[i].label);
  }
}
