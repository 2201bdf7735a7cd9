#pragma once

// Labeled statement corpus: loading, normalization, deduplication, and
// stratified train/test splitting.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wsd/csv.hpp"
#include "wsd/error.hpp"
#include "wsd/rng.hpp"

namespace wsd {

using Tokens = std::vector<std::string>;
using SlangMap = std::unordered_map<std::string, std::string>;

struct Statement {
  std::string raw_text;
  Tokens tokens;
  int label = 0;  // 1 = sexist, 0 = neutral/ambiguous
  std::optional<std::string> source_tag;
  // Original record in input column order; empty for statements built in code.
  std::vector<std::string> fields;
};

struct Corpus {
  std::vector<Statement> statements;
  // Input header, in order. Empty when the corpus was not loaded from CSV.
  std::vector<std::string> columns;

  std::size_t size() const { return statements.size(); }
  bool empty() const { return statements.empty(); }
  std::size_t count_label(int label) const {
    return static_cast<std::size_t>(
        std::count_if(statements.begin(), statements.end(),
                      [&](const Statement& s) { return s.label == label; }));
  }
};

struct SplitPair {
  Corpus train;
  Corpus test;
  std::uint64_t seed = 0;
  double ratio = 0.8;
};

struct Schema {
  std::string text_column = "text";
  std::string label_column = "label";
  std::string source_column = "source";  // optional; used when present
};

struct LoadResult {
  Corpus corpus;
  std::vector<std::string> diagnostics;
  std::size_t rejected = 0;
};

inline constexpr std::string_view kNormalizedColumn = "normalized";

// ---------------------------------------------------------------------------
// Normalization

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline bool is_terminal_punct(char c) {
  return c == '.' || c == '!' || c == '?' || c == ',';
}

// ASCII plus the Latin-1 supplement block (U+00C0..U+00DE except U+00D7).
inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      auto d = static_cast<unsigned char>(out[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97)
        out[i + 1] = static_cast<char>(d + 0x20);
      ++i;
    }
  }
  return out;
}

// Quote and bracket characters act as separators; they never survive into
// tokens. Curly double quotes are the UTF-8 sequences E2 80 9C / E2 80 9D.
inline std::string blank_separators(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"' || c == '(' || c == ')' || c == '[' || c == ']' ||
        c == '{' || c == '}') {
      out.push_back(' ');
    } else if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < s.size() &&
               static_cast<unsigned char>(s[i + 1]) == 0x80 &&
               (static_cast<unsigned char>(s[i + 2]) == 0x9C ||
                static_cast<unsigned char>(s[i + 2]) == 0x9D)) {
      out.push_back(' ');
      i += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Strips edge apostrophes (straight or curly single quotes).
inline std::string trim_single_quotes(std::string tok) {
  auto strip_front = [&]() {
    if (!tok.empty() && tok.front() == '\'') {
      tok.erase(0, 1);
      return true;
    }
    if (tok.size() >= 3 && static_cast<unsigned char>(tok[0]) == 0xE2 &&
        static_cast<unsigned char>(tok[1]) == 0x80 &&
        (static_cast<unsigned char>(tok[2]) == 0x98 ||
         static_cast<unsigned char>(tok[2]) == 0x99)) {
      tok.erase(0, 3);
      return true;
    }
    return false;
  };
  auto strip_back = [&]() {
    // Stop at terminal punctuation so that "'yes'." keeps its period.
    std::size_t end = tok.size();
    while (end > 0 && is_terminal_punct(tok[end - 1])) --end;
    if (end > 0 && tok[end - 1] == '\'') {
      tok.erase(end - 1, 1);
      return true;
    }
    if (end >= 3 && static_cast<unsigned char>(tok[end - 3]) == 0xE2 &&
        static_cast<unsigned char>(tok[end - 2]) == 0x80 &&
        (static_cast<unsigned char>(tok[end - 1]) == 0x98 ||
         static_cast<unsigned char>(tok[end - 1]) == 0x99)) {
      tok.erase(end - 3, 3);
      return true;
    }
    return false;
  };
  while (strip_front()) {
  }
  while (strip_back()) {
  }
  return tok;
}

inline bool is_url(std::string_view tok) {
  return tok.starts_with("http://") || tok.starts_with("https://") ||
         tok.starts_with("www.");
}

inline bool is_punct_only(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
    return is_terminal_punct(c);
  });
}

inline std::string erase_char(std::string tok, char c) {
  tok.erase(std::remove(tok.begin(), tok.end(), c), tok.end());
  return tok;
}

}  // namespace detail

// Maps one raw statement to its token list. Pipeline order: lowercase; drop
// URLs and mentions; hashtags (kept without the marker when sentence-internal,
// dropped when they trail the statement); slang replacement; whitespace split
// with terminal punctuation (. ! ? ,) split off into standalone tokens.
//
// Idempotent provided no slang replacement value is itself a slang key.
inline Tokens normalize_statement(std::string_view raw, const SlangMap& slang) {
  using namespace detail;
  std::vector<std::string> words = split_ws(blank_separators(lowercase(raw)));

  // URLs and user mentions. A token carrying '@' anywhere (mentions, email
  // addresses) is dropped.
  std::vector<std::string> kept;
  kept.reserve(words.size());
  for (auto& w : words) {
    w = trim_single_quotes(std::move(w));
    if (w.empty() || is_url(w) || w.find('@') != std::string::npos) continue;
    kept.push_back(std::move(w));
  }

  // Hashtags: the trailing run of hashtag / punctuation-only tokens is final.
  std::size_t tail = kept.size();
  while (tail > 0 && (kept[tail - 1].front() == '#' ||
                      is_punct_only(kept[tail - 1])))
    --tail;
  std::vector<std::string> words2;
  words2.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const bool hashtag = kept[i].front() == '#';
    if (hashtag && i >= tail) continue;
    std::string w = erase_char(std::move(kept[i]), '#');
    if (w.empty()) continue;
    words2.push_back(std::move(w));
  }

  Tokens out;
  out.reserve(words2.size() + 4);
  for (const auto& w : words2) {
    std::size_t core_end = w.size();
    while (core_end > 0 && is_terminal_punct(w[core_end - 1])) --core_end;
    std::string core = w.substr(0, core_end);
    if (!core.empty()) {
      if (auto it = slang.find(core); it != slang.end()) {
        for (auto& piece : split_ws(it->second)) out.push_back(piece);
      } else {
        out.push_back(std::move(core));
      }
    }
    for (std::size_t k = core_end; k < w.size(); ++k)
      out.emplace_back(1, w[k]);
  }
  return out;
}

inline std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// Built-in slang table; mirrors data/slang_map.tsv.
inline SlangMap default_slang_map() {
  return {
      {"u", "you"},        {"r", "are"},       {"ur", "your"},
      {"thx", "thanks"},   {"b4", "before"},   {"pls", "please"},
      {"plz", "please"},   {"bc", "because"},  {"cuz", "because"},
      {"ya", "you"},       {"tho", "though"},  {"gonna", "going to"},
      {"wanna", "want to"}, {"idk", "i don't know"}, {"btw", "by the way"},
      {"omg", "oh my god"}, {"im", "i'm"},
  };
}

// Two-column TSV: slang<TAB>replacement; '#' lines are comments.
inline SlangMap load_slang_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open slang map: " + path.string());
  SlangMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw InputError("slang map " + path.string() + ": malformed line " +
                       std::to_string(lineno));
    out[detail::lowercase(line.substr(0, tab))] = line.substr(tab + 1);
  }
  return out;
}

// Fills tokens for every statement and drops statements that normalize to
// nothing. Returns the number dropped.
inline std::size_t normalize_corpus(Corpus& corpus, const SlangMap& slang) {
  std::size_t before = corpus.size();
  for (auto& s : corpus.statements) s.tokens = normalize_statement(s.raw_text, slang);
  std::erase_if(corpus.statements,
                [](const Statement& s) { return s.tokens.empty(); });
  return before - corpus.size();
}

// ---------------------------------------------------------------------------
// Loading

namespace detail {

inline std::optional<int> parse_label(std::string_view v) {
  while (!v.empty() && is_space(v.front())) v.remove_prefix(1);
  while (!v.empty() && is_space(v.back())) v.remove_suffix(1);
  if (v == "0") return 0;
  if (v == "1") return 1;
  return std::nullopt;
}

inline LoadResult load_csv(const std::filesystem::path& path,
                           const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset: " + path.string());
  auto records = csv::read_all(in);
  if (records.empty()) throw InputError("empty file: " + path.string());

  LoadResult result;
  const auto& header = records.front().fields;
  result.corpus.columns = header;
  auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  auto text_col = find_col(schema.text_column);
  auto label_col = find_col(schema.label_column);
  if (!text_col) throw InputError("missing column '" + schema.text_column + "' in " + path.string());
  if (!label_col) throw InputError("missing column '" + schema.label_column + "' in " + path.string());
  auto source_col = find_col(schema.source_column);
  auto norm_col = find_col(std::string(kNormalizedColumn));

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "row " + std::to_string(r) + " (line " +
                              std::to_string(rec.line) + ")";
    if (rec.fields.size() != header.size()) {
      result.diagnostics.push_back(where + ": expected " +
                                   std::to_string(header.size()) +
                                   " fields, got " +
                                   std::to_string(rec.fields.size()));
      ++result.rejected;
      continue;
    }
    auto label = parse_label(rec.fields[*label_col]);
    if (!label) {
      result.diagnostics.push_back(where + ": label '" + rec.fields[*label_col] +
                                   "' is not 0 or 1");
      ++result.rejected;
      continue;
    }
    Statement st;
    st.raw_text = rec.fields[*text_col];
    st.label = *label;
    if (source_col) st.source_tag = rec.fields[*source_col];
    if (norm_col) st.tokens = split_ws(rec.fields[*norm_col]);
    st.fields = rec.fields;
    result.corpus.statements.push_back(std::move(st));
  }
  if (result.corpus.empty() && result.rejected == 0)
    throw InputError("empty dataset: " + path.string());
  return result;
}

inline LoadResult load_jsonl(const std::filesystem::path& path,
                             const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset: " + path.string());
  LoadResult result;
  result.corpus.columns = {schema.text_column, schema.label_column};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "row " + std::to_string(lineno);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      result.diagnostics.push_back(where + ": invalid JSON");
      ++result.rejected;
      continue;
    }
    if (!obj.is_object() || !obj.contains(schema.text_column) ||
        !obj.contains(schema.label_column) ||
        !obj[schema.text_column].is_string()) {
      result.diagnostics.push_back(where + ": missing text or label field");
      ++result.rejected;
      continue;
    }
    const auto& lv = obj[schema.label_column];
    std::optional<int> label;
    if (lv.is_number_integer()) {
      auto v = lv.get<long long>();
      if (v == 0 || v == 1) label = static_cast<int>(v);
    } else if (lv.is_string()) {
      label = parse_label(lv.get<std::string>());
    }
    if (!label) {
      result.diagnostics.push_back(where + ": label " + lv.dump() + " is not 0 or 1");
      ++result.rejected;
      continue;
    }
    Statement st;
    st.raw_text = obj[schema.text_column].get<std::string>();
    st.label = *label;
    if (obj.contains(schema.source_column) && obj[schema.source_column].is_string())
      st.source_tag = obj[schema.source_column].get<std::string>();
    const std::string norm_key(kNormalizedColumn);
    if (obj.contains(norm_key) && obj[norm_key].is_string())
      st.tokens = split_ws(obj[norm_key].get<std::string>());
    st.fields = {st.raw_text, std::to_string(st.label)};
    result.corpus.statements.push_back(std::move(st));
  }
  if (lineno == 0) throw InputError("empty file: " + path.string());
  if (result.corpus.empty() && result.rejected == 0)
    throw InputError("empty dataset: " + path.string());
  return result;
}

}  // namespace detail

// Reads a labeled dataset. CSV (RFC-4180, header row) is the default; files
// ending in .jsonl are read as one JSON object per line. Rows with a bad label
// are rejected with a diagnostic naming the row; the rest load in file order.
// If a "normalized" column is present its tokens are used as-is.
inline LoadResult load_dataset(const std::filesystem::path& path,
                               const Schema& schema = {}) {
  if (!std::filesystem::exists(path))
    throw InputError("no such file: " + path.string());
  if (path.extension() == ".jsonl") return detail::load_jsonl(path, schema);
  return detail::load_csv(path, schema);
}

// ---------------------------------------------------------------------------
// Deduplication and splitting

struct DedupResult {
  Corpus corpus;
  std::size_t dropped = 0;
};

inline std::string token_key(const Tokens& tokens) {
  std::string key;
  for (const auto& t : tokens) {
    key += t;
    key.push_back('\x1f');
  }
  return key;
}

// Keeps the first statement for each distinct normalized token sequence.
inline DedupResult deduplicate(const Corpus& corpus) {
  DedupResult out;
  out.corpus.columns = corpus.columns;
  std::unordered_set<std::string> seen;
  for (const auto& s : corpus.statements) {
    if (seen.insert(token_key(s.tokens)).second)
      out.corpus.statements.push_back(s);
    else
      ++out.dropped;
  }
  return out;
}

// Returns (fraction sexist, fraction neutral).
inline std::pair<double, double> class_balance(const Corpus& corpus) {
  if (corpus.empty()) throw InputError("class balance of an empty corpus");
  const double n = static_cast<double>(corpus.size());
  const double pos = static_cast<double>(corpus.count_label(1)) / n;
  return {pos, 1.0 - pos};
}

// Per-class shuffle followed by proportional allocation. Each class keeps at
// least one statement on each side. Members of each side stay in corpus order.
inline SplitPair stratified_split(const Corpus& corpus, double ratio,
                                  std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw InputError("split ratio must lie in (0, 1)");
  {
    std::unordered_set<std::string> seen;
    for (const auto& s : corpus.statements)
      if (!seen.insert(token_key(s.tokens)).second)
        throw InputError("corpus contains duplicate statements; deduplicate before splitting");
  }
  SplitPair out;
  out.seed = seed;
  out.ratio = ratio;
  out.train.columns = corpus.columns;
  out.test.columns = corpus.columns;

  std::vector<char> in_train(corpus.size(), 0);
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (corpus.statements[i].label == label) members.push_back(i);
    if (members.size() < 2)
      throw InputError("class " + std::to_string(label) + " has " +
                       std::to_string(members.size()) +
                       " statement(s); stratified split needs at least 2");
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(members);
    auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    for (std::size_t k = 0; k < n_train; ++k) in_train[members[k]] = 1;
  }
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (in_train[i] ? out.train : out.test).statements.push_back(corpus.statements[i]);
  return out;
}

// Writes a split file: the input schema plus a `normalized` column.
inline void write_split_csv(const std::filesystem::path& path,
                            const Corpus& corpus, const Schema& schema = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  std::vector<std::string> header = corpus.columns;
  const bool have_fields = !header.empty();
  if (!have_fields) header = {schema.text_column, schema.label_column};
  // Overwrite an existing normalized column rather than duplicating it.
  std::optional<std::size_t> norm_idx;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == kNormalizedColumn) norm_idx = i;
  if (!norm_idx) header.emplace_back(kNormalizedColumn);
  csv::write_record(out, header);
  for (const auto& s : corpus.statements) {
    std::vector<std::string> rec;
    if (have_fields && s.fields.size() == corpus.columns.size())
      rec = s.fields;
    else if (have_fields)
      throw InputError("statement fields do not match corpus columns");
    else
      rec = {s.raw_text, std::to_string(s.label)};
    if (norm_idx)
      rec[*norm_idx] = join_tokens(s.tokens);
    else
      rec.push_back(join_tokens(s.tokens));
    csv::write_record(out, rec);
  }
}

}  // namespace wsd
