#pragma once

// Word-vector tables in the GloVe text format, vocabularies, and the initial
// embedding matrix used by every model.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <zlib.h>

#include "wsd/corpus.hpp"
#include "wsd/error.hpp"
#include "wsd/linalg.hpp"
#include "wsd/rng.hpp"

namespace wsd {

struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::string> tokens;  // first-seen order
  std::vector<std::vector<double>> vectors;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t duplicate_count = 0;

  std::size_t size() const { return tokens.size(); }
  const std::vector<double>* find(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? nullptr : &vectors[it->second];
  }
};

namespace detail {

// Line reader over plain or gzip-compressed files (".gz" suffix).
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path)
      : gz_(path.extension() == ".gz") {
    if (gz_) {
      gzfile_ = gzopen(path.string().c_str(), "rb");
      if (!gzfile_) throw InputError("cannot open embedding file: " + path.string());
    } else {
      plain_.open(path, std::ios::binary);
      if (!plain_) throw InputError("cannot open embedding file: " + path.string());
    }
  }
  ~LineReader() {
    if (gzfile_) gzclose(gzfile_);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool getline(std::string& line) {
    if (!gz_) return static_cast<bool>(std::getline(plain_, line));
    line.clear();
    char buf[8192];
    for (;;) {
      if (!gzgets(gzfile_, buf, sizeof buf)) return !line.empty();
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        return true;
      }
    }
  }

 private:
  bool gz_;
  std::ifstream plain_;
  gzFile gzfile_ = nullptr;
};

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

// One entry per line: token, then `dim` space-separated decimals. The
// dimension comes from the first line. A repeated token replaces the earlier
// vector and is counted in duplicate_count.
inline EmbeddingTable parse_embedding_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw InputError("no such embedding file: " + path.string());
  detail::LineReader reader(path);
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string_view> fields;
  while (reader.getline(line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    fields.clear();
    std::string_view rest = line;
    while (!rest.empty()) {
      auto sp = rest.find(' ');
      auto f = rest.substr(0, sp);
      if (!f.empty()) fields.push_back(f);
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    if (fields.size() < 2)
      throw InputError(path.string() + ": no vector at line " + std::to_string(lineno));
    const std::size_t dim = fields.size() - 1;
    if (table.dim == 0) table.dim = dim;
    if (dim != table.dim)
      throw InputError("dimension mismatch at line " + std::to_string(lineno) +
                       " of " + path.string() + " (expected " +
                       std::to_string(table.dim) + ", got " + std::to_string(dim) + ")");
    std::vector<double> vec(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      auto v = detail::parse_double(fields[k + 1]);
      if (!v)
        throw InputError("non-numeric value '" + std::string(fields[k + 1]) +
                         "' at line " + std::to_string(lineno) + " of " + path.string());
      vec[k] = *v;
    }
    std::string token(fields[0]);
    if (auto it = table.index.find(token); it != table.index.end()) {
      table.vectors[it->second] = std::move(vec);
      ++table.duplicate_count;
    } else {
      table.index.emplace(token, table.tokens.size());
      table.tokens.push_back(std::move(token));
      table.vectors.push_back(std::move(vec));
    }
  }
  if (table.tokens.empty()) throw InputError("empty embedding file: " + path.string());
  return table;
}

// Shortest round-trip decimal form, so parse(write(t)) == t exactly.
inline void write_embedding_file(const std::filesystem::path& path,
                                 const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.tokens[i];
    for (double v : table.vectors[i]) out << ' ' << detail::format_double(v);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

inline constexpr int kPadIndex = 0;
inline constexpr int kOovIndex = 1;

// Index 0 is padding and index 1 is out-of-vocabulary. The reserved entries
// are kept out of the lookup map, so no corpus token can resolve to them.
class Vocabulary {
 public:
  Vocabulary() : tokens_{"<pad>", "<unk>"}, freqs_{0, 0} {}

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::size_t frequency(std::size_t index) const { return freqs_.at(index); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  int lookup(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kOovIndex : it->second;
  }
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

  void add(std::string token, std::size_t freq) {
    if (index_.count(token))
      throw InputError("duplicate vocabulary token: " + token);
    index_.emplace(token, static_cast<int>(tokens_.size()));
    tokens_.push_back(std::move(token));
    freqs_.push_back(freq);
  }

  // token<TAB>index<TAB>frequency per line, reserved entries included.
  std::string dump() const {
    std::string out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      out += tokens_[i];
      out += '\t';
      out += std::to_string(i);
      out += '\t';
      out += std::to_string(freqs_[i]);
      out += '\n';
    }
    return out;
  }

  std::uint64_t fingerprint() const { return fnv1a(dump()); }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> freqs_;
  std::unordered_map<std::string, int> index_;
};

inline Vocabulary parse_vocab_dump(std::string_view text) {
  Vocabulary vocab;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw InputError("malformed vocabulary line " + std::to_string(lineno));
    const auto index = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
    const auto freq = std::stoull(line.substr(t2 + 1));
    if (index < 2) continue;
    if (index != vocab.size())
      throw InputError("vocabulary indices out of order at line " + std::to_string(lineno));
    vocab.add(line.substr(0, t1), freq);
  }
  return vocab;
}

// Counts token frequencies over any number of corpora.
class VocabBuilder {
 public:
  void add(const Tokens& tokens) {
    for (const auto& t : tokens) ++counts_[t];
    ++statements_;
  }
  void add(const Corpus& corpus) {
    for (const auto& s : corpus.statements) add(s.tokens);
  }

  // Frequency >= min_freq; descending frequency, ties broken by byte order.
  Vocabulary build(std::size_t min_freq) const {
    if (min_freq < 1) throw InputError("min_freq must be positive");
    if (statements_ == 0) throw InputError("cannot build a vocabulary from an empty corpus");
    std::vector<std::pair<std::string, std::size_t>> items;
    for (const auto& [tok, n] : counts_)
      if (n >= min_freq) items.emplace_back(tok, n);
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    Vocabulary vocab;
    for (auto& [tok, n] : items) vocab.add(tok, n);
    return vocab;
  }

 private:
  std::map<std::string, std::size_t> counts_;
  std::size_t statements_ = 0;
};

inline Vocabulary build_vocab(const Corpus& corpus, std::size_t min_freq) {
  VocabBuilder b;
  b.add(corpus);
  return b.build(min_freq);
}

// ---------------------------------------------------------------------------

enum class EmbeddingMode { Random, Glove, GnGlove };

inline std::string to_string(EmbeddingMode m) {
  switch (m) {
    case EmbeddingMode::Random: return "random";
    case EmbeddingMode::Glove: return "glove";
    case EmbeddingMode::GnGlove: return "gn-glove";
  }
  return "?";
}

inline EmbeddingMode parse_embedding_mode(std::string_view s) {
  if (s == "random") return EmbeddingMode::Random;
  if (s == "glove") return EmbeddingMode::Glove;
  if (s == "gn-glove") return EmbeddingMode::GnGlove;
  throw InputError("unknown embedding mode: " + std::string(s));
}

inline constexpr double kRandomEmbeddingScale = 0.25;

struct EmbeddingMatrix {
  RowMatrix rows;  // vocab size x dim; row 0 is the padding row
  EmbeddingMode mode = EmbeddingMode::Random;
  bool trainable = true;
  double coverage = 0.0;  // fraction of non-reserved tokens found in the table

  std::size_t dim() const { return static_cast<std::size_t>(rows.cols()); }
};

// Every row starts from i.i.d. uniform [-0.25, 0.25] draws (row-major order),
// so a row's fallback value does not depend on table coverage. Pretrained
// modes then copy the table vector for each vocabulary token it contains.
inline EmbeddingMatrix build_matrix(const Vocabulary& vocab,
                                    const EmbeddingTable* table,
                                    std::size_t dim, EmbeddingMode mode,
                                    std::uint64_t seed) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
  if (mode != EmbeddingMode::Random) {
    if (!table) throw InputError(to_string(mode) + " mode requires an embedding table");
    if (table->dim != dim)
      throw InputError("embedding dimension mismatch: requested " +
                       std::to_string(dim) + ", table has " + std::to_string(table->dim));
  }
  EmbeddingMatrix m;
  m.mode = mode;
  m.rows.resize(static_cast<Eigen::Index>(vocab.size()), static_cast<Eigen::Index>(dim));
  Rng rng(mix_seed(seed, 0x454d42));
  for (Eigen::Index r = 0; r < m.rows.rows(); ++r)
    for (Eigen::Index c = 0; c < m.rows.cols(); ++c)
      m.rows(r, c) = rng.uniform(-kRandomEmbeddingScale, kRandomEmbeddingScale);
  m.rows.row(kPadIndex).setZero();

  if (mode != EmbeddingMode::Random) {
    std::size_t found = 0;
    for (std::size_t i = 2; i < vocab.size(); ++i) {
      if (const auto* v = table->find(vocab.token(i))) {
        for (std::size_t c = 0; c < dim; ++c)
          m.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = (*v)[c];
        ++found;
      }
    }
    m.coverage = vocab.size() > 2
                     ? static_cast<double>(found) / static_cast<double>(vocab.size() - 2)
                     : 0.0;
  }
  return m;
}

inline double coverage(const Vocabulary& vocab, const EmbeddingTable& table) {
  if (vocab.size() <= 2) return 0.0;
  std::size_t found = 0;
  for (std::size_t i = 2; i < vocab.size(); ++i)
    if (table.find(vocab.token(i))) ++found;
  return static_cast<double>(found) / static_cast<double>(vocab.size() - 2);
}

struct EncodedSequence {
  std::vector<int> ids;  // length max_len, right-padded with kPadIndex
  std::size_t valid_length = 0;
};

inline EncodedSequence encode(const Tokens& tokens, const Vocabulary& vocab,
                              std::size_t max_len) {
  if (max_len < 1) throw InputError("max_len must be at least 1");
  EncodedSequence out;
  out.ids.assign(max_len, kPadIndex);
  out.valid_length = std::min(tokens.size(), max_len);
  for (std::size_t i = 0; i < out.valid_length; ++i)
    out.ids[i] = vocab.lookup(tokens[i]);
  return out;
}

}  // namespace wsd
