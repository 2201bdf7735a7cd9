#pragma once

// Experiment configuration: the nine-row model ladder and a flat, typed
// key = value file format.
//
//   # comment
//   version = "V4b"
//   glove_path = "data/fixture/glove.fixture.100d.txt"
//   hidden = 64
//   lr = 0.001
//   seeds = [1, 2, 3]
//   trainable_embeddings = true
//
// Strings may be quoted or bare. Lists hold integers. In a config set, a key
// prefixed with a model id (`V4b.epochs = 40`) applies to that row only.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wsd/baselines.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/error.hpp"
#include "wsd/nn/adam.hpp"
#include "wsd/nn/model.hpp"
#include "wsd/rng.hpp"

namespace wsd {

enum class ModelVersion { V1a, V1b, V2, V3a, V3b, V3c, V4a, V4b, V4c };
enum class ModelKind { LogReg, Gbdt, Recurrent };

struct LadderEntry {
  ModelVersion version;
  std::string_view id;
  std::string_view description;
  ModelKind kind;
  nn::Architecture arch;
  EmbeddingMode mode;
};

// Row order of the published results table.
inline constexpr std::array<LadderEntry, 9> kLadder{{
    {ModelVersion::V1a, "V1a", "GloVe+Logistic Regression", ModelKind::LogReg,
     nn::Architecture::Lstm2, EmbeddingMode::Glove},
    {ModelVersion::V1b, "V1b", "GloVe+GBDT", ModelKind::Gbdt, nn::Architecture::Lstm2,
     EmbeddingMode::Glove},
    {ModelVersion::V2, "V2", "GloVe+LSTM", ModelKind::Recurrent, nn::Architecture::Lstm2,
     EmbeddingMode::Glove},
    {ModelVersion::V3a, "V3a", "Random+BiLSTM", ModelKind::Recurrent, nn::Architecture::BiLstm,
     EmbeddingMode::Random},
    {ModelVersion::V3b, "V3b", "GloVe+BiLSTM", ModelKind::Recurrent, nn::Architecture::BiLstm,
     EmbeddingMode::Glove},
    {ModelVersion::V3c, "V3c", "GN-GloVe+BiLSTM", ModelKind::Recurrent,
     nn::Architecture::BiLstm, EmbeddingMode::GnGlove},
    {ModelVersion::V4a, "V4a", "Random+BiLSTM+Attn", ModelKind::Recurrent,
     nn::Architecture::BiLstmAttention, EmbeddingMode::Random},
    {ModelVersion::V4b, "V4b", "GloVe+BiLSTM+Attn", ModelKind::Recurrent,
     nn::Architecture::BiLstmAttention, EmbeddingMode::Glove},
    {ModelVersion::V4c, "V4c", "GN-GloVe+BiLSTM+Attn", ModelKind::Recurrent,
     nn::Architecture::BiLstmAttention, EmbeddingMode::GnGlove},
}};

inline const LadderEntry& ladder_entry(ModelVersion v) {
  for (const auto& e : kLadder)
    if (e.version == v) return e;
  throw std::invalid_argument("unknown model version");
}

inline ModelVersion parse_version(std::string_view s) {
  for (const auto& e : kLadder)
    if (e.id == s) return e.version;
  throw InputError("unknown model version: " + std::string(s));
}

inline std::string version_id(ModelVersion v) { return std::string(ladder_entry(v).id); }

struct ExperimentConfig {
  ModelVersion version = ModelVersion::V4b;
  std::string glove_path;
  std::string gn_glove_path;
  std::size_t embedding_dim = 100;
  nn::ModelShape shape;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  nn::AdamOptions adam;
  std::size_t max_len = 48;
  std::size_t min_freq = 1;
  bool trainable_embeddings = true;
  baselines::LogRegOptions logreg;
  baselines::GbdtOptions gbdt;
  double split_ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  bool record_wallclock = true;

  const LadderEntry& entry() const { return ladder_entry(version); }
  EmbeddingMode embedding_mode() const { return entry().mode; }

  // Path of the embedding file this version reads; empty for random mode.
  const std::string& embedding_path() const {
    static const std::string none;
    switch (embedding_mode()) {
      case EmbeddingMode::Glove: return glove_path;
      case EmbeddingMode::GnGlove: return gn_glove_path;
      case EmbeddingMode::Random: return none;
    }
    return none;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw InputError("invalid config: " + m); };
    if (embedding_dim == 0) fail("embedding_dim must be positive");
    if (shape.hidden < 1) fail("hidden must be positive");
    if (shape.attention_dim < 1) fail("attention_dim must be positive");
    if (!(shape.dropout_rate >= 0.0 && shape.dropout_rate < 1.0)) fail("dropout must lie in [0, 1)");
    if (batch_size == 0) fail("batch_size must be positive");
    if (!(adam.lr > 0.0)) fail("lr must be positive");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
    if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
    if (!(adam.epsilon > 0.0)) fail("adam_epsilon must be positive");
    if (max_len == 0) fail("max_len must be positive");
    if (min_freq == 0) fail("min_freq must be positive");
    if (logreg.l2 < 0.0) fail("logreg_l2 must be nonnegative");
    if (gbdt.n_trees < 1) fail("gbdt_trees must be at least 1");
    if (gbdt.max_depth < 1) fail("gbdt_depth must be at least 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) fail("split_ratio must lie in (0, 1)");
    if (seeds.empty()) fail("seeds must not be empty");
  }

  // Every setting that influences results, paths excluded, one per line.
  std::string canonical() const {
    std::ostringstream o;
    o.precision(17);
    o << "version=" << version_id(version) << '\n'
      << "embedding=" << to_string(embedding_mode()) << '\n'
      << "embedding_dim=" << embedding_dim << '\n';
    if (entry().kind == ModelKind::Recurrent) {
      o << "hidden=" << shape.hidden << '\n'
        << "attention_dim=" << shape.attention_dim << '\n'
        << "dropout=" << shape.dropout_rate << '\n'
        << "batch_size=" << batch_size << '\n'
        << "epochs=" << epochs << '\n'
        << "lr=" << adam.lr << '\n'
        << "beta1=" << adam.beta1 << '\n'
        << "beta2=" << adam.beta2 << '\n'
        << "adam_epsilon=" << adam.epsilon << '\n'
        << "trainable_embeddings=" << trainable_embeddings << '\n';
    } else if (entry().kind == ModelKind::LogReg) {
      o << "logreg_l2=" << logreg.l2 << '\n'
        << "logreg_lr=" << logreg.lr << '\n'
        << "logreg_epochs=" << logreg.epochs << '\n';
    } else {
      o << "gbdt_trees=" << gbdt.n_trees << '\n'
        << "gbdt_depth=" << gbdt.max_depth << '\n'
        << "gbdt_lr=" << gbdt.learning_rate << '\n';
    }
    o << "max_len=" << max_len << '\n' << "min_freq=" << min_freq << '\n';
    return o.str();
  }

  std::string hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
  }
};

// ---------------------------------------------------------------------------
// Flat key-value documents

using ConfigValue = std::variant<bool, std::int64_t, double, std::string, std::vector<std::int64_t>>;

struct ConfigEntry {
  std::string key;
  ConfigValue value;
  std::size_t line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline ConfigValue parse_value(std::string_view raw, std::size_t line) {
  auto s = trim(raw);
  auto where = [&] { return " at line " + std::to_string(line); };
  if (s.empty()) throw InputError("missing value" + where());
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw InputError("unterminated string" + where());
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s.front() == '[') {
    if (s.back() != ']') throw InputError("unterminated list" + where());
    std::vector<std::int64_t> out;
    auto body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      auto comma = body.find(',');
      auto item = trim(body.substr(0, comma));
      auto v = parse_int(item);
      if (!v) throw InputError("list items must be integers" + where());
      out.push_back(*v);
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  if (auto i = parse_int(s)) return *i;
  double d = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec == std::errc() && p == s.data() + s.size()) return d;
  return std::string(s);
}

}  // namespace detail

inline std::vector<ConfigEntry> parse_config_text(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    // Trailing comments are allowed outside quoted strings.
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) {
        s = detail::trim(s.substr(0, i));
        break;
      }
    }
    auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw InputError("expected key = value at line " + std::to_string(lineno));
    auto key = detail::trim(s.substr(0, eq));
    if (key.empty()) throw InputError("empty key at line " + std::to_string(lineno));
    out.push_back({std::string(key), detail::parse_value(s.substr(eq + 1), lineno), lineno});
  }
  return out;
}

inline std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace detail {

inline std::string value_type_name(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "real";
    case 3: return "string";
    default: return "list";
  }
}

struct Applier {
  const ConfigEntry& e;

  [[noreturn]] void type_error(const char* want) const {
    throw InputError("config key '" + e.key + "' at line " + std::to_string(e.line) +
                     " expects " + want + ", got " + value_type_name(e.value));
  }
  std::string str() const {
    if (auto* s = std::get_if<std::string>(&e.value)) return *s;
    type_error("a string");
  }
  double real() const {
    if (auto* d = std::get_if<double>(&e.value)) return *d;
    if (auto* i = std::get_if<std::int64_t>(&e.value)) return static_cast<double>(*i);
    type_error("a number");
  }
  std::int64_t integer() const {
    if (auto* i = std::get_if<std::int64_t>(&e.value)) return *i;
    type_error("an integer");
  }
  std::size_t count() const {
    auto v = integer();
    if (v < 0) type_error("a nonnegative integer");
    return static_cast<std::size_t>(v);
  }
  bool boolean() const {
    if (auto* b = std::get_if<bool>(&e.value)) return *b;
    type_error("true or false");
  }
  std::vector<std::uint64_t> seeds() const {
    if (auto* l = std::get_if<std::vector<std::int64_t>>(&e.value)) {
      std::vector<std::uint64_t> out;
      for (auto v : *l) {
        if (v < 0) type_error("nonnegative seeds");
        out.push_back(static_cast<std::uint64_t>(v));
      }
      return out;
    }
    if (auto* i = std::get_if<std::int64_t>(&e.value); i && *i >= 0)
      return {static_cast<std::uint64_t>(*i)};
    type_error("a list of integers");
  }
};

}  // namespace detail

// Applies one setting. Unknown keys are rejected.
inline void apply_config_entry(ExperimentConfig& c, const ConfigEntry& e,
                               std::string_view key) {
  detail::Applier a{e};
  if (key == "version") c.version = parse_version(a.str());
  else if (key == "embedding") {
    const auto mode = parse_embedding_mode(a.str());
    if (mode != c.embedding_mode())
      throw InputError("config: version " + version_id(c.version) + " uses " +
                       to_string(c.embedding_mode()) + " embeddings, not " + to_string(mode));
  }
  else if (key == "glove_path") c.glove_path = a.str();
  else if (key == "gn_glove_path") c.gn_glove_path = a.str();
  else if (key == "embedding_dim") c.embedding_dim = a.count();
  else if (key == "hidden") c.shape.hidden = static_cast<Eigen::Index>(a.count());
  else if (key == "attention_dim") c.shape.attention_dim = static_cast<Eigen::Index>(a.count());
  else if (key == "dropout") c.shape.dropout_rate = a.real();
  else if (key == "batch_size") c.batch_size = a.count();
  else if (key == "epochs") c.epochs = a.count();
  else if (key == "lr") c.adam.lr = a.real();
  else if (key == "beta1") c.adam.beta1 = a.real();
  else if (key == "beta2") c.adam.beta2 = a.real();
  else if (key == "adam_epsilon") c.adam.epsilon = a.real();
  else if (key == "max_len") c.max_len = a.count();
  else if (key == "min_freq") c.min_freq = a.count();
  else if (key == "trainable_embeddings") c.trainable_embeddings = a.boolean();
  else if (key == "logreg_l2") c.logreg.l2 = a.real();
  else if (key == "logreg_lr") c.logreg.lr = a.real();
  else if (key == "logreg_epochs") c.logreg.epochs = a.count();
  else if (key == "gbdt_trees") c.gbdt.n_trees = a.count();
  else if (key == "gbdt_depth") c.gbdt.max_depth = static_cast<int>(a.integer());
  else if (key == "gbdt_lr") c.gbdt.learning_rate = a.real();
  else if (key == "split_ratio") c.split_ratio = a.real();
  else if (key == "split_seed") c.split_seed = static_cast<std::uint64_t>(a.count());
  else if (key == "seeds") c.seeds = a.seeds();
  else if (key == "record_wallclock") c.record_wallclock = a.boolean();
  else
    throw InputError("unknown config key '" + e.key + "' at line " + std::to_string(e.line));
}

// A single-experiment document. `version` is applied first so that an
// `embedding` key can be checked against it regardless of position.
inline ExperimentConfig config_from_entries(const std::vector<ConfigEntry>& entries,
                                            ExperimentConfig base = {}) {
  for (const auto& e : entries)
    if (e.key == "version") apply_config_entry(base, e, e.key);
  for (const auto& e : entries)
    if (e.key != "version") apply_config_entry(base, e, e.key);
  base.validate();
  return base;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_entries(read_config_file(path));
}

// A config set: shared keys apply to every row, `<id>.key` to one row, and an
// optional `versions = "V1a,V2,..."` restricts the ladder. Rows come back in
// ladder order.
inline std::vector<ExperimentConfig> config_set_from_entries(const std::vector<ConfigEntry>& entries) {
  std::vector<ModelVersion> versions;
  std::vector<const ConfigEntry*> shared;
  std::map<std::string, std::vector<const ConfigEntry*>> per_version;
  for (const auto& e : entries) {
    if (e.key == "versions") {
      detail::Applier a{e};
      std::string list = a.str();
      std::stringstream ss(list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto t = detail::trim(item);
        if (!t.empty()) versions.push_back(parse_version(t));
      }
      continue;
    }
    if (e.key == "version" || e.key == "embedding")
      throw InputError("config set: '" + e.key + "' is fixed per ladder row");
    auto dot = e.key.find('.');
    if (dot != std::string::npos) {
      const auto id = e.key.substr(0, dot);
      parse_version(id);
      per_version[id].push_back(&e);
    } else {
      shared.push_back(&e);
    }
  }
  if (versions.empty())
    for (const auto& l : kLadder) versions.push_back(l.version);
  std::vector<ExperimentConfig> out;
  for (const auto& l : kLadder) {
    if (std::find(versions.begin(), versions.end(), l.version) == versions.end()) continue;
    ExperimentConfig c;
    c.version = l.version;
    for (const auto* e : shared) apply_config_entry(c, *e, e->key);
    if (auto it = per_version.find(std::string(l.id)); it != per_version.end())
      for (const auto* e : it->second) apply_config_entry(c, *e, e->key.substr(l.id.size() + 1));
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<ExperimentConfig> load_config_set(const std::filesystem::path& path) {
  return config_set_from_entries(read_config_file(path));
}

}  // namespace wsd
