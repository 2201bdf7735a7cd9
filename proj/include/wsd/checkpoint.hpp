#pragma once

// JSON checkpoint container. Doubles are written in shortest round-trip form,
// so save followed by load reproduces every parameter bit for bit.
//
// {
//   "format": "wsd-checkpoint", "format_version": 1,
//   "kind": "recurrent" | "logreg" | "gbdt",
//   "config": { flat config keys },
//   "vocab": { "hash": "...", "tokens": [...], "frequencies": [...] },
//   "slang": { ... }, "embedding": { "mode", "trainable", "coverage" },
//   "tensors": [ { "name", "shape": [rows, cols], "data": [row-major values] } ],
//   "architecture", "dropout"                               (recurrent)
//   "logreg": { "w": [...], "b": x }                        (logreg)
//   "gbdt": { "base_score", "learning_rate", "max_depth",
//             "trees": [ {"split": {"feature", "threshold", "left", "right"}} | {"leaf": v} ] }
// }

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "wsd/classifier.hpp"
#include "wsd/error.hpp"

namespace wsd {

inline constexpr int kCheckpointVersion = 1;

namespace detail {

using nlohmann::json;

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline json config_to_json(const ExperimentConfig& c) {
  return json{
      {"version", version_id(c.version)},
      {"embedding", to_string(c.embedding_mode())},
      {"glove_path", c.glove_path},
      {"gn_glove_path", c.gn_glove_path},
      {"embedding_dim", c.embedding_dim},
      {"hidden", c.shape.hidden},
      {"attention_dim", c.shape.attention_dim},
      {"dropout", c.shape.dropout_rate},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"lr", c.adam.lr},
      {"beta1", c.adam.beta1},
      {"beta2", c.adam.beta2},
      {"adam_epsilon", c.adam.epsilon},
      {"max_len", c.max_len},
      {"min_freq", c.min_freq},
      {"trainable_embeddings", c.trainable_embeddings},
      {"logreg_l2", c.logreg.l2},
      {"logreg_lr", c.logreg.lr},
      {"logreg_epochs", c.logreg.epochs},
      {"gbdt_trees", c.gbdt.n_trees},
      {"gbdt_depth", c.gbdt.max_depth},
      {"gbdt_lr", c.gbdt.learning_rate},
      {"split_ratio", c.split_ratio},
      {"split_seed", c.split_seed},
      {"seeds", c.seeds},
  };
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.version = parse_version(j.at("version").get<std::string>());
  c.glove_path = j.at("glove_path").get<std::string>();
  c.gn_glove_path = j.at("gn_glove_path").get<std::string>();
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.shape.hidden = j.at("hidden").get<Eigen::Index>();
  c.shape.attention_dim = j.at("attention_dim").get<Eigen::Index>();
  c.shape.dropout_rate = j.at("dropout").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.adam.lr = j.at("lr").get<double>();
  c.adam.beta1 = j.at("beta1").get<double>();
  c.adam.beta2 = j.at("beta2").get<double>();
  c.adam.epsilon = j.at("adam_epsilon").get<double>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.min_freq = j.at("min_freq").get<std::size_t>();
  c.trainable_embeddings = j.at("trainable_embeddings").get<bool>();
  c.logreg.l2 = j.at("logreg_l2").get<double>();
  c.logreg.lr = j.at("logreg_lr").get<double>();
  c.logreg.epochs = j.at("logreg_epochs").get<std::size_t>();
  c.gbdt.n_trees = j.at("gbdt_trees").get<std::size_t>();
  c.gbdt.max_depth = j.at("gbdt_depth").get<int>();
  c.gbdt.learning_rate = j.at("gbdt_lr").get<double>();
  c.split_ratio = j.at("split_ratio").get<double>();
  c.split_seed = j.at("split_seed").get<std::uint64_t>();
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  return c;
}

inline json tensor_to_json(const nn::TensorRef& t, bool row_major) {
  json data = json::array();
  for (Eigen::Index r = 0; r < t.rows; ++r)
    for (Eigen::Index c = 0; c < t.cols; ++c)
      data.push_back(row_major ? t.data[r * t.cols + c] : t.data[c * t.rows + r]);
  return json{{"name", t.name}, {"shape", {t.rows, t.cols}}, {"data", std::move(data)}};
}

inline void tensor_from_json(const json& j, const nn::TensorRef& t, bool row_major) {
  if (j.at("name").get<std::string>() != t.name)
    throw InputError("checkpoint tensor order mismatch: expected " + t.name);
  const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
  if (shape.size() != 2 || shape[0] != t.rows || shape[1] != t.cols)
    throw InputError("checkpoint tensor " + t.name + " has the wrong shape");
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != t.size())
    throw InputError("checkpoint tensor " + t.name + " has the wrong element count");
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < t.rows; ++r)
    for (Eigen::Index c = 0; c < t.cols; ++c) {
      const double v = data[k++].get<double>();
      (row_major ? t.data[r * t.cols + c] : t.data[c * t.rows + r]) = v;
    }
}

inline json embedding_meta(const EmbeddingMatrix& m) {
  return json{{"mode", to_string(m.mode)}, {"trainable", m.trainable}, {"coverage", m.coverage}};
}

inline EmbeddingMatrix embedding_from_json(const json& meta, const json& tensor) {
  EmbeddingMatrix m;
  m.mode = parse_embedding_mode(meta.at("mode").get<std::string>());
  m.trainable = meta.at("trainable").get<bool>();
  m.coverage = meta.at("coverage").get<double>();
  const auto shape = tensor.at("shape").get<std::vector<Eigen::Index>>();
  if (shape.size() != 2) throw InputError("checkpoint embedding shape is malformed");
  m.rows.resize(shape[0], shape[1]);
  tensor_from_json(tensor, {"embedding", m.rows.data(), shape[0], shape[1], m.trainable}, true);
  return m;
}

inline json tree_node_to_json(const baselines::RegressionTree& t, int k) {
  const auto& nd = t.nodes[static_cast<std::size_t>(k)];
  if (nd.is_leaf()) return json{{"leaf", nd.value}};
  return json{{"split",
               {{"feature", nd.feature},
                {"threshold", nd.threshold},
                {"left", tree_node_to_json(t, nd.left)},
                {"right", tree_node_to_json(t, nd.right)}}}};
}

inline int tree_node_from_json(const json& j, baselines::RegressionTree& t) {
  const int self = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (j.contains("leaf")) {
    t.nodes.back().value = j.at("leaf").get<double>();
    return self;
  }
  const auto& s = j.at("split");
  const int l = tree_node_from_json(s.at("left"), t);
  const int r = tree_node_from_json(s.at("right"), t);
  auto& nd = t.nodes[static_cast<std::size_t>(self)];
  nd.feature = s.at("feature").get<int>();
  nd.threshold = s.at("threshold").get<double>();
  nd.left = l;
  nd.right = r;
  return self;
}

}  // namespace detail

inline nlohmann::json checkpoint_to_json(const Classifier& clf) {
  using nlohmann::json;
  json j;
  j["format"] = "wsd-checkpoint";
  j["format_version"] = kCheckpointVersion;
  j["config"] = detail::config_to_json(clf.config);
  json tokens = json::array(), freqs = json::array();
  for (std::size_t i = 2; i < clf.vocab.size(); ++i) {
    tokens.push_back(clf.vocab.token(i));
    freqs.push_back(clf.vocab.frequency(i));
  }
  j["vocab"] = {{"hash", detail::hex64(clf.vocab.fingerprint())},
                {"tokens", std::move(tokens)},
                {"frequencies", std::move(freqs)}};
  j["slang"] = json::object();
  for (const auto& [k, v] : clf.slang) j["slang"][k] = v;

  json tensors = json::array();
  if (const auto* m = std::get_if<nn::ModelParams>(&clf.model)) {
    auto& params = const_cast<nn::ModelParams&>(*m);
    j["kind"] = "recurrent";
    j["architecture"] = nn::to_string(m->arch);
    j["dropout"] = m->dropout_rate;
    j["embedding"] = detail::embedding_meta(m->embedding);
    bool first = true;
    for (const auto& t : params.tensors()) {
      tensors.push_back(detail::tensor_to_json(t, first));
      first = false;
    }
  } else if (const auto* lr = std::get_if<LogRegHead>(&clf.model)) {
    j["kind"] = "logreg";
    j["embedding"] = detail::embedding_meta(lr->embedding);
    auto& rows = const_cast<RowMatrix&>(lr->embedding.rows);
    tensors.push_back(detail::tensor_to_json({"embedding", rows.data(), rows.rows(), rows.cols()}, true));
    j["logreg"] = {{"w", std::vector<double>(lr->model.w.data(), lr->model.w.data() + lr->model.w.size())},
                   {"b", lr->model.b}};
  } else {
    const auto& gb = std::get<GbdtHead>(clf.model);
    j["kind"] = "gbdt";
    j["embedding"] = detail::embedding_meta(gb.embedding);
    auto& rows = const_cast<RowMatrix&>(gb.embedding.rows);
    tensors.push_back(detail::tensor_to_json({"embedding", rows.data(), rows.rows(), rows.cols()}, true));
    json trees = json::array();
    for (const auto& t : gb.model.trees) trees.push_back(detail::tree_node_to_json(t, 0));
    j["gbdt"] = {{"base_score", gb.model.base_score},
                 {"learning_rate", gb.model.learning_rate},
                 {"max_depth", gb.model.max_depth},
                 {"trees", std::move(trees)}};
  }
  j["tensors"] = std::move(tensors);
  return j;
}

inline Classifier checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "wsd-checkpoint")
      throw InputError("not a wsd checkpoint");
    if (j.at("format_version").get<int>() != kCheckpointVersion)
      throw InputError("unsupported checkpoint version " + j.at("format_version").dump());
    Classifier clf;
    clf.config = detail::config_from_json(j.at("config"));
    const auto& v = j.at("vocab");
    const auto tokens = v.at("tokens").get<std::vector<std::string>>();
    const auto freqs = v.at("frequencies").get<std::vector<std::size_t>>();
    if (tokens.size() != freqs.size()) throw InputError("checkpoint vocabulary is malformed");
    for (std::size_t i = 0; i < tokens.size(); ++i) clf.vocab.add(tokens[i], freqs[i]);
    if (detail::hex64(clf.vocab.fingerprint()) != v.at("hash").get<std::string>())
      throw InputError("checkpoint vocabulary hash mismatch");
    clf.slang.clear();
    for (const auto& [k, val] : j.at("slang").items()) clf.slang[k] = val.get<std::string>();

    const auto& tensors = j.at("tensors");
    const auto kind = j.at("kind").get<std::string>();
    EmbeddingMatrix emb = detail::embedding_from_json(j.at("embedding"), tensors.at(0));
    if (static_cast<std::size_t>(emb.rows.rows()) != clf.vocab.size())
      throw InputError("checkpoint embedding rows do not match the vocabulary");
    if (kind == "recurrent") {
      const auto arch = nn::parse_architecture(j.at("architecture").get<std::string>());
      nn::ModelShape shape = clf.config.shape;
      shape.dropout_rate = j.at("dropout").get<double>();
      nn::ModelParams p = nn::init_model(arch, std::move(emb), shape, 0);
      auto refs = p.tensors();
      if (refs.size() != tensors.size()) throw InputError("checkpoint tensor count mismatch");
      for (std::size_t k = 1; k < refs.size(); ++k)
        detail::tensor_from_json(tensors.at(k), refs[k], false);
      p.check();
      clf.model = std::move(p);
    } else if (kind == "logreg") {
      LogRegHead h;
      h.embedding = std::move(emb);
      const auto w = j.at("logreg").at("w").get<std::vector<double>>();
      h.model.w = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
      h.model.b = j.at("logreg").at("b").get<double>();
      clf.model = std::move(h);
    } else if (kind == "gbdt") {
      GbdtHead h;
      h.embedding = std::move(emb);
      const auto& g = j.at("gbdt");
      h.model.base_score = g.at("base_score").get<double>();
      h.model.learning_rate = g.at("learning_rate").get<double>();
      h.model.max_depth = g.at("max_depth").get<int>();
      for (const auto& t : g.at("trees")) {
        baselines::RegressionTree tree;
        detail::tree_node_from_json(t, tree);
        h.model.trees.push_back(std::move(tree));
      }
      clf.model = std::move(h);
    } else {
      throw InputError("unknown checkpoint kind: " + kind);
    }
    return clf;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const std::filesystem::path& path, const Classifier& clf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write checkpoint: " + path.string());
  out << checkpoint_to_json(clf).dump() << '\n';
}

inline Classifier load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace wsd
