#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "wsd/baselines.hpp"
#include "wsd/config.hpp"
#include "wsd/corpus.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/nn/model.hpp"

namespace wsd {

struct LogRegHead {
  EmbeddingMatrix embedding;
  baselines::LogRegModel model;
};

struct GbdtHead {
  EmbeddingMatrix embedding;
  baselines::GbdtModel model;
};

// A trained model together with everything needed to score raw text.
struct Classifier {
  ExperimentConfig config;
  Vocabulary vocab;
  SlangMap slang = default_slang_map();
  std::variant<nn::ModelParams, LogRegHead, GbdtHead> model;

  // nullopt for an empty statement.
  std::optional<nn::Prediction> classify_tokens(const Tokens& tokens) const {
    if (tokens.empty()) return std::nullopt;
    double p = 0.5;
    if (const auto* m = std::get_if<nn::ModelParams>(&model)) {
      return nn::predict(*m, encode(tokens, vocab, config.max_len));
    } else if (const auto* lr = std::get_if<LogRegHead>(&model)) {
      p = lr->model.predict(baselines::mean_embedding(tokens, vocab, lr->embedding));
    } else {
      const auto& gb = std::get<GbdtHead>(model);
      p = baselines::gbdt_predict(gb.model, baselines::mean_embedding(tokens, vocab, gb.embedding));
    }
    return nn::Prediction{p, p >= 0.5 ? 1 : 0};
  }

  std::optional<nn::Prediction> classify_text(std::string_view raw) const {
    return classify_tokens(normalize_statement(raw, slang));
  }
};

}  // namespace wsd
