#pragma once

// The recurrent classifiers:
//   Lstm2            embedding -> LSTM -> dropout -> LSTM -> last state -> dropout -> dense
//   BiLstm           embedding -> BiLSTM -> [last fwd ; last bwd] -> dropout -> dense
//   BiLstmAttention  embedding -> BiLSTM -> attention context -> dropout -> dense
// Only the valid prefix of an encoded sequence is ever read, so padding never
// reaches the recurrence, the pooling, or the gradients.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsd/embeddings.hpp"
#include "wsd/error.hpp"
#include "wsd/linalg.hpp"
#include "wsd/nn/attention.hpp"
#include "wsd/nn/layers.hpp"
#include "wsd/nn/lstm.hpp"
#include "wsd/rng.hpp"

namespace wsd::nn {

enum class Architecture { Lstm2, BiLstm, BiLstmAttention };

inline std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::Lstm2: return "lstm2";
    case Architecture::BiLstm: return "bilstm";
    case Architecture::BiLstmAttention: return "bilstm-attention";
  }
  return "?";
}

inline Architecture parse_architecture(std::string_view s) {
  if (s == "lstm2") return Architecture::Lstm2;
  if (s == "bilstm") return Architecture::BiLstm;
  if (s == "bilstm-attention") return Architecture::BiLstmAttention;
  throw InputError("unknown architecture: " + std::string(s));
}

struct ModelShape {
  Eigen::Index hidden = 64;        // per direction
  Eigen::Index attention_dim = 64;
  double dropout_rate = 0.5;
};

// Non-owning view of one parameter tensor, column-major or row-major storage
// flattened in memory order.
struct TensorRef {
  std::string name;
  double* data = nullptr;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  bool trainable = true;

  Eigen::Index size() const { return rows * cols; }
  Eigen::Map<Vector> flat() const { return {data, size()}; }
};

struct ModelParams {
  Architecture arch = Architecture::BiLstmAttention;
  EmbeddingMatrix embedding;
  // Lstm2: {layer 1, layer 2}. BiLstm*: {forward, backward}.
  std::vector<LstmParams> recurrent;
  std::optional<AttentionParams> attention;
  Vector dense_w;
  Vector dense_b = Vector::Zero(1);
  double dropout_rate = 0.5;

  Eigen::Index hidden() const { return recurrent.at(0).hidden_dim(); }
  bool bidirectional() const { return arch != Architecture::Lstm2; }
  Eigen::Index feature_dim() const { return bidirectional() ? 2 * hidden() : hidden(); }

  // Every tensor in a fixed order: embedding, recurrent layers, attention, dense.
  std::vector<TensorRef> tensors() {
    std::vector<TensorRef> out;
    out.push_back({"embedding", embedding.rows.data(), embedding.rows.rows(),
                   embedding.rows.cols(), embedding.trainable});
    const char* names[2][2] = {{"lstm1", "lstm2"}, {"lstm_fwd", "lstm_bwd"}};
    for (std::size_t k = 0; k < recurrent.size(); ++k) {
      const std::string base = names[bidirectional() ? 1 : 0][k];
      auto& r = recurrent[k];
      out.push_back({base + ".W", r.W.data(), r.W.rows(), r.W.cols(), true});
      out.push_back({base + ".U", r.U.data(), r.U.rows(), r.U.cols(), true});
      out.push_back({base + ".b", r.b.data(), r.b.size(), 1, true});
    }
    if (attention) {
      out.push_back({"attention.W", attention->W.data(), attention->W.rows(),
                     attention->W.cols(), true});
      out.push_back({"attention.v", attention->v.data(), attention->v.size(), 1, true});
    }
    out.push_back({"dense.w", dense_w.data(), dense_w.size(), 1, true});
    out.push_back({"dense.b", dense_b.data(), 1, 1, true});
    return out;
  }

  void check() const {
    const std::size_t layers = 2;
    if (recurrent.size() != layers)
      throw std::invalid_argument("model needs exactly two recurrent parameter sets");
    for (const auto& r : recurrent) r.check();
    const auto E = static_cast<Eigen::Index>(embedding.dim());
    if (arch == Architecture::Lstm2) {
      if (recurrent[0].input_dim() != E || recurrent[1].input_dim() != recurrent[0].hidden_dim())
        throw std::invalid_argument("stacked LSTM dimensions do not chain");
    } else {
      if (recurrent[0].input_dim() != E || recurrent[1].input_dim() != E ||
          recurrent[0].hidden_dim() != recurrent[1].hidden_dim())
        throw std::invalid_argument("bidirectional LSTM dimensions do not chain");
    }
    if ((arch == Architecture::BiLstmAttention) != attention.has_value())
      throw std::invalid_argument("attention parameters present iff architecture uses attention");
    if (attention && attention->W.cols() != feature_dim())
      throw std::invalid_argument("attention state dimension mismatch");
    if (dense_w.size() != feature_dim() || dense_b.size() != 1)
      throw std::invalid_argument("dense layer dimension mismatch");
  }
};

// Zero tensors with the same shapes; used as a gradient accumulator.
inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams g;
  g.arch = p.arch;
  g.embedding.mode = p.embedding.mode;
  g.embedding.trainable = p.embedding.trainable;
  g.embedding.rows = RowMatrix::Zero(p.embedding.rows.rows(), p.embedding.rows.cols());
  for (const auto& r : p.recurrent) g.recurrent.emplace_back(r.input_dim(), r.hidden_dim());
  if (p.attention) g.attention.emplace(p.attention->W.cols(), p.attention->W.rows());
  g.dense_w = Vector::Zero(p.dense_w.size());
  g.dense_b = Vector::Zero(1);
  g.dropout_rate = p.dropout_rate;
  return g;
}

inline ModelParams init_model(Architecture arch, EmbeddingMatrix embedding,
                              const ModelShape& shape, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x4e4e));
  ModelParams p;
  p.arch = arch;
  p.embedding = std::move(embedding);
  p.dropout_rate = shape.dropout_rate;
  const auto E = static_cast<Eigen::Index>(p.embedding.dim());
  const auto H = shape.hidden;
  if (arch == Architecture::Lstm2) {
    p.recurrent.push_back(LstmParams::glorot(E, H, rng));
    p.recurrent.push_back(LstmParams::glorot(H, H, rng));
  } else {
    p.recurrent.push_back(LstmParams::glorot(E, H, rng));
    p.recurrent.push_back(LstmParams::glorot(E, H, rng));
  }
  const Eigen::Index D = arch == Architecture::Lstm2 ? H : 2 * H;
  if (arch == Architecture::BiLstmAttention)
    p.attention = AttentionParams::glorot(D, shape.attention_dim, rng);
  const double ld = std::sqrt(6.0 / static_cast<double>(D + 1));
  p.dense_w.resize(D);
  for (Eigen::Index k = 0; k < D; ++k) p.dense_w(k) = rng.uniform(-ld, ld);
  p.dense_b = Vector::Zero(1);
  p.check();
  return p;
}

// Columns of the embedding matrix for the valid prefix (E x T).
inline Matrix gather_embeddings(const EncodedSequence& seq, const EmbeddingMatrix& emb) {
  if (seq.valid_length == 0) throw InputError("empty sequence");
  const auto T = static_cast<Eigen::Index>(seq.valid_length);
  Matrix x(emb.rows.cols(), T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const int id = seq.ids[static_cast<std::size_t>(t)];
    if (id < 0 || id >= emb.rows.rows())
      throw std::invalid_argument("token index out of range: " + std::to_string(id));
    x.col(t) = emb.rows.row(id).transpose();
  }
  return x;
}

// Hidden states of one layer over an encoded sequence, H x max_len, padding
// columns zero.
inline Matrix lstm_layer_forward(const EncodedSequence& seq, const EmbeddingMatrix& emb,
                                 const LstmParams& p, Direction direction) {
  const Matrix x = gather_embeddings(seq, emb);
  Matrix out = Matrix::Zero(p.hidden_dim(), static_cast<Eigen::Index>(seq.ids.size()));
  out.leftCols(x.cols()) = lstm_layer_forward(x, p, direction).hidden_time_order();
  return out;
}

// [h_fwd_t ; h_bwd_t] per position, 2H x max_len, padding columns zero.
inline Matrix bilstm_forward(const EncodedSequence& seq, const EmbeddingMatrix& emb,
                             const LstmParams& p_fwd, const LstmParams& p_bwd) {
  const Matrix x = gather_embeddings(seq, emb);
  const auto H = p_fwd.hidden_dim();
  Matrix out = Matrix::Zero(2 * H, static_cast<Eigen::Index>(seq.ids.size()));
  out.topLeftCorner(H, x.cols()) =
      lstm_layer_forward(x, p_fwd, Direction::Forward).hidden_time_order();
  out.bottomLeftCorner(p_bwd.hidden_dim(), x.cols()) =
      lstm_layer_forward(x, p_bwd, Direction::Backward).hidden_time_order();
  return out;
}

// Inverted-dropout multipliers for one forward pass. Empty == evaluation.
struct DropoutMasks {
  Matrix between;  // Lstm2 only: H x T between the stacked layers
  Vector dense;    // before the dense layer
  bool active() const { return dense.size() > 0; }
};

inline DropoutMasks draw_masks(const ModelParams& p, std::size_t valid_length, Rng& rng) {
  DropoutMasks m;
  const auto T = static_cast<Eigen::Index>(valid_length);
  if (p.arch == Architecture::Lstm2)
    m.between = dropout_mask(p.hidden(), T, p.dropout_rate, rng);
  m.dense = dropout_mask(p.feature_dim(), 1, p.dropout_rate, rng).col(0);
  return m;
}

struct ForwardTrace {
  Architecture arch = Architecture::BiLstmAttention;
  std::vector<int> ids;  // valid prefix
  std::size_t max_len = 0;
  Matrix x;                          // E x T
  std::vector<LstmTrace> layers;     // same order as ModelParams::recurrent
  Matrix between;                    // Lstm2: layer-1 output after dropout
  Matrix states;                     // BiLstm*: 2H x T
  std::optional<AttentionTrace> attention;
  DropoutMasks masks;
  Vector feature;                    // pooled representation before dropout
  Vector feature_dropped;
  double logit = 0.0;
  double probability = 0.5;

  // Attention weights over all max_len positions (padding = 0).
  Vector attention_weights() const {
    if (!attention) return {};
    return padded_weights(*attention, static_cast<Eigen::Index>(max_len));
  }
};

inline ForwardTrace forward(const ModelParams& p, const EncodedSequence& seq,
                            const DropoutMasks* masks = nullptr) {
  ForwardTrace tr;
  tr.arch = p.arch;
  tr.max_len = seq.ids.size();
  tr.x = gather_embeddings(seq, p.embedding);
  tr.ids.assign(seq.ids.begin(), seq.ids.begin() + static_cast<long>(seq.valid_length));
  const auto T = tr.x.cols();
  if (masks && masks->active()) tr.masks = *masks;

  if (p.arch == Architecture::Lstm2) {
    tr.layers.push_back(lstm_layer_forward(tr.x, p.recurrent[0], Direction::Forward));
    tr.between = tr.layers[0].h;
    if (tr.masks.active()) {
      if (tr.masks.between.rows() != tr.between.rows() || tr.masks.between.cols() != T)
        throw std::invalid_argument("dropout mask shape mismatch");
      tr.between = tr.between.cwiseProduct(tr.masks.between);
    }
    tr.layers.push_back(lstm_layer_forward(tr.between, p.recurrent[1], Direction::Forward));
    tr.feature = tr.layers[1].h.col(T - 1);
  } else {
    tr.layers.push_back(lstm_layer_forward(tr.x, p.recurrent[0], Direction::Forward));
    tr.layers.push_back(lstm_layer_forward(tr.x, p.recurrent[1], Direction::Backward));
    const auto H = p.hidden();
    tr.states.resize(2 * H, T);
    tr.states.topRows(H) = tr.layers[0].hidden_time_order();
    tr.states.bottomRows(H) = tr.layers[1].hidden_time_order();
    if (p.arch == Architecture::BiLstmAttention) {
      tr.attention = attention_forward(tr.states, T, *p.attention);
      tr.feature = tr.attention->context;
    } else {
      tr.feature.resize(2 * H);
      tr.feature.head(H) = tr.states.col(T - 1).head(H);
      tr.feature.tail(H) = tr.states.col(0).tail(H);
    }
  }
  tr.feature_dropped = tr.feature;
  if (tr.masks.active()) {
    if (tr.masks.dense.size() != tr.feature.size())
      throw std::invalid_argument("dropout mask shape mismatch");
    tr.feature_dropped = tr.feature.cwiseProduct(tr.masks.dense);
  }
  tr.logit = dense_logit(tr.feature_dropped, p.dense_w, p.dense_b(0));
  tr.probability = sigmoid(tr.logit);
  return tr;
}

inline double loss(const ModelParams& p, const EncodedSequence& seq, int label,
                   const DropoutMasks* masks = nullptr) {
  return bce_loss(forward(p, seq, masks).probability, label);
}

// Exact gradient of bce_loss(forward(...).probability, label) with respect to
// every tensor of `p`, dropout masks held fixed. Embedding rows not present in
// the valid prefix get zero gradient.
inline ModelParams backward(const ForwardTrace& tr, int label, const ModelParams& p) {
  if (tr.arch != p.arch || tr.layers.size() != p.recurrent.size() ||
      tr.feature.size() != p.dense_w.size() ||
      tr.x.rows() != static_cast<Eigen::Index>(p.embedding.dim()))
    throw std::invalid_argument("forward trace does not match model parameters");
  ModelParams g = zeros_like(p);
  const double dz = bce_logit_grad(tr.probability, label);
  g.dense_w = dz * tr.feature_dropped;
  g.dense_b(0) = dz;
  Vector d_feature = dz * p.dense_w;
  if (tr.masks.active()) d_feature = d_feature.cwiseProduct(tr.masks.dense);

  const auto T = tr.x.cols();
  Matrix dx;
  if (p.arch == Architecture::Lstm2) {
    Matrix dh2 = Matrix::Zero(p.hidden(), T);
    dh2.col(T - 1) = d_feature;
    Matrix d_between = lstm_layer_backward(tr.layers[1], p.recurrent[1], dh2, g.recurrent[1]);
    if (tr.masks.active()) d_between = d_between.cwiseProduct(tr.masks.between);
    dx = lstm_layer_backward(tr.layers[0], p.recurrent[0], d_between, g.recurrent[0]);
  } else {
    const auto H = p.hidden();
    Matrix d_states;
    if (p.arch == Architecture::BiLstmAttention) {
      d_states = attention_backward(*tr.attention, *p.attention, d_feature, *g.attention);
    } else {
      d_states = Matrix::Zero(2 * H, T);
      d_states.col(T - 1).head(H) = d_feature.head(H);
      d_states.col(0).tail(H) += d_feature.tail(H);
    }
    dx = lstm_layer_backward(tr.layers[0], p.recurrent[0], d_states.topRows(H), g.recurrent[0]);
    dx += lstm_layer_backward(tr.layers[1], p.recurrent[1], d_states.bottomRows(H), g.recurrent[1]);
  }
  for (Eigen::Index t = 0; t < T; ++t) {
    const int id = tr.ids[static_cast<std::size_t>(t)];
    if (id == kPadIndex) continue;
    g.embedding.rows.row(id) += dx.col(t).transpose();
  }
  return g;
}

struct Prediction {
  double probability = 0.5;
  int label = 1;
};

// Evaluation-mode forward pass. Ties at 0.5 go to the positive class.
inline Prediction predict(const ModelParams& p, const EncodedSequence& seq) {
  const double prob = forward(p, seq).probability;
  return {prob, prob >= 0.5 ? 1 : 0};
}

}  // namespace wsd::nn
