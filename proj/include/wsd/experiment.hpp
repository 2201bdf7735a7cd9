#pragma once

// Training dispatch, evaluation, and the results-table report.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "wsd/baselines.hpp"
#include "wsd/classifier.hpp"
#include "wsd/config.hpp"
#include "wsd/corpus.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/metrics.hpp"
#include "wsd/nn/train.hpp"

namespace wsd {

inline constexpr const char* kEmbeddingPathEnv = "WSD_EMBEDDINGS_PATH";

// Resolves an embedding file name. Paths that exist are used as given;
// otherwise a relative name is looked up in each directory listed in
// $WSD_EMBEDDINGS_PATH (colon-separated).
inline std::filesystem::path resolve_embedding_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (name.empty()) throw InputError("no embedding file configured");
  fs::path p(name);
  if (fs::exists(p)) return p;
  if (p.is_relative()) {
    if (const char* env = std::getenv(kEmbeddingPathEnv)) {
      std::stringstream ss(env);
      std::string dir;
      while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        fs::path candidate = fs::path(dir) / p;
        if (fs::exists(candidate)) return candidate;
      }
    }
  }
  throw InputError("embedding file not found: " + name);
}

// Parsed embedding tables shared across experiments. Thread-safe.
class EmbeddingCache {
 public:
  std::shared_ptr<const EmbeddingTable> get(const std::string& name) {
    const auto path = resolve_embedding_path(name);
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = tables_[path.string()];
    if (!slot) slot = std::make_shared<EmbeddingTable>(parse_embedding_file(path));
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const EmbeddingTable>> tables_;
};

struct TrainOutput {
  Classifier classifier;
  std::vector<double> loss_history;
  std::size_t epochs_run = 0;
};

// Trains one model. The vocabulary covers the training tokens plus any extra
// corpora (labels of extra corpora are never read).
inline TrainOutput train_classifier(const ExperimentConfig& config, const Corpus& train,
                                    const std::vector<const Corpus*>& vocab_extra,
                                    std::uint64_t seed, EmbeddingCache& cache,
                                    const SlangMap& slang = default_slang_map()) {
  config.validate();
  if (train.empty()) throw InputError("training set is empty");
  const auto& entry = config.entry();
  TrainOutput out;
  out.classifier.config = config;
  out.classifier.slang = slang;

  VocabBuilder vb;
  vb.add(train);
  for (const auto* c : vocab_extra) vb.add(*c);
  out.classifier.vocab = vb.build(config.min_freq);
  const auto& vocab = out.classifier.vocab;

  std::shared_ptr<const EmbeddingTable> table;
  if (entry.mode != EmbeddingMode::Random) table = cache.get(config.embedding_path());
  EmbeddingMatrix matrix =
      build_matrix(vocab, table.get(), config.embedding_dim, entry.mode, seed);

  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& s : train.statements) labels.push_back(s.label);

  if (entry.kind == ModelKind::Recurrent) {
    matrix.trainable = config.trainable_embeddings;
    nn::ModelParams init = nn::init_model(entry.arch, std::move(matrix), config.shape, seed);
    std::vector<nn::LabeledSequence> data;
    for (const auto& s : train.statements) {
      if (s.tokens.empty()) continue;
      data.push_back({encode(s.tokens, vocab, config.max_len), s.label});
    }
    nn::FitOptions fo;
    fo.epochs = config.epochs;
    fo.batch_size = config.batch_size;
    fo.adam = config.adam;
    fo.seed = seed;
    auto fit = nn::fit(std::move(init), data, fo);
    out.loss_history = std::move(fit.loss_history);
    out.epochs_run = fit.epochs_run;
    out.classifier.model = std::move(fit.params);
  } else {
    matrix.trainable = false;
    std::vector<Vector> features;
    features.reserve(train.size());
    for (const auto& s : train.statements)
      features.push_back(baselines::mean_embedding(s.tokens, vocab, matrix));
    if (entry.kind == ModelKind::LogReg) {
      auto opt = config.logreg;
      opt.seed = seed;
      auto fit = baselines::logreg_fit(features, labels, opt);
      out.loss_history = std::move(fit.loss_history);
      out.epochs_run = opt.epochs;
      out.classifier.model = LogRegHead{std::move(matrix), std::move(fit.model)};
    } else {
      auto opt = config.gbdt;
      opt.seed = seed;
      auto model = baselines::gbdt_fit(features, labels, opt);
      for (std::size_t t = 1; t <= model.trees.size(); ++t) {
        baselines::GbdtModel partial = model;
        partial.trees.resize(t);
        out.loss_history.push_back(baselines::gbdt_training_loss(partial, features, labels));
      }
      out.epochs_run = opt.n_trees;
      out.classifier.model = GbdtHead{std::move(matrix), std::move(model)};
    }
  }
  return out;
}

struct Evaluation {
  ConfusionCounts counts;
  Scores scores;
  std::vector<int> predictions;
};

inline Evaluation evaluate(const Classifier& clf, const Corpus& test) {
  Evaluation ev;
  std::vector<int> golds;
  for (const auto& s : test.statements) {
    const auto pred = clf.classify_tokens(s.tokens);
    if (!pred) continue;  // empty statements are never admitted to a split
    ev.predictions.push_back(pred->label);
    golds.push_back(s.label);
  }
  ev.counts = confusion(ev.predictions, golds);
  ev.scores = precision_recall_f1(ev.counts);
  return ev;
}

// ---------------------------------------------------------------------------
// Report

struct ReportRow {
  std::string model;
  std::string description;
  std::string embedding;
  std::string seed;  // decimal seed, or "mean" / "std" for aggregates
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t epochs = 0;
  double wallclock_s = 0.0;
  std::string config_hash;
  bool failed = false;
  std::string error;

  bool aggregate() const { return seed == "mean" || seed == "std"; }
};

struct MetricsReport {
  std::vector<std::string> header;  // free-form notes, printed as '#' lines
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view model, std::string_view seed) const {
    for (const auto& r : rows)
      if (r.model == model && r.seed == seed) return &r;
    return nullptr;
  }

  // JSON lines, one object per row.
  std::string to_jsonl() const {
    std::string out;
    for (const auto& r : rows) {
      nlohmann::ordered_json j;
      j["model"] = r.model;
      j["description"] = r.description;
      j["embedding"] = r.embedding;
      if (r.aggregate()) j["seed"] = r.seed;
      else j["seed"] = std::stoull(r.seed);
      if (r.failed) {
        j["precision"] = nullptr;
        j["recall"] = nullptr;
        j["f1"] = nullptr;
      } else {
        j["precision"] = r.precision;
        j["recall"] = r.recall;
        j["f1"] = r.f1;
      }
      j["epochs"] = r.epochs;
      j["wallclock_s"] = r.wallclock_s;
      j["config_hash"] = r.config_hash;
      if (r.failed) {
        j["status"] = "failed";
        j["error"] = r.error;
      }
      out += j.dump();
      out += '\n';
    }
    return out;
  }

  // Aligned plain-text table. Aggregate rows show mean and sample stddev.
  std::string to_text() const {
    std::ostringstream o;
    for (const auto& h : header) o << "# " << h << '\n';
    auto fmt = [](double v) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(4) << v;
      return s.str();
    };
    o << std::left << std::setw(6) << "Model" << std::setw(28) << "Description"
      << std::setw(10) << "Embedding" << std::setw(10) << "Seed" << std::setw(17)
      << "Precision" << std::setw(17) << "Recall" << std::setw(17) << "F1"
      << std::setw(8) << "Epochs" << "Wall(s)" << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.seed == "std") continue;
      o << std::setw(6) << r.model << std::setw(28) << r.description << std::setw(10)
        << r.embedding << std::setw(10) << r.seed;
      if (r.failed) {
        o << "failed: " << r.error << '\n';
        continue;
      }
      const ReportRow* sd = r.seed == "mean" ? find(r.model, "std") : nullptr;
      auto cell = [&](double v, double s) {
        return sd ? fmt(v) + "±" + fmt(s) : fmt(v);
      };
      o << std::setw(17 + (sd ? 1 : 0)) << cell(r.precision, sd ? sd->precision : 0)
        << std::setw(17 + (sd ? 1 : 0)) << cell(r.recall, sd ? sd->recall : 0)
        << std::setw(17 + (sd ? 1 : 0)) << cell(r.f1, sd ? sd->f1 : 0) << std::setw(8)
        << r.epochs << std::fixed << std::setprecision(2) << r.wallclock_s << '\n';
    }
    return o.str();
  }
};

// One row per seed, then "mean" and "std" rows. Throws on training failure
// with the config attached to the message.
inline std::vector<ReportRow> run_experiment(const ExperimentConfig& config,
                                             const SplitPair& data, EmbeddingCache& cache,
                                             std::ostream* log = nullptr) {
  const auto& entry = config.entry();
  std::vector<ReportRow> rows;
  std::vector<double> ps, rs, fs;
  for (auto seed : config.seeds) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainOutput trained;
    try {
      trained = train_classifier(config, data.train, {&data.test}, seed, cache);
    } catch (const NumericError& e) {
      throw NumericError(std::string(entry.id) + " seed " + std::to_string(seed) + " [" +
                         config.hash() + "]: " + e.what());
    }
    const auto ev = evaluate(trained.classifier, data.test);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ReportRow row;
    row.model = std::string(entry.id);
    row.description = std::string(entry.description);
    row.embedding = to_string(entry.mode);
    row.seed = std::to_string(seed);
    row.precision = ev.scores.precision;
    row.recall = ev.scores.recall;
    row.f1 = ev.scores.f1;
    row.epochs = trained.epochs_run;
    row.wallclock_s = config.record_wallclock ? secs : 0.0;
    row.config_hash = config.hash();
    if (log)
      *log << entry.id << " seed " << seed << ": epochs " << trained.epochs_run << ", "
           << std::fixed << std::setprecision(2) << secs << " s, P/R/F1 "
           << std::setprecision(4) << row.precision << '/' << row.recall << '/' << row.f1
           << std::endl;
    ps.push_back(row.precision);
    rs.push_back(row.recall);
    fs.push_back(row.f1);
    rows.push_back(std::move(row));
  }
  const auto mp = mean_std(ps), mr = mean_std(rs), mf = mean_std(fs);
  ReportRow mean = rows.front(), sd = rows.front();
  mean.seed = "mean";
  sd.seed = "std";
  mean.precision = mp.mean;
  mean.recall = mr.mean;
  mean.f1 = mf.mean;
  sd.precision = mp.stddev;
  sd.recall = mr.stddev;
  sd.f1 = mf.stddev;
  double wall = 0.0;
  for (std::size_t i = 0; i < config.seeds.size(); ++i) wall += rows[i].wallclock_s;
  mean.wallclock_s = sd.wallclock_s = wall;
  rows.push_back(std::move(mean));
  rows.push_back(std::move(sd));
  return rows;
}

// Runs every config, in ladder order, on up to `threads` worker threads. A
// failed experiment becomes a single "failed" row; the others still run.
inline MetricsReport reproduce_table(std::vector<ExperimentConfig> configs, const SplitPair& data,
                                     EmbeddingCache& cache, std::ostream* log = nullptr,
                                     std::size_t threads = 1) {
  auto rank = [](const ExperimentConfig& c) {
    for (std::size_t i = 0; i < kLadder.size(); ++i)
      if (kLadder[i].version == c.version) return i;
    return kLadder.size();
  };
  std::stable_sort(configs.begin(), configs.end(),
                   [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
  std::vector<std::vector<ReportRow>> results(configs.size());
  std::mutex log_mu;
  auto run_one = [&](std::size_t i) {
    const auto& c = configs[i];
    std::ostringstream local;
    try {
      results[i] = run_experiment(c, data, cache, log ? &local : nullptr);
    } catch (const std::exception& e) {
      ReportRow r;
      r.model = std::string(c.entry().id);
      r.description = std::string(c.entry().description);
      r.embedding = to_string(c.embedding_mode());
      r.seed = "mean";
      r.config_hash = c.hash();
      r.failed = true;
      r.error = e.what();
      results[i] = {r};
      if (log) local << c.entry().id << " failed: " << e.what() << '\n';
    }
    if (log) {
      std::lock_guard<std::mutex> lock(log_mu);
      *log << local.str() << std::flush;
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
  } else {
    std::mutex next_mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, configs.size()); ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(next_mu);
            if (next >= configs.size()) return;
            i = next++;
          }
          run_one(i);
        }
      });
    for (auto& th : pool) th.join();
  }
  MetricsReport report;
  for (auto& rs : results)
    for (auto& r : rs) report.rows.push_back(std::move(r));
  return report;
}

}  // namespace wsd
