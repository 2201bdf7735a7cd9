// wsd: command-line front end for preparing data, training, evaluating and
// benchmarking the sexist-statement classifiers.
//
// Exit codes: 0 success, 1 user error (bad flags, bad input files), 2 internal
// error (including numerical divergence during training).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wsd/wsd.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

wsd::SlangMap slang_from(const std::string& path) {
  return path.empty() ? wsd::default_slang_map() : wsd::load_slang_map(path);
}

// Loads a prepared split (or any labeled file). Rejected rows are errors here:
// split files are produced by `prepare` and should be clean.
wsd::Corpus load_prepared(const fs::path& path, const wsd::SlangMap& slang) {
  auto res = wsd::load_dataset(path);
  if (res.rejected > 0) {
    std::ostringstream m;
    m << path.string() << ": " << res.rejected << " malformed row(s)";
    for (const auto& d : res.diagnostics) m << "\n  " << d;
    throw wsd::InputError(m.str());
  }
  const auto& cols = res.corpus.columns;
  if (std::find(cols.begin(), cols.end(), wsd::kNormalizedColumn) == cols.end())
    wsd::normalize_corpus(res.corpus, slang);
  else
    std::erase_if(res.corpus.statements, [](const wsd::Statement& s) { return s.tokens.empty(); });
  return std::move(res.corpus);
}

// ---------------------------------------------------------------------------

struct PrepareArgs {
  std::string data, slang_map, out_dir, text_column = "text", label_column = "label";
  double ratio = 0.8;
  std::uint64_t seed = 42;
  bool force = false;
  bool skip_invalid = false;
};

int run_prepare(const PrepareArgs& a) {
  const fs::path out(a.out_dir);
  const auto train_path = out / "train.csv", test_path = out / "test.csv";
  if (!a.force && (fs::exists(train_path) || fs::exists(test_path)))
    throw wsd::InputError(out.string() + " already holds a prepared split (use --force)");
  if (!fs::exists(a.data)) throw wsd::InputError("dataset not found: " + a.data);

  wsd::Schema schema;
  schema.text_column = a.text_column;
  schema.label_column = a.label_column;
  auto loaded = wsd::load_dataset(a.data, schema);
  for (const auto& d : loaded.diagnostics) std::cerr << "warning: " << d << '\n';
  if (loaded.rejected > 0 && !a.skip_invalid)
    throw wsd::InputError(std::to_string(loaded.rejected) +
                          " malformed row(s); fix the input or pass --skip-invalid");

  const auto slang = slang_from(a.slang_map);
  const std::size_t raw = loaded.corpus.size();
  const std::size_t emptied = wsd::normalize_corpus(loaded.corpus, slang);
  auto dedup = wsd::deduplicate(loaded.corpus);
  const auto [pos, neg] = wsd::class_balance(dedup.corpus);
  auto split = wsd::stratified_split(dedup.corpus, a.ratio, a.seed);

  fs::create_directories(out);
  wsd::write_split_csv(train_path, split.train, schema);
  wsd::write_split_csv(test_path, split.test, schema);

  nlohmann::ordered_json stats;
  stats["source"] = a.data;
  stats["rows_loaded"] = raw;
  stats["rows_rejected"] = loaded.rejected;
  stats["empty_after_normalization"] = emptied;
  stats["duplicates_dropped"] = dedup.dropped;
  stats["statements"] = dedup.corpus.size();
  stats["sexist_fraction"] = pos;
  stats["split_ratio"] = a.ratio;
  stats["split_seed"] = a.seed;
  stats["train"] = split.train.size();
  stats["test"] = split.test.size();
  std::ofstream(out / "stats.json") << stats.dump(2) << '\n';

  std::cout << "loaded " << raw << " rows (" << loaded.rejected << " rejected, " << emptied
            << " empty after normalization)\n"
            << "duplicates dropped: " << dedup.dropped << '\n'
            << "statements: " << dedup.corpus.size() << '\n'
            << "class balance: sexist " << fixed(100 * pos, 1) << "%, neutral "
            << fixed(100 * neg, 1) << "%\n"
            << "train: " << split.train.size() << ", test: " << split.test.size() << " -> "
            << out.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config, train_csv, embeddings, out_model, slang_map;
  std::vector<std::string> vocab_from, overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void apply_overrides(std::vector<wsd::ConfigEntry>& entries,
                     const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    if (o.find('=') == std::string::npos)
      throw wsd::InputError("--set expects key=value, got '" + o + "'");
    for (auto& e : wsd::parse_config_text(o)) entries.push_back(std::move(e));
  }
}

int run_train(const TrainArgs& a) {
  auto entries = wsd::read_config_file(a.config);
  apply_overrides(entries, a.overrides);
  auto config = wsd::config_from_entries(entries);
  if (!a.embeddings.empty()) {
    switch (config.embedding_mode()) {
      case wsd::EmbeddingMode::Glove: config.glove_path = a.embeddings; break;
      case wsd::EmbeddingMode::GnGlove: config.gn_glove_path = a.embeddings; break;
      case wsd::EmbeddingMode::Random:
        throw wsd::InputError("--embeddings given but " + wsd::version_id(config.version) +
                              " uses random embeddings");
    }
  }
  config.validate();
  const auto slang = slang_from(a.slang_map);
  const auto train = load_prepared(a.train_csv, slang);
  std::vector<wsd::Corpus> extra;
  for (const auto& p : a.vocab_from) extra.push_back(load_prepared(p, slang));
  std::vector<const wsd::Corpus*> extra_ptrs;
  for (const auto& c : extra) extra_ptrs.push_back(&c);

  const std::uint64_t seed = a.seed_given ? a.seed : config.seeds.front();
  wsd::EmbeddingCache cache;
  auto out = wsd::train_classifier(config, train, extra_ptrs, seed, cache, slang);
  out.classifier.config.seeds = {seed};

  wsd::save_checkpoint(a.out_model, out.classifier);
  std::ofstream sidecar(a.out_model + ".loss.tsv");
  sidecar << "step\tloss\n";
  // Shortest round-trip text keeps the sidecar exact.
  for (std::size_t i = 0; i < out.loss_history.size(); ++i)
    sidecar << i + 1 << '\t' << wsd::detail::format_double(out.loss_history[i]) << '\n';

  std::cout << wsd::version_id(config.version) << " (" << config.entry().description
            << "), seed " << seed << ", vocab " << out.classifier.vocab.size() << '\n';
  if (!out.loss_history.empty())
    std::cout << "final loss: " << fixed(out.loss_history.back(), 6) << '\n';
  std::cout << "checkpoint: " << a.out_model << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string model, test_csv, out_json;
};

int run_eval(const EvalArgs& a) {
  const auto clf = wsd::load_checkpoint(a.model);
  const auto test = load_prepared(a.test_csv, clf.slang);
  const auto ev = wsd::evaluate(clf, test);
  const auto& c = ev.counts;
  std::cout << "examples: " << c.total() << " (tp " << c.tp << ", fp " << c.fp << ", fn "
            << c.fn << ", tn " << c.tn << ")\n"
            << "precision: " << fixed(ev.scores.precision, 4) << '\n'
            << "recall: " << fixed(ev.scores.recall, 4) << '\n'
            << "f1: " << fixed(ev.scores.f1, 4) << '\n';
  if (!a.out_json.empty()) {
    nlohmann::ordered_json j;
    j["model"] = wsd::version_id(clf.config.version);
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["tn"] = c.tn;
    j["precision"] = ev.scores.precision;
    j["recall"] = ev.scores.recall;
    j["f1"] = ev.scores.f1;
    std::ofstream(a.out_json) << j.dump() << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string config_set, data_dir, out_report;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> notes;
  std::size_t threads = 1;
  bool no_timing = false;
  bool quiet = false;
};

int run_bench(const BenchArgs& a) {
  auto configs = wsd::load_config_set(a.config_set);
  for (auto& c : configs) {
    if (!a.seeds.empty()) c.seeds = a.seeds;
    if (a.no_timing) c.record_wallclock = false;
  }
  const fs::path dir(a.data_dir);
  wsd::SplitPair split;
  const auto slang = wsd::default_slang_map();
  split.train = load_prepared(dir / "train.csv", slang);
  split.test = load_prepared(dir / "test.csv", slang);

  wsd::EmbeddingCache cache;
  auto report = wsd::reproduce_table(configs, split, cache, a.quiet ? nullptr : &std::cerr,
                                     a.threads);
  report.header.push_back("data: " + a.data_dir + " (train " +
                          std::to_string(split.train.size()) + ", test " +
                          std::to_string(split.test.size()) + ")");
  for (const auto& n : a.notes) report.header.push_back(n);

  const auto text = report.to_text();
  std::cout << text;
  if (!a.out_report.empty()) {
    fs::path base(a.out_report);
    if (base.has_parent_path()) fs::create_directories(base.parent_path());
    auto txt = base, jsonl = base;
    txt.replace_extension(".txt");
    jsonl.replace_extension(".jsonl");
    std::ofstream(txt, std::ios::binary) << text;
    std::ofstream(jsonl, std::ios::binary) << report.to_jsonl();
  }
  for (const auto& r : report.rows)
    if (r.failed) return kExitInternal;
  return 0;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::string model;
  std::vector<std::string> texts;
  bool from_stdin = false;
};

int run_classify(const ClassifyArgs& a) {
  if (a.texts.empty() == !a.from_stdin)
    throw wsd::InputError("give exactly one of --text or --stdin");
  const auto clf = wsd::load_checkpoint(a.model);
  auto emit = [&](const std::string& line) {
    const auto pred = clf.classify_text(line);
    if (!pred)
      std::cout << "skip\n";
    else
      std::cout << fixed(pred->probability, 4) << '\t' << pred->label << '\n';
  };
  if (a.from_stdin) {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      emit(line);
    }
  } else {
    for (const auto& t : a.texts) emit(t);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct InspectArgs {
  std::string embeddings, vocab_dump;
  std::vector<std::string> corpora;
};

int run_inspect(const InspectArgs& a) {
  const auto table = wsd::parse_embedding_file(wsd::resolve_embedding_path(a.embeddings));
  std::cout << "tokens: " << table.size() << '\n'
            << "dim: " << table.dim << '\n'
            << "duplicates overwritten: " << table.duplicate_count << '\n';
  if (a.corpora.empty()) return 0;
  wsd::VocabBuilder vb;
  for (const auto& p : a.corpora) vb.add(load_prepared(p, wsd::default_slang_map()));
  const auto vocab = vb.build(1);
  std::cout << "vocabulary: " << vocab.size() << " (incl. <pad>, <unk>)\n"
            << "coverage: " << fixed(100 * wsd::coverage(vocab, table), 2) << "%\n";
  if (!a.vocab_dump.empty()) std::ofstream(a.vocab_dump) << vocab.dump();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detects sexist workplace statements with recurrent and baseline models."};
  app.require_subcommand(1);

  PrepareArgs pa;
  auto* prepare = app.add_subcommand("prepare", "Normalize, deduplicate and split a dataset");
  prepare->add_option("--data", pa.data, "Input CSV or JSONL")->required();
  prepare->add_option("--out-dir", pa.out_dir, "Output directory")->required();
  prepare->add_option("--slang-map", pa.slang_map, "TSV slang table (slang<TAB>expansion)");
  prepare->add_option("--ratio", pa.ratio, "Training fraction")->capture_default_str();
  prepare->add_option("--seed", pa.seed, "Split seed")->capture_default_str();
  prepare->add_option("--text-column", pa.text_column)->capture_default_str();
  prepare->add_option("--label-column", pa.label_column)->capture_default_str();
  prepare->add_flag("--force", pa.force, "Overwrite an existing split");
  prepare->add_flag("--skip-invalid", pa.skip_invalid, "Drop malformed rows instead of failing");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train one model and write a checkpoint");
  train->add_option("--config", ta.config, "Experiment config file")->required();
  train->add_option("--train-csv", ta.train_csv, "Prepared training split")->required();
  train->add_option("--out-model", ta.out_model, "Checkpoint path")->required();
  train->add_option("--embeddings", ta.embeddings, "Embedding file for the config's mode");
  train->add_option("--vocab-from", ta.vocab_from, "Extra corpora whose text enters the vocabulary");
  train->add_option("--slang-map", ta.slang_map, "TSV slang table");
  train->add_option("--set", ta.overrides, "Config override, key=value");
  auto* seed_opt = train->add_option("--seed", ta.seed, "Training seed (default: first config seed)");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score a checkpoint on a labeled split");
  eval->add_option("--model", ea.model)->required();
  eval->add_option("--test-csv", ea.test_csv)->required();
  eval->add_option("--out-json", ea.out_json, "Also write the scores as JSON");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a set of experiments and emit the results table");
  bench->add_option("--config-set", ba.config_set)->required();
  bench->add_option("--data-dir", ba.data_dir, "Directory holding train.csv and test.csv")->required();
  bench->add_option("--out-report", ba.out_report, "Report path; .txt and .jsonl are written");
  bench->add_option("--seeds", ba.seeds, "Override every config's seed list")->delimiter(',');
  bench->add_option("--note", ba.notes, "Extra report header line");
  bench->add_option("--threads", ba.threads)->capture_default_str();
  bench->add_flag("--no-timing", ba.no_timing, "Record wall-clock as 0 for byte-stable reports");
  bench->add_flag("--quiet", ba.quiet, "No per-seed progress on stderr");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Print probability and label per statement");
  classify->add_option("--model", ca.model)->required();
  classify->add_option("--text", ca.texts, "Statement to classify (repeatable)");
  classify->add_flag("--stdin", ca.from_stdin, "Read one statement per line");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect-embeddings", "Summarize an embedding file");
  inspect->add_option("--embeddings", ia.embeddings)->required();
  inspect->add_option("--corpus", ia.corpora, "Prepared split(s) for coverage");
  inspect->add_option("--dump-vocab", ia.vocab_dump, "Write the vocabulary dump here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUser;
  }

  try {
    if (*prepare) return run_prepare(pa);
    if (*train) {
      ta.seed_given = seed_opt->count() > 0;
      return run_train(ta);
    }
    if (*eval) return run_eval(ea);
    if (*bench) return run_bench(ba);
    if (*classify) return run_classify(ca);
    if (*inspect) return run_inspect(ia);
  } catch (const wsd::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const wsd::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
