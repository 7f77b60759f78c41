// Copyright 2026 The vdr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vdr/corpus.hpp"
#include "vdr/decoder.hpp"
#include "vdr/diacritics.hpp"
#include "vdr/eval.hpp"
#include "vdr/lm.hpp"
#include "vdr/parallel.hpp"
#include "vdr/phrase_model.hpp"
#include "vdr/seq2seq.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> read_input(const std::string& path) {
  if (path == "-" || path.empty()) return vdr::read_lines(std::cin);
  return vdr::read_lines_file(path);
}

class OutputStream {
 public:
  explicit OutputStream(const std::string& path) {
    if (path != "-" && !path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_train_meta(const std::string& model_path, double seconds) {
  json j;
  j["train_seconds"] = seconds;
  std::ofstream out(model_path + ".meta");
  if (out) out << j.dump() << "\n";
}

double read_train_meta(const std::string& model_path) {
  std::ifstream in(model_path + ".meta");
  if (!in) return -1;
  try {
    json j;
    in >> j;
    return j.value("train_seconds", -1.0);
  } catch (...) {
    return -1;
  }
}

struct ModelPaths {
  std::string dir;
  std::string lm, phrases, neural;
  void resolve() {
    if (lm.empty() && !dir.empty()) lm = (fs::path(dir) / "lm.arpa").string();
    if (phrases.empty() && !dir.empty())
      phrases = (fs::path(dir) / "phrases.txt").string();
    if (neural.empty() && !dir.empty())
      neural = (fs::path(dir) / "neural.bin").string();
  }
};

struct DecoderFlags {
  int beam = 16;
  int max_phrase_len = 4;
  int distortion_limit = 0;
  double delta = 0.5;
  double omega = 1.0;
  double w_lm = 1.0, w_phi = 1.0, w_phi_rev = 1.0, w_dist = 1.0;

  vdr::DecoderConfig config() const {
    vdr::DecoderConfig c;
    c.beam_width = beam;
    c.max_phrase_len = max_phrase_len;
    c.distortion_limit = distortion_limit;
    c.distortion_base = delta;
    c.omega = omega;
    c.weights = {w_lm, w_phi, w_phi_rev, w_dist};
    return c;
  }
  void add_flags(CLI::App* cmd) {
    cmd->add_option("--beam", beam, "beam width per coverage stack");
    cmd->add_option("--max-phrase-len", max_phrase_len, "maximum phrase length");
    cmd->add_option("--distortion-limit", distortion_limit,
                    "reordering window, 0 = monotone");
    cmd->add_option("--delta", delta, "distortion penalty base");
    cmd->add_option("--omega", omega, "output length calibration weight");
    cmd->add_option("--weight-lm", w_lm, "LM feature weight");
    cmd->add_option("--weight-phi", w_phi, "phi(f|e) feature weight");
    cmd->add_option("--weight-phi-rev", w_phi_rev, "phi_rev(e|f) feature weight");
    cmd->add_option("--weight-distortion", w_dist, "distortion feature weight");
  }
  std::map<std::string, std::string> echo() const {
    return {{"beam", std::to_string(beam)},
            {"max_phrase_len", std::to_string(max_phrase_len)},
            {"distortion_limit", std::to_string(distortion_limit)},
            {"delta", std::to_string(delta)},
            {"omega", std::to_string(omega)},
            {"weight_lm", std::to_string(w_lm)},
            {"weight_phi", std::to_string(w_phi)},
            {"weight_phi_rev", std::to_string(w_phi_rev)},
            {"weight_distortion", std::to_string(w_dist)}};
  }
};

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

vdr::TokenCorpus tokenize_lines(const std::vector<std::string>& lines,
                                int jobs) {
  vdr::TokenCorpus out(lines.size());
  vdr::parallel_for(lines.size(), jobs,
                    [&](std::size_t i) { out[i] = vdr::tokenize(lines[i]); });
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"vdr - Vietnamese diacritic restoration toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "configuration file (key = value lines)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // ---- strip ----
  auto* strip_cmd =
      app.add_subcommand("strip", "remove diacritics from text, line by line");
  std::string strip_in = "-", strip_out = "-";
  strip_cmd->add_option("--in", strip_in, "input file (- = stdin)");
  strip_cmd->add_option("--out", strip_out, "output file (- = stdout)");

  // ---- build-corpus ----
  auto* build_cmd = app.add_subcommand(
      "build-corpus", "build the aligned stripped/diacritized corpus");
  std::string build_in = "-", build_out_dir;
  std::size_t build_max_len = 100;
  std::string build_skip_log;
  build_cmd->add_option("--in", build_in, "diacritized text, one sentence per line");
  build_cmd->add_option("--out-dir", build_out_dir, "output directory")
      ->required();
  build_cmd->add_option("--max-len", build_max_len,
                        "skip sentences longer than this many tokens (0 = keep all)");
  build_cmd->add_option("--skip-log", build_skip_log, "write skipped line numbers here");

  // ---- split ----
  auto* split_cmd =
      app.add_subcommand("split", "shuffle and partition a parallel corpus");
  std::string split_source, split_target, split_out_dir;
  vdr::SplitSpec split_spec;
  split_cmd->add_option("--source", split_source, "source side file")->required();
  split_cmd->add_option("--target", split_target, "target side file")->required();
  split_cmd->add_option("--out-dir", split_out_dir, "output directory")->required();
  split_cmd->add_option("--train", split_spec.train_fraction, "train fraction");
  split_cmd->add_option("--dev", split_spec.dev_fraction, "dev fraction");
  split_cmd->add_option("--test", split_spec.test_fraction, "test fraction");
  split_cmd->add_option("--seed", split_spec.seed, "shuffle seed");

  // ---- train-lm ----
  auto* lm_cmd = app.add_subcommand("train-lm", "train the n-gram language model");
  std::string lm_corpus, lm_out;
  vdr::LmConfig lm_config;
  std::string lm_smoothing = "kn";
  lm_cmd->add_option("--corpus", lm_corpus, "diacritized training text")->required();
  lm_cmd->add_option("--out", lm_out, "output ARPA file")->required();
  lm_cmd->add_option("--order", lm_config.order, "n-gram order");
  lm_cmd->add_option("--smoothing", lm_smoothing, "kn | addk");
  lm_cmd->add_option("--discount", lm_config.discount, "Kneser-Ney discount");
  lm_cmd->add_option("--addk", lm_config.add_k, "add-k pseudo count");
  lm_cmd->add_option("--min-count", lm_config.min_count, "vocabulary cutoff");

  // ---- train-phrase ----
  auto* phrase_cmd =
      app.add_subcommand("train-phrase", "extract and estimate the phrase table");
  std::string phrase_source, phrase_target, phrase_out;
  int phrase_max_len = 4, phrase_jobs = 1;
  std::uint64_t phrase_min_count = 1;
  phrase_cmd->add_option("--source", phrase_source, "source side file")->required();
  phrase_cmd->add_option("--target", phrase_target, "target side file")->required();
  phrase_cmd->add_option("--out", phrase_out, "output phrase table")->required();
  phrase_cmd->add_option("--max-phrase-len", phrase_max_len, "maximum phrase length");
  phrase_cmd->add_option("--min-count", phrase_min_count, "prune pairs below this count");
  phrase_cmd->add_option("--jobs", phrase_jobs, "extraction worker threads");

  // ---- train-neural ----
  auto* neural_cmd =
      app.add_subcommand("train-neural", "train the sequence-to-sequence model");
  std::string neural_source, neural_target, neural_dev_source, neural_dev_target,
      neural_out, neural_log;
  vdr::Seq2SeqConfig neural_dims;
  vdr::TrainConfig neural_train;
  neural_cmd->add_option("--source", neural_source)->required();
  neural_cmd->add_option("--target", neural_target)->required();
  neural_cmd->add_option("--dev-source", neural_dev_source)->required();
  neural_cmd->add_option("--dev-target", neural_dev_target)->required();
  neural_cmd->add_option("--out", neural_out, "output model file")->required();
  neural_cmd->add_option("--log", neural_log, "training log (JSON lines)");
  neural_cmd->add_option("--embed-dim", neural_dims.embed_dim);
  neural_cmd->add_option("--hidden-dim", neural_dims.hidden_dim);
  neural_cmd->add_option("--min-count", neural_dims.min_count);
  neural_cmd->add_option("--lr", neural_train.learning_rate);
  neural_cmd->add_option("--batch-size", neural_train.batch_size);
  neural_cmd->add_option("--epochs", neural_train.max_epochs);
  neural_cmd->add_option("--patience", neural_train.patience);
  neural_cmd->add_option("--clip", neural_train.clip_norm);
  neural_cmd->add_option("--seed", neural_train.seed);

  // ---- restore ----
  auto* restore_cmd = app.add_subcommand("restore", "restore diacritics");
  std::string restore_engine;
  ModelPaths restore_models;
  std::string restore_in = "-", restore_out = "-";
  DecoderFlags restore_flags;
  int restore_neural_beam = 1, restore_jobs = 1;
  restore_cmd->add_option("--engine", restore_engine, "phrase | neural")
      ->required()
      ->check(CLI::IsMember({"phrase", "neural"}));
  restore_cmd->add_option("--models", restore_models.dir, "model directory")
      ->envname("VDR_MODELS");
  restore_cmd->add_option("--lm", restore_models.lm, "ARPA language model");
  restore_cmd->add_option("--phrases", restore_models.phrases, "phrase table");
  restore_cmd->add_option("--neural-model", restore_models.neural, "seq2seq model");
  restore_cmd->add_option("--in", restore_in, "input (- = stdin)");
  restore_cmd->add_option("--out", restore_out, "output (- = stdout)");
  restore_cmd->add_option("--neural-beam", restore_neural_beam, "neural beam width");
  restore_cmd->add_option("--jobs", restore_jobs, "worker threads");
  restore_flags.add_flags(restore_cmd);

  // ---- evaluate ----
  auto* eval_cmd = app.add_subcommand("evaluate", "score hypotheses against references");
  std::string eval_hyp, eval_ref, eval_format = "text";
  bool eval_exclude_punct = false, eval_case_insensitive = false;
  int eval_jobs = 1;
  eval_cmd->add_option("--hyp", eval_hyp, "hypothesis file")->required();
  eval_cmd->add_option("--ref", eval_ref, "reference file")->required();
  eval_cmd->add_flag("--exclude-punct", eval_exclude_punct,
                     "skip punctuation reference tokens");
  eval_cmd->add_flag("--case-insensitive", eval_case_insensitive,
                     "ASCII case-insensitive comparison");
  eval_cmd->add_option("--format", eval_format)->check(CLI::IsMember({"text", "json"}));
  eval_cmd->add_option("--jobs", eval_jobs, "worker threads");

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "throughput/accuracy comparison");
  std::string bench_engine = "both";
  ModelPaths bench_models;
  std::string bench_in, bench_ref, bench_format = "text";
  int bench_warmup = 10;
  std::size_t bench_limit = 0;
  DecoderFlags bench_flags;
  int bench_neural_beam = 1;
  bench_cmd->add_option("--engine", bench_engine)
      ->check(CLI::IsMember({"phrase", "neural", "both"}));
  bench_cmd->add_option("--models", bench_models.dir, "model directory")
      ->envname("VDR_MODELS");
  bench_cmd->add_option("--lm", bench_models.lm);
  bench_cmd->add_option("--phrases", bench_models.phrases);
  bench_cmd->add_option("--neural-model", bench_models.neural);
  bench_cmd->add_option("--in", bench_in, "stripped input sentences")->required();
  bench_cmd->add_option("--ref", bench_ref, "diacritized references (optional)");
  bench_cmd->add_option("--warmup", bench_warmup, "untimed warmup restorations");
  bench_cmd->add_option("--limit", bench_limit, "cap the number of sentences (0 = all)");
  bench_cmd->add_option("--format", bench_format)->check(CLI::IsMember({"text", "json"}));
  bench_cmd->add_option("--neural-beam", bench_neural_beam);
  bench_flags.add_flags(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  if (strip_cmd->parsed()) {
    const auto lines = read_input(strip_in);
    OutputStream out(strip_out);
    for (const auto& line : lines)
      out.get() << vdr::strip_text(vdr::normalize(line)) << '\n';
    return 0;
  }

  if (build_cmd->parsed()) {
    const auto raw = read_input(build_in);
    std::vector<std::string> normalized;
    normalized.reserve(raw.size());
    for (const auto& line : raw) normalized.push_back(vdr::normalize(line));
    std::vector<vdr::SkippedSentence> skipped;
    vdr::BuildOptions options;
    options.max_tokens = build_max_len;
    const auto corpus = vdr::build_parallel(normalized, options, &skipped);
    fs::create_directories(build_out_dir);
    const auto dir = fs::path(build_out_dir);
    vdr::write_parallel(corpus, (dir / "source.txt").string(),
                        (dir / "target.txt").string());
    std::ofstream stats(dir / "stats.jsonl");
    json config = {{"max_len", build_max_len}, {"input", build_in}};
    stats << json{{"config", config}}.dump() << "\n";
    vdr::write_corpus_stats(stats, "all", corpus);
    if (!build_skip_log.empty()) {
      std::ofstream skip(build_skip_log);
      for (const auto& s : skipped)
        skip << json{{"line", s.index + 1}, {"tokens", s.tokens}}.dump() << "\n";
    }
    std::cerr << "built " << corpus.size() << " pairs (" << skipped.size()
              << " skipped)\n";
    return 0;
  }

  if (split_cmd->parsed()) {
    const auto corpus = vdr::read_parallel(split_source, split_target);
    const auto split = vdr::split_corpus(corpus, split_spec);
    fs::create_directories(split_out_dir);
    const auto dir = fs::path(split_out_dir);
    vdr::write_parallel(split.train, (dir / "train.source.txt").string(),
                        (dir / "train.target.txt").string());
    vdr::write_parallel(split.dev, (dir / "dev.source.txt").string(),
                        (dir / "dev.target.txt").string());
    vdr::write_parallel(split.test, (dir / "test.source.txt").string(),
                        (dir / "test.target.txt").string());
    std::ofstream stats(dir / "stats.jsonl");
    json config = {{"train", split_spec.train_fraction},
                   {"dev", split_spec.dev_fraction},
                   {"test", split_spec.test_fraction},
                   {"seed", split_spec.seed}};
    stats << json{{"config", config}}.dump() << "\n";
    vdr::write_corpus_stats(stats, "train", split.train);
    vdr::write_corpus_stats(stats, "dev", split.dev);
    vdr::write_corpus_stats(stats, "test", split.test);
    return 0;
  }

  if (lm_cmd->parsed()) {
    lm_config.smoothing = lm_smoothing == "addk"
                              ? vdr::LmConfig::Smoothing::kAddK
                              : vdr::LmConfig::Smoothing::kKneserNey;
    const auto t0 = std::chrono::steady_clock::now();
    const auto lines = vdr::read_lines_file(lm_corpus);
    vdr::TokenCorpus sentences = tokenize_lines(lines, 1);
    const auto model = vdr::train_lm(sentences, lm_config);
    model.save_arpa_file(lm_out);
    write_train_meta(lm_out, seconds_since(t0));
    std::cerr << "trained order-" << lm_config.order << " LM, vocab "
              << model.vocab_size() << "\n";
    return 0;
  }

  if (phrase_cmd->parsed()) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus = vdr::read_parallel(phrase_source, phrase_target);
    const auto counts = vdr::extract_phrases(corpus, phrase_max_len, phrase_jobs);
    const auto table = vdr::estimate_phrase_table(counts, phrase_min_count);
    table.save_file(phrase_out);
    write_train_meta(phrase_out, seconds_since(t0));
    std::cerr << "phrase table: " << table.size() << " entries\n";
    return 0;
  }

  if (neural_cmd->parsed()) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto train = vdr::read_parallel(neural_source, neural_target);
    const auto dev = vdr::read_parallel(neural_dev_source, neural_dev_target);
    std::vector<vdr::TrainLogEntry> log;
    const auto model =
        vdr::train_seq2seq(train, dev, neural_dims, neural_train, &log);
    model.save_file(neural_out);
    write_train_meta(neural_out, seconds_since(t0));
    if (!neural_log.empty()) {
      std::ofstream out(neural_log);
      json config = {{"embed_dim", neural_dims.embed_dim},
                     {"hidden_dim", neural_dims.hidden_dim},
                     {"min_count", neural_dims.min_count},
                     {"lr", neural_train.learning_rate},
                     {"batch_size", neural_train.batch_size},
                     {"epochs", neural_train.max_epochs},
                     {"patience", neural_train.patience},
                     {"clip", neural_train.clip_norm},
                     {"seed", neural_train.seed}};
      out << json{{"config", config}}.dump() << "\n";
      for (const auto& entry : log)
        out << json{{"epoch", entry.epoch},
                    {"train_loss", entry.train_loss},
                    {"dev_loss", entry.dev_loss},
                    {"improved", entry.improved}}
                   .dump()
            << "\n";
    }
    std::cerr << "trained " << log.size() << " epochs\n";
    return 0;
  }

  if (restore_cmd->parsed()) {
    restore_models.resolve();
    const auto lines = read_input(restore_in);
    vdr::TokenCorpus sentences(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i)
      sentences[i] = vdr::tokenize(vdr::normalize(lines[i]));
    std::vector<std::string> outputs(lines.size());

    if (restore_engine == "phrase") {
      const auto lm = vdr::NGramModel::load_arpa_file(restore_models.lm);
      const auto table = vdr::PhraseTable::load_file(restore_models.phrases);
      const auto config = restore_flags.config();
      vdr::parallel_for(sentences.size(), restore_jobs, [&](std::size_t i) {
        outputs[i] = join_tokens(vdr::decode(sentences[i], table, lm, config));
      });
    } else {
      const auto model = vdr::Seq2SeqModel::load_file(restore_models.neural);
      vdr::parallel_for(sentences.size(), restore_jobs, [&](std::size_t i) {
        outputs[i] = join_tokens(
            vdr::restore_neural(model, sentences[i], restore_neural_beam));
      });
    }
    OutputStream out(restore_out);
    for (const auto& line : outputs) out.get() << line << '\n';
    return 0;
  }

  if (eval_cmd->parsed()) {
    const auto hyp = tokenize_lines(vdr::read_lines_file(eval_hyp), eval_jobs);
    const auto ref = tokenize_lines(vdr::read_lines_file(eval_ref), eval_jobs);
    vdr::AccuracyOptions options;
    options.case_sensitive = !eval_case_insensitive;
    options.exclude_punct = eval_exclude_punct;
    const double accuracy = vdr::word_accuracy(hyp, ref, options);
    const double bleu_score = vdr::bleu(hyp, ref);
    char acc_buf[32], bleu_buf[32];
    std::snprintf(acc_buf, sizeof(acc_buf), "%.2f", accuracy);
    std::snprintf(bleu_buf, sizeof(bleu_buf), "%.2f", bleu_score);
    if (eval_format == "json") {
      json j = {{"accuracy", accuracy},
                {"bleu", bleu_score},
                {"config",
                 {{"hyp", eval_hyp},
                  {"ref", eval_ref},
                  {"exclude_punct", eval_exclude_punct},
                  {"case_insensitive", eval_case_insensitive}}}};
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "accuracy " << acc_buf << "\n";
      std::cout << "bleu " << bleu_buf << "\n";
    }
    return 0;
  }

  if (bench_cmd->parsed()) {
    bench_models.resolve();
    auto source = tokenize_lines(vdr::read_lines_file(bench_in), 1);
    vdr::TokenCorpus reference;
    if (!bench_ref.empty())
      reference = tokenize_lines(vdr::read_lines_file(bench_ref), 1);
    if (bench_limit > 0 && source.size() > bench_limit) {
      source.resize(bench_limit);
      if (!reference.empty()) reference.resize(bench_limit);
    }

    // Engines are loaded up front so the benched function is pure decoding.
    std::vector<std::pair<std::string, vdr::RestoreFn>> systems;
    std::optional<vdr::NGramModel> lm;
    std::optional<vdr::PhraseTable> table;
    std::optional<vdr::Seq2SeqModel> neural;
    std::map<std::string, double> train_seconds;
    if (bench_engine != "neural") {
      lm = vdr::NGramModel::load_arpa_file(bench_models.lm);
      table = vdr::PhraseTable::load_file(bench_models.phrases);
      const auto config = bench_flags.config();
      systems.emplace_back("phrase-based",
                           [&lm, &table, config](const std::vector<std::string>& s) {
                             return vdr::decode(s, *table, *lm, config);
                           });
      const double lm_s = read_train_meta(bench_models.lm);
      const double ph_s = read_train_meta(bench_models.phrases);
      if (lm_s >= 0 && ph_s >= 0)
        train_seconds["phrase-based"] = lm_s + ph_s;
    }
    if (bench_engine != "phrase") {
      neural = vdr::Seq2SeqModel::load_file(bench_models.neural);
      const int nbeam = bench_neural_beam;
      systems.emplace_back("neural-based",
                           [&neural, nbeam](const std::vector<std::string>& s) {
                             return vdr::restore_neural(*neural, s, nbeam);
                           });
      const double nn_s = read_train_meta(bench_models.neural);
      if (nn_s >= 0) train_seconds["neural-based"] = nn_s;
    }

    vdr::EvalReport report;
    if (!reference.empty()) {
      report = vdr::compare_report(systems, source, reference, bench_warmup);
    } else {
      for (const auto& [name, fn] : systems) {
        vdr::SystemReport sys;
        sys.name = name;
        sys.bench = vdr::benchmark_throughput(fn, source, bench_warmup);
        report.systems.push_back(std::move(sys));
      }
    }
    for (auto& sys : report.systems) {
      auto it = train_seconds.find(sys.name);
      if (it != train_seconds.end()) sys.train_seconds = it->second;
    }
    report.corpus_id = bench_in;
    report.config = bench_flags.echo();
    report.config["engine"] = bench_engine;
    report.config["warmup"] = std::to_string(bench_warmup);
    if (bench_format == "json")
      std::cout << vdr::render_json(report) << "\n";
    else
      vdr::render_text(std::cout, report);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
