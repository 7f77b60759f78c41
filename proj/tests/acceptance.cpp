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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "support/toy_pipeline.hpp"
#include "vdr/corpus.hpp"
#include "vdr/decoder.hpp"
#include "vdr/diacritics.hpp"
#include "vdr/eval.hpp"
#include "vdr/lm.hpp"
#include "vdr/phrase_model.hpp"
#include "vdr/seq2seq.hpp"
#include "vdr/utf8.hpp"
#include "viet_corpus.hpp"

using namespace vdr;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void expect(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Shared desk-scale artifacts built once.
struct Fixture {
  ParallelCorpus corpus;
  CorpusSplit split;
  PhraseTable table;
  NGramModel lm{NGramModel::train({{"x"}}, LmConfig{})};

  Fixture() {
    const auto sentences = textgen::make_corpus(5200, 20260809);
    std::vector<std::string> normalized;
    normalized.reserve(sentences.size());
    for (const auto& s : sentences) normalized.push_back(normalize(s));
    corpus = build_parallel(normalized);
    SplitSpec spec;
    spec.seed = 4;
    split = split_corpus(corpus, spec);
    table = estimate_phrase_table(extract_phrases(split.train, 4, 2));
    LmConfig lm_config;
    lm_config.order = 3;
    lm = train_lm(target_sentences(split.train), lm_config);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

// ---- criterion 1 -----------------------------------------------------

Check criterion_map_integrity() {
  Check c;
  const DiacriticMap& map = diacritic_map();
  std::size_t variants = 0;
  for (char32_t base : map.base_letters()) {
    for (char32_t lower : map.variants(base)) {
      ++variants;
      const auto info = map.lookup(lower);
      c.expect(info.has_value(), "variant without decomposition");
      if (!info) continue;
      const auto back = map.compose(info->base, info->shape, info->tone, false);
      c.expect(back && *back == lower, "compose(lookup(v)) != v");
      c.expect(map.strip(lower) == base, "strip(v) != base");
    }
  }
  c.expect(variants == 74, "inventory should hold 12*6+2 = 74 variants, got " +
                               std::to_string(variants));

  // idempotence + length preservation over random mixed strings
  std::vector<char32_t> alphabet = {U'a', U'Z', U'0', U'.', U' ', U'中',
                                    U'ß', U'!', U'~'};
  for (char32_t base : map.base_letters())
    for (char32_t v : map.variants(base)) {
      alphabet.push_back(v);
      const auto upper = map.lookup(v);
      if (upper) {
        const auto u = map.compose(upper->base, upper->shape, upper->tone, true);
        if (u) alphabet.push_back(*u);
      }
    }
  std::mt19937_64 rng(1);
  for (int round = 0; round < 10000; ++round) {
    std::u32string s;
    const std::size_t len = rng() % 32;
    for (std::size_t i = 0; i < len; ++i)
      s.push_back(alphabet[rng() % alphabet.size()]);
    const std::string text = utf8_encode(s);
    const std::string stripped = strip_text(text);
    if (strip_text(stripped) != stripped) {
      c.expect(false, "strip_text not idempotent on a random string");
      break;
    }
    if (utf8_decode(stripped).size() != s.size()) {
      c.expect(false, "strip_text changed the character count");
      break;
    }
    if (tokenize(stripped).size() != tokenize(text).size()) {
      c.expect(false, "strip_text changed the token count");
      break;
    }
  }
  return c;
}

// ---- criterion 2 -----------------------------------------------------

Check criterion_oracle_equivalence() {
  Check c;
  DecoderConfig config;
  config.beam_width = 50;
  config.max_phrase_len = 2;
  int instances = 0;
  double worst = 0;
  for (std::uint64_t seed = 1000; instances < 100; ++seed) {
    const auto inst = testsupport::random_instance(seed, 1);
    const auto& source = inst.sources[0];
    for (int limit : {0, 1}) {
      config.distortion_limit = limit;
      const auto oracle =
          brute_force_decode(source, inst.models.table, inst.models.lm, config);
      const auto beam =
          decode_scored(source, inst.models.table, inst.models.lm, config);
      worst = std::max(worst, std::abs(oracle.score - beam.score));
    }
    ++instances;
  }
  c.expect(worst <= 1e-9,
           "max |oracle - beam| score gap " + fmt(worst) + " over 1e-9");
  c.detail = c.detail.empty() ? "max score gap " + fmt(worst) : c.detail;
  return c;
}

// ---- criterion 3 -----------------------------------------------------

Check criterion_round_trip() {
  Check c;
  auto& f = fixture();
  DecoderConfig config;
  std::size_t checked = 0;
  for (const auto* part : {&f.split.dev, &f.split.test}) {
    for (const auto& pair : part->pairs) {
      if (checked >= 1000) break;
      const auto out = decode(pair.source, f.table, f.lm, config);
      if (out.size() != pair.source.size()) {
        c.expect(false, "decode changed the token count");
        return c;
      }
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (strip_text(out[i]) != pair.source[i]) {
          c.expect(false, "strip(decode(x)) != x at token " + out[i]);
          return c;
        }
      }
      ++checked;
    }
  }
  c.expect(checked >= 1000, "needs >= 1000 held-out sentences, had " +
                                std::to_string(checked));
  c.detail = std::to_string(checked) + " sentences";
  return c;
}

// ---- criterion 4 -----------------------------------------------------

Check criterion_ambiguity_case() {
  Check c;
  const auto models = testsupport::train_toy(textgen::ambiguity_corpus(), 4);
  const auto out =
      decode(tokenize("Co ay rat dam dang"), models.table, models.lm, {});
  std::string joined;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) joined.push_back(' ');
    joined += out[i];
  }
  c.expect(joined == "Cô ấy rất đảm đang",
           "expected 'Cô ấy rất đảm đang', got '" + joined + "'");
  c.detail = joined;
  return c;
}

// ---- criterion 5 -----------------------------------------------------

Check criterion_desk_scale_accuracy() {
  Check c;
  auto& f = fixture();
  DecoderConfig config;

  // training-set tokens, for the all-in-train filter
  std::unordered_set<std::string> train_tokens;
  for (const auto& pair : f.split.train.pairs)
    for (const auto& tok : pair.target) train_tokens.insert(tok);

  TokenCorpus test_hyp, test_ref;
  for (const auto& pair : f.split.test.pairs) {
    bool all_known = true;
    for (const auto& tok : pair.target)
      if (!train_tokens.count(tok)) all_known = false;
    if (!all_known) continue;
    test_hyp.push_back(decode(pair.source, f.table, f.lm, config));
    test_ref.push_back(pair.target);
  }
  c.expect(test_hyp.size() >= 100,
           "too few all-known test sentences: " + std::to_string(test_hyp.size()));
  const double test_accuracy = word_accuracy(test_hyp, test_ref);
  c.expect(test_accuracy >= 90.0,
           "test accuracy " + fmt(test_accuracy) + " below 90");

  TokenCorpus train_hyp, train_ref;
  for (const auto& pair : f.split.train.pairs) {
    train_hyp.push_back(decode(pair.source, f.table, f.lm, config));
    train_ref.push_back(pair.target);
  }
  const double train_accuracy = word_accuracy(train_hyp, train_ref);
  c.expect(train_accuracy >= 99.5,
           "training-set accuracy " + fmt(train_accuracy) + " below 99.5");
  c.detail = "test " + fmt(test_accuracy) + "% on " +
             std::to_string(test_hyp.size()) + " sentences, train " +
             fmt(train_accuracy) + "%";
  return c;
}

// ---- criterion 6 -----------------------------------------------------

Check criterion_normalizations() {
  Check c;
  auto& f = fixture();

  double worst_mass = 0;
  for (const auto& ctx : f.lm.sample_contexts(1000, 99))
    worst_mass = std::max(worst_mass, std::abs(f.lm.context_mass(ctx) - 1.0));
  c.expect(worst_mass <= 1e-6,
           "LM context mass off by " + fmt(worst_mass) + " (limit 1e-6)");

  const double table_err = f.table.max_normalization_error();
  c.expect(table_err <= 1e-9,
           "phrase table normalization off by " + fmt(table_err));

  // softmax normalization over random states
  const auto corpus = build_parallel({"cô ấy rất đảm đang", "hôm nay mưa"});
  auto [src_vocab, tgt_vocab] = build_vocab(corpus, 1);
  Seq2SeqConfig dims;
  dims.embed_dim = 12;
  dims.hidden_dim = 16;
  const Seq2SeqModel model(src_vocab, tgt_vocab, dims, 8);
  std::mt19937_64 rng(5);
  double worst_softmax = 0;
  std::vector<double> h(dims.hidden_dim);
  for (int round = 0; round < 200; ++round) {
    for (double& x : h)
      x = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0) * 4 - 2;
    const auto step = model.decode_step(
        static_cast<std::int32_t>(rng() % model.target_vocab().size()), h);
    double sum = 0;
    for (double p : step.probs) sum += p;
    worst_softmax = std::max(worst_softmax, std::abs(sum - 1.0));
  }
  c.expect(worst_softmax <= 1e-9,
           "softmax mass off by " + fmt(worst_softmax));
  c.detail = "lm " + fmt(worst_mass) + ", table " + fmt(table_err) +
             ", softmax " + fmt(worst_softmax);
  return c;
}

// ---- criterion 7 -----------------------------------------------------

Check criterion_neural_sanity() {
  Check c;
  const auto pair_corpus = build_parallel({"cô ấy rất đảm đang"});

  // gradient check, double precision, epsilon 1e-5
  {
    auto [src, tgt] = build_vocab(pair_corpus, 1);
    Seq2SeqConfig dims;
    dims.embed_dim = 8;
    dims.hidden_dim = 12;
    Seq2SeqModel model(src, tgt, dims, 11);
    const double err = gradient_check(model, pair_corpus.pairs[0], 1e-5);
    c.expect(err < 1e-4, "gradient check error " + fmt(err) + " over 1e-4");
    c.detail = "grad err " + fmt(err);
  }

  // initialization loss within 5% of log |V|
  {
    const auto init_corpus =
        build_parallel({"một hai ba bốn năm", "sáu bảy tám chín mười"});
    auto [src, tgt] = build_vocab(init_corpus, 1);
    Seq2SeqConfig dims;
    dims.embed_dim = 16;
    dims.hidden_dim = 24;
    Seq2SeqModel model(src, tgt, dims, 13);
    const auto& pair = init_corpus.pairs[0];
    const double loss = model.pair_loss(model.source_ids(pair.source),
                                        model.target_ids(pair.target));
    const double target = std::log(static_cast<double>(model.target_vocab().size()));
    c.expect(std::abs(loss - target) / target <= 0.05,
             "init loss " + fmt(loss) + " not within 5% of " + fmt(target));
  }

  // single-pair overfit within 200 epochs
  {
    TrainConfig config;
    config.learning_rate = 1.0;
    config.batch_size = 1;
    config.max_epochs = 200;
    config.patience = 200;
    config.seed = 21;
    Seq2SeqConfig dims;
    dims.embed_dim = 16;
    dims.hidden_dim = 32;
    std::vector<TrainLogEntry> log;
    train_seq2seq(pair_corpus, pair_corpus, dims, config, &log);
    const double final_loss = log.empty() ? 1.0 : log.back().train_loss;
    c.expect(final_loss < 0.01,
             "overfit loss " + fmt(final_loss) + " not below 0.01");
  }

  // early stopping returns the best dev checkpoint
  {
    std::mt19937_64 rng(3);
    const std::vector<std::string> words = {"má", "mà", "mả", "mã"};
    const auto sample = [&](int n) {
      std::vector<std::string> out;
      for (int i = 0; i < n; ++i) {
        std::string s;
        for (std::size_t k = 0; k < 2 + rng() % 3; ++k) {
          if (k) s.push_back(' ');
          s += words[rng() % words.size()];
        }
        out.push_back(std::move(s));
      }
      return out;
    };
    const auto train = build_parallel(sample(20));
    const auto dev = build_parallel(sample(10));
    TrainConfig config;
    config.learning_rate = 0.8;
    config.batch_size = 4;
    config.max_epochs = 40;
    config.patience = 4;
    config.seed = 9;
    Seq2SeqConfig dims;
    dims.embed_dim = 12;
    dims.hidden_dim = 20;
    std::vector<TrainLogEntry> log;
    const auto model = train_seq2seq(train, dev, dims, config, &log);
    double best = 1e300;
    for (const auto& e : log) best = std::min(best, e.dev_loss);
    const double returned = model.corpus_loss(dev);
    c.expect(std::abs(returned - best) <= 1e-9 * std::max(1.0, best),
             "returned model dev loss " + fmt(returned) +
                 " != best logged " + fmt(best));
    c.expect(returned <= log.back().dev_loss + 1e-12,
             "returned dev loss above the final epoch's");
  }
  return c;
}

// ---- criterion 8 -----------------------------------------------------

Check criterion_neural_desk_scale() {
  Check c;
  auto& f = fixture();
  TrainConfig config;
  config.learning_rate = 0.5;
  config.batch_size = 16;
  config.max_epochs = 12;
  config.patience = 3;
  config.seed = 6;
  Seq2SeqConfig dims;
  dims.embed_dim = 32;
  dims.hidden_dim = 64;
  std::vector<TrainLogEntry> log;
  const auto model = train_seq2seq(f.split.train, f.split.dev, dims, config, &log);

  TokenCorpus hyp, ref;
  const std::size_t subset =
      std::min<std::size_t>(500, f.split.train.size());
  for (std::size_t i = 0; i < subset; ++i) {
    const auto& pair = f.split.train.pairs[i];
    hyp.push_back(restore_neural(model, pair.source, 1));
    ref.push_back(pair.target);
  }
  const double accuracy = word_accuracy(hyp, ref);
  c.expect(accuracy >= 70.0,
           "neural training-subset accuracy " + fmt(accuracy) + " below 70");
  c.detail = fmt(accuracy) + "% over " + std::to_string(subset) +
             " training sentences, " + std::to_string(log.size()) + " epochs";
  return c;
}

// ---- criterion 9 -----------------------------------------------------

Check criterion_metrics() {
  Check c;
  auto& f = fixture();
  const TokenCorpus x = {tokenize("cô ấy rất đảm đang ."),
                         tokenize("hôm nay trời đẹp")};
  c.expect(word_accuracy(x, x) == 100.0, "word_accuracy(x,x) != 100");
  c.expect(bleu(x, x) == 100.0, "bleu(x,x) != 100");

  const double expected =
      100.0 * std::exp((std::log(4.0 / 5) + std::log(3.0 / 4) +
                        std::log(2.0 / 3) + std::log(1.0 / 2)) /
                       4.0);
  const double computed =
      bleu({tokenize("a b c d e")}, {tokenize("a b c d f")});
  c.expect(std::abs(computed - expected) <= 1e-6,
           "hand BLEU example: got " + fmt(computed) + ", want " +
               fmt(expected));

  // Table IV shaped report with positive throughput for both engines
  TrainConfig config;
  config.learning_rate = 0.5;
  config.batch_size = 8;
  config.max_epochs = 2;
  config.patience = 2;
  config.seed = 30;
  Seq2SeqConfig dims;
  dims.embed_dim = 8;
  dims.hidden_dim = 12;
  ParallelCorpus small_train;
  for (std::size_t i = 0; i < 200; ++i)
    small_train.pairs.push_back(f.split.train.pairs[i]);
  const auto neural = train_seq2seq(small_train, small_train, dims, config);

  TokenCorpus bench_src, bench_ref;
  for (std::size_t i = 0; i < 50; ++i) {
    bench_src.push_back(f.split.test.pairs[i].source);
    bench_ref.push_back(f.split.test.pairs[i].target);
  }
  DecoderConfig dconfig;
  const auto report = compare_report(
      {{"phrase-based",
        [&](const std::vector<std::string>& s) {
          return decode(s, f.table, f.lm, dconfig);
        }},
       {"neural-based",
        [&](const std::vector<std::string>& s) {
          return restore_neural(neural, s, 1);
        }}},
      bench_src, bench_ref, 3);
  c.expect(report.systems.size() == 2, "report must hold both engines");
  for (const auto& sys : report.systems)
    c.expect(sys.bench.sentences_per_second > 0,
             sys.name + " throughput not positive");
  std::ostringstream text;
  render_text(text, report);
  for (const char* needle : {"Accuracy", "BLEU", "Training(s)", "sent/s"})
    c.expect(text.str().find(needle) != std::string::npos,
             std::string("report lacks column ") + needle);
  c.detail = "phrase " + fmt(report.systems[0].bench.sentences_per_second) +
             " sent/s, neural " +
             fmt(report.systems[1].bench.sentences_per_second) + " sent/s";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "diacritic map integrity + strip idempotence", criterion_map_integrity},
      {2, "decoder oracle equivalence (100 instances, dl 0/1)",
       criterion_oracle_equivalence},
      {3, "round-trip strip(decode(x)) = x on 1000 held-out sentences",
       criterion_round_trip},
      {4, "ambiguity case: Co ay rat dam dang -> Cô ấy rất đảm đang",
       criterion_ambiguity_case},
      {5, "desk-scale phrase engine accuracy (>=90 test, >=99.5 train)",
       criterion_desk_scale_accuracy},
      {6, "normalization: LM mass, phrase table, softmax",
       criterion_normalizations},
      {7, "neural training sanity (grad check, overfit, init, early stop)",
       criterion_neural_sanity},
      {8, "neural desk-scale restoration (>=70 on training subset)",
       criterion_neural_desk_scale},
      {9, "metrics: identity scores, hand BLEU, Table IV report",
       criterion_metrics},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("%s  %d. %s (%.1fs)%s%s\n", result.ok ? "PASS" : "FAIL",
                criterion.id, criterion.name, seconds,
                result.detail.empty() ? "" : " -- ", result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
