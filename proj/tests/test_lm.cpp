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

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <sstream>

#include "vdr/lm.hpp"

using namespace vdr;

TEST_SUITE_BEGIN("lm");

namespace {

LmConfig addk_config(double k, int order) {
  LmConfig c;
  c.order = order;
  c.smoothing = LmConfig::Smoothing::kAddK;
  c.add_k = k;
  return c;
}

const std::vector<std::vector<std::string>> kAB = {{"a", "b"}, {"a", "c"}};

}  // namespace

TEST_CASE("relative frequency: p(b|a) = p(c|a) = 1/2") {
  const auto model = train_lm(kAB, addk_config(0.0, 2));
  const std::vector<std::string> ctx = {"a"};
  CHECK(model.log_prob("b", ctx) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(model.log_prob("c", ctx) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("order-1 model: sentinel-aware hand count") {
  // events a,a,a,</s>; singleton {</s>} gives <unk> pseudo-count 1; T = 5
  const auto model = train_lm({{"a", "a", "a"}}, addk_config(0.0, 1));
  CHECK(model.log_prob("a", {}) == doctest::Approx(std::log(0.6)).epsilon(1e-12));
  CHECK(std::exp(model.log_prob("zzz", {})) < 0.6);  // unk below 'a'
}

TEST_CASE("unseen context backs off to the lower order") {
  const auto model = train_lm(kAB, addk_config(0.0, 2));
  // context "q" is unseen: distribution equals the unigram one
  const std::vector<std::string> unseen = {"q"};
  CHECK(model.log_prob("b", unseen) ==
        doctest::Approx(model.log_prob("b", {})).epsilon(1e-12));
}

TEST_CASE("interpolated Kneser-Ney hand computation") {
  // corpus {a b, a c}, order 2, D = 0.75.
  // bigrams: (<s>,a):2 (a,b):1 (a,c):1 (b,</s>):1 (c,</s>):1
  // continuation counts: a:1 b:1 c:1 </s>:2, unk pseudo = n1 = 2,
  // T1 = 7, d1 = 5, V = 5 -> p1(b) = (max(1-.75,0) + .75)/7 = 1/7
  LmConfig config;
  config.order = 2;
  config.discount = 0.75;
  const auto model = train_lm(kAB, config);
  CHECK(model.log_prob("b", {}) ==
        doctest::Approx(std::log(1.0 / 7)).epsilon(1e-12));
  CHECK(model.log_prob("a", {}) ==
        doctest::Approx(std::log(1.0 / 7)).epsilon(1e-12));
  // p(b|a) = (1-.75)/2 + (.75*2/2)*p1(b) = 0.125 + 0.75/7
  CHECK(model.log_prob("b", {"a"}) ==
        doctest::Approx(std::log(0.125 + 0.75 / 7)).epsilon(1e-12));
  // <s>-initial contexts keep raw counts: p(a|<s>) = (2-.75)/2 + (.75/2)*p1(a)
  CHECK(model.log_prob("a", {"<s>"}) ==
        doctest::Approx(std::log(0.625 + 0.375 / 7)).epsilon(1e-12));
  // unseen event under a seen context goes through the backoff weight
  CHECK(model.log_prob("c", {"b"}) ==
        doctest::Approx(std::log(0.75 * (1.0 / 7))).epsilon(1e-12));
}

TEST_CASE("score_sequence decomposes into per-token probabilities") {
  const auto model = train_lm(kAB, addk_config(0.01, 2));
  const double direct = model.score_sequence({"a", "b"});
  const double composed = model.log_prob("a", {"<s>"}) +
                          model.log_prob("b", {"a"}) +
                          model.log_prob("</s>", {"b"});
  CHECK(direct == doctest::Approx(composed).epsilon(1e-12));

  // empty sentence = log p(</s> | begin context)
  CHECK(model.score_sequence({}) ==
        doctest::Approx(model.log_prob("</s>", {"<s>"})).epsilon(1e-12));
}

TEST_CASE("replacing a token by an unknown lowers the training score") {
  const auto model = train_lm(kAB, LmConfig{});
  CHECK(model.score_sequence({"a", "b"}) >
        model.score_sequence({"a", "qqq"}));
}

TEST_CASE("probabilities stay inside (0, 1]") {
  const auto kn = train_lm(kAB, LmConfig{});
  const auto addk = train_lm(kAB, addk_config(0.01, 3));
  std::mt19937_64 rng(3);
  const std::vector<std::string> words = {"a", "b", "c", "zzz", "</s>"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> ctx;
    for (std::size_t k = 0; k < rng() % 3; ++k)
      ctx.push_back(words[rng() % words.size()]);
    for (const auto* model : {&kn, &addk}) {
      const double p = std::exp(model->log_prob(words[rng() % words.size()], ctx));
      CHECK(p > 0.0);
      CHECK(p <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("context mass sums to one for stored contexts") {
  std::mt19937_64 rng(17);
  std::vector<std::vector<std::string>> corpus;
  const std::vector<std::string> words = {"mưa", "nắng", "gió", "bão", "êm"};
  for (int s = 0; s < 40; ++s) {
    std::vector<std::string> sent;
    for (std::size_t k = 0; k < 1 + rng() % 6; ++k)
      sent.push_back(words[rng() % words.size()]);
    corpus.push_back(std::move(sent));
  }
  for (const auto& config :
       {LmConfig{}, addk_config(0.01, 3), addk_config(0.0, 2)}) {
    const auto model = train_lm(corpus, config);
    for (const auto& ctx : model.sample_contexts(200, 5)) {
      CHECK(model.context_mass(ctx) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("adding a sentence never lowers its own order-1 score") {
  // pure relative frequency: no add-k mass and no singleton <unk> floor
  LmConfig pure_rf = addk_config(0.0, 1);
  pure_rf.unk_from_singletons = false;
  std::mt19937_64 rng(23);
  const std::vector<std::string> words = {"a", "b", "c", "d"};
  for (int round = 0; round < 30; ++round) {
    std::vector<std::vector<std::string>> corpus;
    for (std::size_t s = 0; s < 2 + rng() % 4; ++s) {
      std::vector<std::string> sent;
      for (std::size_t k = 0; k < 1 + rng() % 4; ++k)
        sent.push_back(words[rng() % words.size()]);
      corpus.push_back(std::move(sent));
    }
    std::vector<std::string> target;
    for (std::size_t k = 0; k < 1 + rng() % 4; ++k)
      target.push_back(words[rng() % words.size()]);

    const auto before = train_lm(corpus, pure_rf);
    auto grown = corpus;
    grown.push_back(target);
    const auto after = train_lm(grown, pure_rf);
    CHECK(after.score_sequence(target) >=
          before.score_sequence(target) - 1e-9);
  }
}

TEST_CASE("perplexity matches a hand computation and its bounds") {
  // order 1, k=0: counts a:2 b:1 c:1 </s>:2 unk:2, T = 8
  const auto model = train_lm(kAB, addk_config(0.0, 1));
  const double expected =
      std::exp(-(2 * (std::log(2.0 / 8) + std::log(1.0 / 8) +
                      std::log(2.0 / 8))) /
               6.0);
  CHECK(model.perplexity(kAB) == doctest::Approx(expected).epsilon(1e-9));
  CHECK_THROWS_AS(model.perplexity({}), std::invalid_argument);
}

TEST_CASE("training-set perplexity stays at or below the uniform bound") {
  // repeated-word corpora keep the singleton (unseen) mass small
  std::vector<std::vector<std::string>> corpus;
  const std::vector<std::string> words = {"nhà", "xe", "cây"};
  std::mt19937_64 rng(8);
  for (int s = 0; s < 60; ++s) {
    std::vector<std::string> sent;
    for (std::size_t k = 0; k < 3 + rng() % 4; ++k)
      sent.push_back(words[rng() % words.size()]);
    corpus.push_back(std::move(sent));
  }
  const auto model = train_lm(corpus, LmConfig{});
  CHECK(model.perplexity(corpus) <=
        static_cast<double>(model.vocab_size()) + 1e-9);
}

TEST_CASE("ARPA round-trip preserves the queried distribution") {
  LmConfig config;
  config.order = 3;
  const std::vector<std::vector<std::string>> corpus = {
      {"mưa", "rơi", "trên", "phố"},
      {"nắng", "lên", "trên", "phố"},
      {"mưa", "rơi", "êm", "đềm"}};
  const auto model = train_lm(corpus, config);
  std::stringstream file;
  model.save_arpa(file);
  const std::string text = file.str();
  CHECK(text.find("\\data\\") != std::string::npos);
  CHECK(text.find("\\1-grams:") != std::string::npos);
  CHECK(text.find("\\3-grams:") != std::string::npos);

  const auto loaded = NGramModel::load_arpa(file);
  std::mt19937_64 rng(4);
  const std::vector<std::string> words = {"mưa", "rơi",  "trên", "phố",
                                          "nắng", "lên",  "êm",   "đềm",
                                          "zzz",  "</s>"};
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> ctx;
    for (std::size_t k = 0; k < rng() % 3; ++k)
      ctx.push_back(words[rng() % words.size()]);
    const auto w = words[rng() % words.size()];
    CHECK(loaded.log_prob(w, ctx) ==
          doctest::Approx(model.log_prob(w, ctx)).epsilon(1e-9));
  }
  CHECK(loaded.order() == model.order());
}

TEST_CASE("ARPA loader reports malformed input") {
  std::stringstream no_header("hello\n");
  CHECK_THROWS(NGramModel::load_arpa(no_header));
  std::stringstream bad_entry("\\data\\\nngram 1=1\n\n\\1-grams:\nnotanumber\n");
  CHECK_THROWS(NGramModel::load_arpa(bad_entry));
}

TEST_CASE("training validates its inputs") {
  CHECK_THROWS_AS(train_lm({}, LmConfig{}), std::invalid_argument);
  LmConfig bad;
  bad.order = 0;
  CHECK_THROWS_AS(train_lm(kAB, bad), std::invalid_argument);
  bad = LmConfig{};
  bad.discount = 1.5;
  CHECK_THROWS_AS(train_lm(kAB, bad), std::invalid_argument);
}

TEST_CASE("vocabulary cutoff funnels rare words into <unk>") {
  LmConfig config = addk_config(0.0, 1);
  config.min_count = 2;
  const auto model = train_lm({{"a", "a", "b"}}, config);
  CHECK(model.vocab_id("b") == NGramModel::kUnk);
  CHECK(model.vocab_id("a") != NGramModel::kUnk);
}

TEST_SUITE_END();
