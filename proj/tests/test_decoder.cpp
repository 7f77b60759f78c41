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

#include "support/toy_pipeline.hpp"
#include "vdr/decoder.hpp"
#include "viet_corpus.hpp"

using namespace vdr;

TEST_SUITE_BEGIN("decoder");

TEST_CASE("the language model resolves the dam/dang ambiguity") {
  const auto models = testsupport::train_toy(textgen::ambiguity_corpus(), 4);
  DecoderConfig config;
  const auto out = decode(tokenize("Co ay rat dam dang"), models.table,
                          models.lm, config);
  CHECK(out == std::vector<std::string>{"Cô", "ấy", "rất", "đảm", "đang"});
}

TEST_CASE("all-OOV input copies through") {
  const auto models = testsupport::train_toy({"một câu bất kỳ"});
  const std::vector<std::string> source = {"qwerty", "123", "zzz"};
  CHECK(decode(source, models.table, models.lm, {}) == source);
}

TEST_CASE("empty input decodes to empty output") {
  const auto models = testsupport::train_toy({"một câu"});
  CHECK(decode({}, models.table, models.lm, {}).empty());
}

TEST_CASE("decode output always strips back to the source") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = testsupport::random_instance(seed, 5);
    for (const auto& source : inst.sources) {
      const auto out = decode(source, inst.models.table, inst.models.lm, {});
      REQUIRE(out.size() == source.size());
      for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(strip_text(out[i]) == source[i]);
    }
  }
}

TEST_CASE("n-best lists are distinct, ordered, and led by the 1-best") {
  const auto models = testsupport::train_toy(
      {"đảm việc", "đảm việc", "đảm việc", "đam mê", "đam mê"}, 1);
  DecoderConfig config;
  config.beam_width = 50;
  const auto nbest =
      decode_nbest({{"dam"}}, models.table, models.lm, config, 5);
  REQUIRE(nbest.size() >= 2);
  CHECK(nbest[0].tokens == decode({{"dam"}}, models.table, models.lm, config));
  for (std::size_t i = 1; i < nbest.size(); ++i) {
    CHECK(nbest[i - 1].score >= nbest[i].score);
    CHECK(nbest[i - 1].tokens != nbest[i].tokens);
  }
  // both candidates appear, the LM/phi_rev-preferred one first
  CHECK(nbest[0].tokens == std::vector<std::string>{"đảm"});
  bool has_dam = false;
  for (const auto& item : nbest)
    if (item.tokens == std::vector<std::string>{"đam"}) has_dam = true;
  CHECK(has_dam);

  const auto one = decode_nbest({{"dam"}}, models.table, models.lm, config, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].tokens == nbest[0].tokens);
}

TEST_CASE("oracle picks the higher-probability single-token candidate") {
  // "á" dominates "à" in the LM and the phrase counts
  const auto models = testsupport::train_toy(
      {"á", "á", "á", "á", "á", "á", "à", "à", "à", "à"}, 1);
  const auto best = brute_force_decode({{"a"}}, models.table, models.lm, {});
  CHECK(best.tokens == std::vector<std::string>{"á"});
}

TEST_CASE("oracle guards reject oversized instances") {
  const auto models = testsupport::train_toy({"á â"});
  const std::vector<std::string> nine(9, "a");
  CHECK_THROWS_AS(brute_force_decode(nine, models.table, models.lm, {}),
                  std::invalid_argument);

  // 11 realizations of one stripped form trip the fan-out guard
  std::vector<std::string> variants = {"á", "à", "ả", "ã", "ạ", "ă",
                                       "ắ", "ằ", "ẳ", "ẵ", "ặ"};
  const auto wide = testsupport::train_toy(variants, 1);
  CHECK_THROWS_AS(brute_force_decode({{"a"}}, wide.table, wide.lm, {}),
                  std::invalid_argument);
}

TEST_CASE("beam search attains the oracle score on random instances") {
  DecoderConfig config;
  config.beam_width = 50;
  config.max_phrase_len = 2;
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto inst = testsupport::random_instance(seed, 2);
    for (int limit : {0, 1}) {
      config.distortion_limit = limit;
      for (const auto& source : inst.sources) {
        const auto oracle =
            brute_force_decode(source, inst.models.table, inst.models.lm,
                               config);
        const auto beam =
            decode_scored(source, inst.models.table, inst.models.lm, config);
        CHECK(std::abs(oracle.score - beam.score) <= 1e-9);
      }
    }
  }
}

TEST_CASE("monotone dynamic program equals the beam search") {
  DecoderConfig config;
  config.beam_width = 64;
  for (std::uint64_t seed = 300; seed < 315; ++seed) {
    const auto inst = testsupport::random_instance(seed, 2);
    for (const auto& source : inst.sources) {
      const auto dp =
          decode_monotone_dp(source, inst.models.table, inst.models.lm, config);
      const auto beam =
          decode_scored(source, inst.models.table, inst.models.lm, config);
      CHECK(dp.score == doctest::Approx(beam.score).epsilon(1e-12));
      CHECK(dp.tokens == beam.tokens);
    }
  }
  DecoderConfig reordering;
  reordering.distortion_limit = 1;
  const auto inst = testsupport::random_instance(1, 1);
  CHECK_THROWS_AS(decode_monotone_dp(inst.sources[0], inst.models.table,
                                     inst.models.lm, reordering),
                  std::invalid_argument);
}

TEST_CASE("omega sweeps do not change the argmax on equal-length candidates") {
  const auto models = testsupport::train_toy(textgen::ambiguity_corpus(), 2);
  const auto source = tokenize("Co ay rat dam dang");
  DecoderConfig config;
  const auto base = decode(source, models.table, models.lm, config);
  for (double omega : {0.25, 0.5, 2.0, 4.0}) {
    config.omega = omega;
    CHECK(decode(source, models.table, models.lm, config) == base);
  }
}

TEST_CASE("distortion-limited search explores bounded reorderings") {
  // with limit 1 the oracle may answer a permuted derivation; scores with
  // limit 0 can never beat limit 1 (supersets of derivations)
  for (std::uint64_t seed = 400; seed < 406; ++seed) {
    const auto inst = testsupport::random_instance(seed, 1);
    DecoderConfig mono, reorder;
    reorder.distortion_limit = 1;
    const auto& source = inst.sources[0];
    const auto s0 =
        brute_force_decode(source, inst.models.table, inst.models.lm, mono);
    const auto s1 =
        brute_force_decode(source, inst.models.table, inst.models.lm, reorder);
    CHECK(s1.score >= s0.score - 1e-12);
  }
}

TEST_CASE("configuration is validated") {
  const auto models = testsupport::train_toy({"á"});
  DecoderConfig bad;
  bad.beam_width = 0;
  CHECK_THROWS_AS(decode({{"a"}}, models.table, models.lm, bad),
                  std::invalid_argument);
  bad = DecoderConfig{};
  bad.omega = 0;
  CHECK_THROWS_AS(decode({{"a"}}, models.table, models.lm, bad),
                  std::invalid_argument);
  CHECK_THROWS_AS(decode_nbest({{"a"}}, models.table, models.lm, {}, 0),
                  std::invalid_argument);
}

TEST_SUITE_END();
