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

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vdr/corpus.hpp"
#include "vdr/decoder.hpp"
#include "vdr/lm.hpp"
#include "vdr/phrase_model.hpp"

namespace vdr::testsupport {

// Phrase table + LM trained on the given diacritized sentences through the
// regular pipeline.
struct ToyModels {
  vdr::ParallelCorpus corpus;
  vdr::PhraseTable table;
  vdr::NGramModel lm = vdr::NGramModel::train({{"x"}}, vdr::LmConfig{});
};

inline ToyModels train_toy(const std::vector<std::string>& sentences,
                           int max_phrase_len = 2, int lm_order = 3) {
  ToyModels models;
  std::vector<std::string> normalized;
  normalized.reserve(sentences.size());
  for (const auto& s : sentences) normalized.push_back(vdr::normalize(s));
  models.corpus = vdr::build_parallel(normalized);
  models.table = vdr::estimate_phrase_table(
      vdr::extract_phrases(models.corpus, max_phrase_len));
  vdr::LmConfig lm_config;
  lm_config.order = lm_order;
  models.lm = vdr::train_lm(vdr::target_sentences(models.corpus), lm_config);
  return models;
}

// Random small decode instances inside the brute-force oracle guards:
// a handful of tone variants over few bases, so stripped forms are
// genuinely ambiguous, with sources of length <= 6.
struct ToyInstance {
  ToyModels models;
  std::vector<std::vector<std::string>> sources;
};

inline ToyInstance random_instance(std::uint64_t seed,
                                   std::size_t num_sources = 3) {
  std::mt19937_64 rng(seed);
  const std::vector<std::vector<std::string>> variant_pools = {
      {"á", "à", "ạ"},          // á à ạ (strip to a)
      {"é", "è"},                    // é è (strip to e)
      {"ó", "ò", "õ"},          // ó ò õ (strip to o)
      {"ú", "ụ"},                    // ú ụ (strip to u)
  };
  // pick a sub-vocabulary of at most 8 variants (oracle fan-out guard: a
  // stripped form has at most 3 realizations, spans of 2 at most 9)
  std::vector<std::string> vocab;
  for (const auto& pool : variant_pools)
    for (const auto& v : pool)
      if (rng() % 3 != 0) vocab.push_back(v);
  if (vocab.size() < 3) vocab = {"á", "à", "é"};

  std::vector<std::string> sentences;
  const std::size_t n_sentences = 8 + rng() % 10;
  for (std::size_t i = 0; i < n_sentences; ++i) {
    std::string s;
    const std::size_t len = 1 + rng() % 5;
    for (std::size_t k = 0; k < len; ++k) {
      if (k) s.push_back(' ');
      s += vocab[rng() % vocab.size()];
    }
    sentences.push_back(std::move(s));
  }
  ToyInstance inst;
  inst.models = train_toy(sentences, 2, 2 + rng() % 2);

  for (std::size_t i = 0; i < num_sources; ++i) {
    std::vector<std::string> source;
    const std::size_t len = 1 + rng() % 6;
    for (std::size_t k = 0; k < len; ++k) {
      if (rng() % 8 == 0) {
        source.push_back("zz" + std::to_string(rng() % 3));  // OOV
      } else {
        source.push_back(vdr::strip_text(vocab[rng() % vocab.size()]));
      }
    }
    inst.sources.push_back(std::move(source));
  }
  return inst;
}

}  // namespace vdr::testsupport
