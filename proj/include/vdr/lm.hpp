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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vdr {

struct LmConfig {
  enum class Smoothing { kKneserNey, kAddK };
  int order = 3;
  Smoothing smoothing = Smoothing::kKneserNey;
  double discount = 0.75;  // Kneser-Ney single discount, in (0,1)
  double add_k = 0.01;     // add-k pseudo-count, >= 0
  int min_count = 1;       // vocabulary cutoff; rarer tokens become <unk>
  // Give <unk> a unigram pseudo-count equal to the singleton count.
  // Disable to get pure relative-frequency estimates (with add_k = 0).
  bool unk_from_singletons = true;
};

// Backoff n-gram model over diacritized tokens. Natural log everywhere;
// log10 only at the ARPA boundary. Immutable once trained; queries are
// const and safe for concurrent use.
class NGramModel {
 public:
  static constexpr std::uint32_t kUnk = 0;
  static constexpr std::uint32_t kBos = 1;
  static constexpr std::uint32_t kEos = 2;

  static NGramModel train(const std::vector<std::vector<std::string>>& corpus,
                          const LmConfig& config = {});

  int order() const { return order_; }
  // Prediction vocabulary (everything that can be scored: types + <unk> +
  // </s>; excludes <s>).
  std::size_t vocab_size() const { return vocab_.size() - 1; }

  std::uint32_t vocab_id(std::string_view token) const;
  const std::string& token(std::uint32_t id) const { return vocab_[id]; }

  // log p(word | context), finite for any word; backoff when the
  // context is unseen. Context is the up-to-(order-1) preceding tokens.
  double log_prob(std::string_view word,
                  std::span<const std::string> context) const;
  double log_prob(std::string_view word,
                  std::initializer_list<std::string> context) const {
    return log_prob(
        word, std::span<const std::string>(context.begin(), context.size()));
  }
  double log_prob_ids(std::uint32_t word,
                      std::span<const std::uint32_t> context) const;

  // Incremental scoring for decoders: fixed-width context window of
  // order-1 ids, <s>-padded.
  using State = std::vector<std::uint32_t>;
  State begin_state() const;
  // Scores word in the given state and shifts the window.
  double score_next(State& state, std::uint32_t word_id) const;
  double end_score(const State& state) const;

  // Sentence log probability with begin/end sentinels.
  double score_sequence(const std::vector<std::string>& tokens) const;

  // exp(-average per-token log prob), end sentinels counted.
  double perplexity(const std::vector<std::vector<std::string>>& corpus) const;

  // Total probability mass over the prediction vocabulary for one context;
  // 1 within 1e-6 for every stored context.
  double context_mass(std::span<const std::uint32_t> context) const;

  // Uniform sample of stored contexts (all lengths), for normalization
  // spot checks.
  std::vector<std::vector<std::uint32_t>> sample_contexts(
      std::size_t n, std::uint64_t seed) const;

  // ARPA-style text serialization: "\data\" counts, then per-order blocks
  // of "log10prob<TAB>ngram<TAB>log10backoff".
  void save_arpa(std::ostream& out) const;
  void save_arpa_file(const std::string& path) const;
  static NGramModel load_arpa(std::istream& in);
  static NGramModel load_arpa_file(const std::string& path);

 private:
  using IdKey = std::u32string;  // token ids, SSO covers trigram keys
  using ProbMap = std::unordered_map<IdKey, double>;

  NGramModel() = default;

  double walk_log_prob(std::uint32_t word,
                       const std::uint32_t* ctx, std::size_t len) const;
  double addk_log_prob(std::uint32_t word,
                       const std::uint32_t* ctx, std::size_t len) const;

  int order_ = 0;
  LmConfig config_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> token_to_id_;

  // probs_[o-1]: stored log p for o-grams. bows_[L]: log backoff weight for
  // contexts of length L. Both used by the ARPA walk.
  std::vector<ProbMap> probs_;
  std::vector<ProbMap> bows_;

  // Raw counts and per-context totals, kept for add-k querying.
  std::vector<std::unordered_map<IdKey, std::uint64_t>> counts_;
  std::vector<std::unordered_map<IdKey, std::uint64_t>> ctx_totals_;
};

NGramModel train_lm(const std::vector<std::vector<std::string>>& corpus,
                    const LmConfig& config = {});

}  // namespace vdr
