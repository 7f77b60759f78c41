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
#include <string>
#include <string_view>
#include <vector>

#include "vdr/diacritics.hpp"

namespace vdr {

// Unicode cleanup applied before any tokenization: canonical composition of
// Vietnamese letter + combining-mark sequences into precomposed characters,
// control-character removal, whitespace collapsing. `drop_chars` is the
// configurable non-standard-character filter (removed outright).
struct NormalizeConfig {
  std::u32string drop_chars;
  bool strip_control = true;
};

std::string normalize(std::string_view text, const NormalizeConfig& config = {});

// Whitespace split plus detaching leading/trailing punctuation into their
// own tokens. Never splits inside a syllable.
std::vector<std::string> tokenize(std::string_view sentence);

bool is_punct_token(const std::string& token);

// One aligned pair: source = stripped tokens, target = diacritized tokens,
// positionally aligned and of equal length by construction.
struct SentencePair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  std::uint64_t source_tokens = 0;
  std::uint64_t target_tokens = 0;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

struct BuildOptions {
  // Sentences longer than this many tokens are skipped (0 = keep all).
  std::size_t max_tokens = 100;
};

struct SkippedSentence {
  std::size_t index;
  std::size_t tokens;
};

// Tokenizes each diacritized sentence and pairs it with its stripped form.
ParallelCorpus build_parallel(const std::vector<std::string>& diacritized,
                              const BuildOptions& options = {},
                              std::vector<SkippedSentence>* skip_log = nullptr);

struct SplitSpec {
  double train_fraction = 0.8;
  double dev_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 1;
};

struct CorpusSplit {
  ParallelCorpus train, dev, test;
};

// Seeded-shuffle partition. dev/test sizes are floored, the remainder goes
// to train; no pair is lost or duplicated. Throws std::invalid_argument on
// bad fractions or an empty corpus.
CorpusSplit split_corpus(const ParallelCorpus& corpus, const SplitSpec& spec);

// Aligned two-file interchange: line i of the source file pairs with line i
// of the target file.
void write_parallel(const ParallelCorpus& corpus, const std::string& source_path,
                    const std::string& target_path);
ParallelCorpus read_parallel(const std::string& source_path,
                             const std::string& target_path);

// Per-split sentence/word counts as JSON lines.
void write_corpus_stats(std::ostream& out, const std::string& name,
                        const ParallelCorpus& corpus);

// Line reader used by every text interface: UTF-8, one sentence per line,
// BOM stripped, \r\n tolerated.
std::vector<std::string> read_lines(std::istream& in);
std::vector<std::string> read_lines_file(const std::string& path);

std::vector<std::vector<std::string>> target_sentences(
    const ParallelCorpus& corpus);
std::vector<std::vector<std::string>> source_sentences(
    const ParallelCorpus& corpus);

}  // namespace vdr
