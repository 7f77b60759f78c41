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
#include <unordered_map>
#include <vector>

#include "vdr/corpus.hpp"

namespace vdr {

// Word alignment for stripped/diacritized pairs. Stripping preserves token
// count and position, so the true alignment is the identity diagonal; a
// general aligner would converge to exactly this.
struct Alignment {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> links;
};

// Throws std::invalid_argument if the pair violates the equal-length
// corpus invariant.
Alignment align_monotone(const SentencePair& pair);

// (source phrase, target phrase) -> count. Phrases are space-joined token
// spans.
struct PhraseCounts {
  std::unordered_map<std::string, std::uint64_t> joint;  // "f\x01e" -> count
  static std::string key(const std::string& f, const std::string& e) {
    return f + '\x01' + e;
  }
};

// Counts every aligned contiguous span pair of length <= max_len. `jobs`
// only distributes sentences over threads; counts are integers, so the
// result is identical to the serial run (asserted in tests).
PhraseCounts extract_phrases(const ParallelCorpus& corpus, int max_len,
                             int jobs = 1);

struct PhraseEntry {
  std::string source;     // f
  std::string target;     // e
  double phi;             // φ(f|e) = count(f,e)/count(e)
  double phi_rev;         // φ_rev(e|f) = count(f,e)/count(f)
  std::uint64_t count;
};

struct PhraseOption {
  std::vector<std::string> target_tokens;
  double log_phi;
  double log_phi_rev;
  std::uint64_t count;
};

// Relative-frequency phrase table with a reverse index from source phrase
// to candidate target phrases. Immutable once estimated.
class PhraseTable {
 public:
  PhraseTable() = default;

  const std::vector<PhraseEntry>& entries() const { return entries_; }

  // Candidate targets for a source phrase, best phi_rev first; empty if
  // the phrase is unknown.
  const std::vector<PhraseOption>* lookup(const std::string& source) const;

  // Largest |sum_f φ(f|e) - 1| over all target phrases e.
  double max_normalization_error() const;

  std::size_t size() const { return entries_.size(); }
  int max_phrase_len() const { return max_phrase_len_; }

  // One line per pair: "f ||| e ||| phi phi_rev count".
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static PhraseTable load(std::istream& in);
  static PhraseTable load_file(const std::string& path);

  friend PhraseTable estimate_phrase_table(const PhraseCounts& counts,
                                           std::uint64_t min_count);

 private:
  void build_index();

  std::vector<PhraseEntry> entries_;
  std::unordered_map<std::string, std::vector<PhraseOption>> by_source_;
  int max_phrase_len_ = 0;
};

// φ(f|e) = count(f,e)/count(e), φ_rev(e|f) = count(f,e)/count(f). Entries
// with count < min_count are pruned (default keeps everything). Throws
// std::invalid_argument on empty counts.
PhraseTable estimate_phrase_table(const PhraseCounts& counts,
                                  std::uint64_t min_count = 1);

}  // namespace vdr
