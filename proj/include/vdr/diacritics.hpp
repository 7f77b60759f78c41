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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace vdr {

// Tone marks (type-2 diacritics).
enum class Tone : std::uint8_t {
  kNone = 0,  // ngang
  kAcute,     // sắc
  kGrave,     // huyền
  kHook,      // hỏi
  kTilde,     // ngã
  kDot,       // nặng
};

inline constexpr int kNumTones = 6;

// Decomposition of one inventory character: base letter, which type-1
// letter shape it uses (index into the base's shape row), and its tone.
struct VariantInfo {
  char32_t base;    // one of a e i o u y d, lowercase
  int shape;        // 0 = unmodified letter
  Tone tone;
  bool upper;
};

// Character inventory for Vietnamese: every tone-bearing vowel shape
// (a ă â e ê i o ô ơ u ư y) times six tones, plus d/đ, in both cases.
// Immutable after construction; all queries are const and thread-safe.
class DiacriticMap {
 public:
  DiacriticMap();

  // Builds from an override file: one line per variant,
  // "base<TAB>variant<TAB>type1-shape<TAB>tone" with tone in
  // {none,acute,grave,hook,tilde,dot}. Lowercase rows only; uppercase
  // forms are not derivable from such a file and map case-insensitively.
  static DiacriticMap from_override_file(const std::string& path);

  // Base letter for a mapped variant (case preserved), else c unchanged.
  char32_t strip(char32_t c) const;

  std::optional<VariantInfo> lookup(char32_t c) const;

  // Inverse of lookup; nullopt when the (shape, tone) cell does not exist
  // (e.g. any tone on base 'd').
  std::optional<char32_t> compose(char32_t base, int shape, Tone tone,
                                  bool upper) const;

  // All lowercase variants of a base letter, row-major by (shape, tone).
  const std::vector<char32_t>& variants(char32_t base) const;

  bool is_base(char32_t c) const { return bases_.count(c) != 0; }

  // True when c carries a type-1 or type-2 mark (strip(c) != c).
  bool is_marked(char32_t c) const;

  // Shape marks usable during normalization: which combining mark turns
  // shape row `from` of `base` into row `to`.
  int shape_for_combining(char32_t base, char32_t combining_mark) const;

  const std::vector<char32_t>& base_letters() const { return base_list_; }
  int num_shapes(char32_t base) const;

 private:
  struct Row {
    // lower/upper code points indexed [shape][tone]; 0 = no such cell
    std::vector<std::array<char32_t, kNumTones>> lower, upper;
  };
  void add_entry(char32_t base, int shape, Tone tone, char32_t lower,
                 char32_t upper);
  void finalize();

  std::unordered_map<char32_t, Row> rows_;
  std::unordered_map<char32_t, VariantInfo> reverse_;
  std::unordered_map<char32_t, std::vector<char32_t>> variants_;
  std::unordered_set<char32_t> bases_;
  std::vector<char32_t> base_list_;
};

// The compiled-in standard inventory.
const DiacriticMap& diacritic_map();

// Character-wise stripping; non-inventory characters pass through.
char32_t strip_char(char32_t c, const DiacriticMap& map = diacritic_map());

// Stripping over UTF-8 text. Length-preserving in characters and tokens.
std::string strip_text(std::string_view text,
                       const DiacriticMap& map = diacritic_map());

// Set of diacritized tokens with a prebuilt stripped-form index.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(const std::vector<std::string>& tokens);
  void add(const std::string& token);

  // Every lexicon token whose stripped form equals `stripped`; when none,
  // {stripped} (copy-through). Candidates are sorted.
  std::vector<std::string> candidates(const std::string& stripped) const;

  std::size_t size() const { return tokens_.size(); }
  bool contains(const std::string& token) const {
    return tokens_.count(token) != 0;
  }

 private:
  std::unordered_set<std::string> tokens_;
  std::unordered_map<std::string, std::vector<std::string>> by_stripped_;
};

std::vector<std::string> candidates(const std::string& stripped_token,
                                    const Lexicon& lexicon);

// Corpus-level ambiguity statistics. The type/token distinction is
// reported in both directions since the usual citation leaves it open.
struct AmbiguityReport {
  double pct_tokens_with_diacritics = 0;
  double pct_types_with_diacritics = 0;
  double pct_stripped_forms_ambiguous = 0;  // over stripped word types
  double pct_tokens_ambiguous = 0;
  // stripped form -> number of distinct diacritized realizations
  std::unordered_map<std::string, std::uint32_t> candidate_counts;
};

// Words are tokens containing at least one letter of the inventory (in any
// form); punctuation and digit tokens are ignored. Throws
// std::invalid_argument on an empty corpus.
AmbiguityReport ambiguity_stats(
    const std::vector<std::vector<std::string>>& sentences);

}  // namespace vdr
