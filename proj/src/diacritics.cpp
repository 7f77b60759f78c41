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

#include "vdr/diacritics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vdr/utf8.hpp"

namespace vdr {

namespace {

struct InventoryEntry {
  char32_t base;
  int shape;
  Tone tone;
  char32_t lower;
  char32_t upper;
};

// Tone-bearing vowel shapes a ă â / e ê / i / o ô ơ / u ư / y, six tones
// each, plus d/đ. Shape 0 is the unmodified letter.
constexpr InventoryEntry kInventory[] = {
    // a
    {U'a', 0, Tone::kNone, U'a', U'A'},
    {U'a', 0, Tone::kAcute, U'á', U'Á'},   // á Á
    {U'a', 0, Tone::kGrave, U'à', U'À'},   // à À
    {U'a', 0, Tone::kHook, U'ả', U'Ả'},    // ả Ả
    {U'a', 0, Tone::kTilde, U'ã', U'Ã'},   // ã Ã
    {U'a', 0, Tone::kDot, U'ạ', U'Ạ'},     // ạ Ạ
    {U'a', 1, Tone::kNone, U'ă', U'Ă'},    // ă Ă
    {U'a', 1, Tone::kAcute, U'ắ', U'Ắ'},   // ắ Ắ
    {U'a', 1, Tone::kGrave, U'ằ', U'Ằ'},   // ằ Ằ
    {U'a', 1, Tone::kHook, U'ẳ', U'Ẳ'},    // ẳ Ẳ
    {U'a', 1, Tone::kTilde, U'ẵ', U'Ẵ'},   // ẵ Ẵ
    {U'a', 1, Tone::kDot, U'ặ', U'Ặ'},     // ặ Ặ
    {U'a', 2, Tone::kNone, U'â', U'Â'},    // â Â
    {U'a', 2, Tone::kAcute, U'ấ', U'Ấ'},   // ấ Ấ
    {U'a', 2, Tone::kGrave, U'ầ', U'Ầ'},   // ầ Ầ
    {U'a', 2, Tone::kHook, U'ẩ', U'Ẩ'},    // ẩ Ẩ
    {U'a', 2, Tone::kTilde, U'ẫ', U'Ẫ'},   // ẫ Ẫ
    {U'a', 2, Tone::kDot, U'ậ', U'Ậ'},     // ậ Ậ
    // e
    {U'e', 0, Tone::kNone, U'e', U'E'},
    {U'e', 0, Tone::kAcute, U'é', U'É'},   // é É
    {U'e', 0, Tone::kGrave, U'è', U'È'},   // è È
    {U'e', 0, Tone::kHook, U'ẻ', U'Ẻ'},    // ẻ Ẻ
    {U'e', 0, Tone::kTilde, U'ẽ', U'Ẽ'},   // ẽ Ẽ
    {U'e', 0, Tone::kDot, U'ẹ', U'Ẹ'},     // ẹ Ẹ
    {U'e', 1, Tone::kNone, U'ê', U'Ê'},    // ê Ê
    {U'e', 1, Tone::kAcute, U'ế', U'Ế'},   // ế Ế
    {U'e', 1, Tone::kGrave, U'ề', U'Ề'},   // ề Ề
    {U'e', 1, Tone::kHook, U'ể', U'Ể'},    // ể Ể
    {U'e', 1, Tone::kTilde, U'ễ', U'Ễ'},   // ễ Ễ
    {U'e', 1, Tone::kDot, U'ệ', U'Ệ'},     // ệ Ệ
    // i
    {U'i', 0, Tone::kNone, U'i', U'I'},
    {U'i', 0, Tone::kAcute, U'í', U'Í'},   // í Í
    {U'i', 0, Tone::kGrave, U'ì', U'Ì'},   // ì Ì
    {U'i', 0, Tone::kHook, U'ỉ', U'Ỉ'},    // ỉ Ỉ
    {U'i', 0, Tone::kTilde, U'ĩ', U'Ĩ'},   // ĩ Ĩ
    {U'i', 0, Tone::kDot, U'ị', U'Ị'},     // ị Ị
    // o
    {U'o', 0, Tone::kNone, U'o', U'O'},
    {U'o', 0, Tone::kAcute, U'ó', U'Ó'},   // ó Ó
    {U'o', 0, Tone::kGrave, U'ò', U'Ò'},   // ò Ò
    {U'o', 0, Tone::kHook, U'ỏ', U'Ỏ'},    // ỏ Ỏ
    {U'o', 0, Tone::kTilde, U'õ', U'Õ'},   // õ Õ
    {U'o', 0, Tone::kDot, U'ọ', U'Ọ'},     // ọ Ọ
    {U'o', 1, Tone::kNone, U'ô', U'Ô'},    // ô Ô
    {U'o', 1, Tone::kAcute, U'ố', U'Ố'},   // ố Ố
    {U'o', 1, Tone::kGrave, U'ồ', U'Ồ'},   // ồ Ồ
    {U'o', 1, Tone::kHook, U'ổ', U'Ổ'},    // ổ Ổ
    {U'o', 1, Tone::kTilde, U'ỗ', U'Ỗ'},   // ỗ Ỗ
    {U'o', 1, Tone::kDot, U'ộ', U'Ộ'},     // ộ Ộ
    {U'o', 2, Tone::kNone, U'ơ', U'Ơ'},    // ơ Ơ
    {U'o', 2, Tone::kAcute, U'ớ', U'Ớ'},   // ớ Ớ
    {U'o', 2, Tone::kGrave, U'ờ', U'Ờ'},   // ờ Ờ
    {U'o', 2, Tone::kHook, U'ở', U'Ở'},    // ở Ở
    {U'o', 2, Tone::kTilde, U'ỡ', U'Ỡ'},   // ỡ Ỡ
    {U'o', 2, Tone::kDot, U'ợ', U'Ợ'},     // ợ Ợ
    // u
    {U'u', 0, Tone::kNone, U'u', U'U'},
    {U'u', 0, Tone::kAcute, U'ú', U'Ú'},   // ú Ú
    {U'u', 0, Tone::kGrave, U'ù', U'Ù'},   // ù Ù
    {U'u', 0, Tone::kHook, U'ủ', U'Ủ'},    // ủ Ủ
    {U'u', 0, Tone::kTilde, U'ũ', U'Ũ'},   // ũ Ũ
    {U'u', 0, Tone::kDot, U'ụ', U'Ụ'},     // ụ Ụ
    {U'u', 1, Tone::kNone, U'ư', U'Ư'},    // ư Ư
    {U'u', 1, Tone::kAcute, U'ứ', U'Ứ'},   // ứ Ứ
    {U'u', 1, Tone::kGrave, U'ừ', U'Ừ'},   // ừ Ừ
    {U'u', 1, Tone::kHook, U'ử', U'Ử'},    // ử Ử
    {U'u', 1, Tone::kTilde, U'ữ', U'Ữ'},   // ữ Ữ
    {U'u', 1, Tone::kDot, U'ự', U'Ự'},     // ự Ự
    // y
    {U'y', 0, Tone::kNone, U'y', U'Y'},
    {U'y', 0, Tone::kAcute, U'ý', U'Ý'},   // ý Ý
    {U'y', 0, Tone::kGrave, U'ỳ', U'Ỳ'},   // ỳ Ỳ
    {U'y', 0, Tone::kHook, U'ỷ', U'Ỷ'},    // ỷ Ỷ
    {U'y', 0, Tone::kTilde, U'ỹ', U'Ỹ'},   // ỹ Ỹ
    {U'y', 0, Tone::kDot, U'ỵ', U'Ỵ'},     // ỵ Ỵ
    // d
    {U'd', 0, Tone::kNone, U'd', U'D'},
    {U'd', 1, Tone::kNone, U'đ', U'Đ'},    // đ Đ
};

Tone tone_from_name(const std::string& name) {
  if (name == "none") return Tone::kNone;
  if (name == "acute") return Tone::kAcute;
  if (name == "grave") return Tone::kGrave;
  if (name == "hook") return Tone::kHook;
  if (name == "tilde") return Tone::kTilde;
  if (name == "dot") return Tone::kDot;
  throw std::invalid_argument("unknown tone name: " + name);
}

}  // namespace

DiacriticMap::DiacriticMap() {
  for (const auto& e : kInventory)
    add_entry(e.base, e.shape, e.tone, e.lower, e.upper);
  finalize();
}

void DiacriticMap::add_entry(char32_t base, int shape, Tone tone,
                             char32_t lower, char32_t upper) {
  Row& row = rows_[base];
  if (static_cast<int>(row.lower.size()) <= shape) {
    row.lower.resize(shape + 1, {});
    row.upper.resize(shape + 1, {});
  }
  const int t = static_cast<int>(tone);
  row.lower[shape][t] = lower;
  row.upper[shape][t] = upper;
  reverse_[lower] = VariantInfo{base, shape, tone, false};
  if (upper != 0 && upper != lower)
    reverse_[upper] = VariantInfo{base, shape, tone, true};
  variants_[base].push_back(lower);
  if (bases_.insert(base).second) base_list_.push_back(base);
}

void DiacriticMap::finalize() {
  for (auto& [base, v] : variants_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

DiacriticMap DiacriticMap::from_override_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open diacritic map file: " + path);
  DiacriticMap map;
  map.rows_.clear();
  map.reverse_.clear();
  map.variants_.clear();
  map.bases_.clear();
  map.base_list_.clear();
  std::unordered_map<char32_t, std::vector<char32_t>> shape_order;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string base_s, variant_s, shape_s, tone_s;
    if (!std::getline(ss, base_s, '\t') || !std::getline(ss, variant_s, '\t') ||
        !std::getline(ss, shape_s, '\t') || !std::getline(ss, tone_s)) {
      throw std::runtime_error("malformed diacritic map line " +
                               std::to_string(lineno) + ": " + line);
    }
    const std::u32string base_u = utf8_decode(base_s);
    const std::u32string variant_u = utf8_decode(variant_s);
    const std::u32string shape_u = utf8_decode(shape_s);
    if (base_u.size() != 1 || variant_u.size() != 1 || shape_u.size() != 1)
      throw std::runtime_error("diacritic map fields must be single characters, line " +
                               std::to_string(lineno));
    auto& order = shape_order[base_u[0]];
    auto it = std::find(order.begin(), order.end(), shape_u[0]);
    int shape_idx;
    if (it == order.end()) {
      shape_idx = static_cast<int>(order.size());
      order.push_back(shape_u[0]);
    } else {
      shape_idx = static_cast<int>(it - order.begin());
    }
    map.add_entry(base_u[0], shape_idx, tone_from_name(tone_s), variant_u[0],
                  variant_u[0]);
  }
  map.finalize();
  return map;
}

char32_t DiacriticMap::strip(char32_t c) const {
  auto it = reverse_.find(c);
  if (it == reverse_.end()) return c;
  const VariantInfo& v = it->second;
  if (!v.upper) return v.base;
  // Bases are ASCII letters; uppercase by clearing the case bit.
  return v.base - (U'a' - U'A');
}

std::optional<VariantInfo> DiacriticMap::lookup(char32_t c) const {
  auto it = reverse_.find(c);
  if (it == reverse_.end()) return std::nullopt;
  return it->second;
}

std::optional<char32_t> DiacriticMap::compose(char32_t base, int shape,
                                              Tone tone, bool upper) const {
  auto it = rows_.find(base);
  if (it == rows_.end()) return std::nullopt;
  const Row& row = it->second;
  if (shape < 0 || shape >= static_cast<int>(row.lower.size()))
    return std::nullopt;
  const char32_t c = upper ? row.upper[shape][static_cast<int>(tone)]
                           : row.lower[shape][static_cast<int>(tone)];
  if (c == 0) return std::nullopt;
  return c;
}

const std::vector<char32_t>& DiacriticMap::variants(char32_t base) const {
  static const std::vector<char32_t> kEmpty;
  auto it = variants_.find(base);
  return it == variants_.end() ? kEmpty : it->second;
}

bool DiacriticMap::is_marked(char32_t c) const {
  auto it = reverse_.find(c);
  if (it == reverse_.end()) return false;
  const VariantInfo& v = it->second;
  return v.shape != 0 || v.tone != Tone::kNone;
}

int DiacriticMap::shape_for_combining(char32_t base,
                                      char32_t combining_mark) const {
  switch (combining_mark) {
    case U'̆':  // breve
      return base == U'a' ? 1 : -1;
    case U'̂':  // circumflex
      if (base == U'a') return 2;
      if (base == U'e') return 1;
      if (base == U'o') return 1;
      return -1;
    case U'̛':  // horn
      if (base == U'o') return 2;
      if (base == U'u') return 1;
      return -1;
    default:
      return -1;
  }
}

int DiacriticMap::num_shapes(char32_t base) const {
  auto it = rows_.find(base);
  return it == rows_.end() ? 0 : static_cast<int>(it->second.lower.size());
}

const DiacriticMap& diacritic_map() {
  static const DiacriticMap map;
  return map;
}

char32_t strip_char(char32_t c, const DiacriticMap& map) {
  return map.strip(c);
}

std::string strip_text(std::string_view text, const DiacriticMap& map) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) utf8_append(out, map.strip(utf8_decode_one(text, i)));
  return out;
}

Lexicon::Lexicon(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) add(t);
}

void Lexicon::add(const std::string& token) {
  if (!tokens_.insert(token).second) return;
  auto& bucket = by_stripped_[strip_text(token)];
  bucket.insert(std::upper_bound(bucket.begin(), bucket.end(), token), token);
}

std::vector<std::string> Lexicon::candidates(
    const std::string& stripped) const {
  auto it = by_stripped_.find(stripped);
  if (it == by_stripped_.end() || it->second.empty()) return {stripped};
  return it->second;
}

std::vector<std::string> candidates(const std::string& stripped_token,
                                    const Lexicon& lexicon) {
  return lexicon.candidates(stripped_token);
}

AmbiguityReport ambiguity_stats(
    const std::vector<std::vector<std::string>>& sentences) {
  if (sentences.empty())
    throw std::invalid_argument("ambiguity_stats: empty corpus");
  const DiacriticMap& map = diacritic_map();

  const auto classify = [&](const std::string& token, bool& is_word,
                            bool& marked) {
    is_word = false;
    marked = false;
    std::size_t i = 0;
    while (i < token.size()) {
      const char32_t c = utf8_decode_one(token, i);
      if (map.is_base(map.strip(c) | 0x20) ||
          map.is_base(map.strip(c)))  // either case
        is_word = true;
      if (map.is_marked(c)) marked = true;
    }
  };

  std::unordered_map<std::string, std::uint64_t> type_counts;
  std::uint64_t word_tokens = 0, marked_tokens = 0;
  std::unordered_map<std::string, bool> type_marked;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      bool is_word = false, marked = false;
      classify(tok, is_word, marked);
      if (!is_word) continue;
      ++word_tokens;
      if (marked) ++marked_tokens;
      ++type_counts[tok];
      type_marked[tok] = marked;
    }
  }

  AmbiguityReport report;
  if (word_tokens == 0) return report;

  std::uint64_t marked_types = 0;
  std::unordered_map<std::string, std::vector<std::string>> groups;
  for (const auto& [type, n] : type_counts) {
    (void)n;
    if (type_marked[type]) ++marked_types;
    groups[strip_text(type)].push_back(type);
  }
  std::uint64_t ambiguous_forms = 0, ambiguous_tokens = 0;
  for (const auto& [form, realizations] : groups) {
    report.candidate_counts[form] =
        static_cast<std::uint32_t>(realizations.size());
    if (realizations.size() >= 2) {
      ++ambiguous_forms;
      for (const auto& r : realizations) ambiguous_tokens += type_counts[r];
    }
  }

  const double n_types = static_cast<double>(type_counts.size());
  const double n_forms = static_cast<double>(groups.size());
  report.pct_tokens_with_diacritics = 100.0 * marked_tokens / word_tokens;
  report.pct_types_with_diacritics = 100.0 * marked_types / n_types;
  report.pct_stripped_forms_ambiguous = 100.0 * ambiguous_forms / n_forms;
  report.pct_tokens_ambiguous = 100.0 * ambiguous_tokens / word_tokens;
  return report;
}

}  // namespace vdr
