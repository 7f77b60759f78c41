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

#include "vdr/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "vdr/utf8.hpp"

namespace vdr {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == U' ';
}

bool is_control(char32_t c) {
  return (c < 0x20 && !is_space(c)) || c == 0x7F || (c >= 0x80 && c <= 0x9F);
}

bool is_tone_mark(char32_t c) {
  return c == U'́' || c == U'̀' || c == U'̉' ||
         c == U'̃' || c == U'̣';
}

Tone tone_of_mark(char32_t c) {
  switch (c) {
    case U'́': return Tone::kAcute;
    case U'̀': return Tone::kGrave;
    case U'̉': return Tone::kHook;
    case U'̃': return Tone::kTilde;
    case U'̣': return Tone::kDot;
    default: return Tone::kNone;
  }
}

bool is_shape_mark(char32_t c) {
  return c == U'̆' || c == U'̂' || c == U'̛';
}

// Folds combining tone/shape marks onto the preceding inventory character,
// accepting the marks in either order.
std::u32string compose_vietnamese(const std::u32string& in) {
  const DiacriticMap& map = diacritic_map();
  std::u32string out;
  out.reserve(in.size());
  for (char32_t c : in) {
    if (!out.empty() && (is_tone_mark(c) || is_shape_mark(c))) {
      const auto info = map.lookup(out.back());
      if (info) {
        if (is_tone_mark(c) && info->tone == Tone::kNone) {
          const auto composed =
              map.compose(info->base, info->shape, tone_of_mark(c), info->upper);
          if (composed) {
            out.back() = *composed;
            continue;
          }
        } else if (is_shape_mark(c) && info->shape == 0) {
          const int shape = map.shape_for_combining(info->base, c);
          if (shape >= 0) {
            const auto composed =
                map.compose(info->base, shape, info->tone, info->upper);
            if (composed) {
              out.back() = *composed;
              continue;
            }
          }
        }
      }
    }
    out.push_back(c);
  }
  return out;
}

constexpr std::u32string_view kPunct =
    U"!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~"
    U"‘’“”«»…–—¡¿"
    U"•·";

bool is_punct(char32_t c) { return kPunct.find(c) != std::u32string_view::npos; }

}  // namespace

std::string normalize(std::string_view text, const NormalizeConfig& config) {
  std::u32string decoded;
  decoded.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) decoded.push_back(utf8_decode_one(text, i));

  std::u32string kept;
  kept.reserve(decoded.size());
  for (char32_t c : decoded) {
    if (c == U'﻿') continue;  // BOM / zero-width no-break space
    if (config.strip_control && is_control(c)) continue;
    if (!config.drop_chars.empty() &&
        config.drop_chars.find(c) != std::u32string::npos)
      continue;
    kept.push_back(c);
  }

  const std::u32string composed = compose_vietnamese(kept);

  std::u32string out;
  out.reserve(composed.size());
  bool pending_space = false;
  for (char32_t c : composed) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return utf8_encode(out);
}

bool is_punct_token(const std::string& token) {
  if (token.empty()) return false;
  std::size_t i = 0;
  while (i < token.size())
    if (!is_punct(utf8_decode_one(token, i))) return false;
  return true;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  const std::u32string s = utf8_decode(sentence);
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    // word span [i, j); peel punctuation off both edges
    std::size_t a = i, b = j;
    std::vector<char32_t> leading, trailing;
    while (a < b && is_punct(s[a])) leading.push_back(s[a++]);
    while (b > a && is_punct(s[b - 1])) trailing.push_back(s[b - 1]), --b;
    for (char32_t c : leading) tokens.push_back(utf8_encode(std::u32string(1, c)));
    if (a < b) tokens.push_back(utf8_encode(s.substr(a, b - a)));
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it)
      tokens.push_back(utf8_encode(std::u32string(1, *it)));
    i = j;
  }
  return tokens;
}

ParallelCorpus build_parallel(const std::vector<std::string>& diacritized,
                              const BuildOptions& options,
                              std::vector<SkippedSentence>* skip_log) {
  ParallelCorpus corpus;
  corpus.pairs.reserve(diacritized.size());
  for (std::size_t idx = 0; idx < diacritized.size(); ++idx) {
    std::vector<std::string> target = tokenize(diacritized[idx]);
    if (options.max_tokens > 0 && target.size() > options.max_tokens) {
      if (skip_log) skip_log->push_back({idx, target.size()});
      continue;
    }
    SentencePair pair;
    pair.source.reserve(target.size());
    for (const auto& tok : target) pair.source.push_back(strip_text(tok));
    pair.target = std::move(target);
    corpus.source_tokens += pair.source.size();
    corpus.target_tokens += pair.target.size();
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

CorpusSplit split_corpus(const ParallelCorpus& corpus, const SplitSpec& spec) {
  if (corpus.empty())
    throw std::invalid_argument("split_corpus: empty corpus");
  const double sum =
      spec.train_fraction + spec.dev_fraction + spec.test_fraction;
  if (spec.train_fraction <= 0 || spec.dev_fraction <= 0 ||
      spec.test_fraction <= 0 || std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument(
        "split_corpus: fractions must be positive and sum to 1");

  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Fisher-Yates with an explicit draw so the permutation is stable across
  // standard library implementations.
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }

  const std::size_t n_dev =
      static_cast<std::size_t>(std::floor(n * spec.dev_fraction));
  const std::size_t n_test =
      static_cast<std::size_t>(std::floor(n * spec.test_fraction));
  const std::size_t n_train = n - n_dev - n_test;

  CorpusSplit split;
  const auto take = [&](std::size_t begin, std::size_t count) {
    ParallelCorpus part;
    part.pairs.reserve(count);
    for (std::size_t k = begin; k < begin + count; ++k) {
      const SentencePair& p = corpus.pairs[order[k]];
      part.source_tokens += p.source.size();
      part.target_tokens += p.target.size();
      part.pairs.push_back(p);
    }
    return part;
  };
  split.train = take(0, n_train);
  split.dev = take(n_train, n_dev);
  split.test = take(n_train + n_dev, n_test);
  return split;
}

namespace {
std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}
}  // namespace

void write_parallel(const ParallelCorpus& corpus, const std::string& source_path,
                    const std::string& target_path) {
  std::ofstream src(source_path), tgt(target_path);
  if (!src) throw std::runtime_error("cannot write " + source_path);
  if (!tgt) throw std::runtime_error("cannot write " + target_path);
  for (const auto& pair : corpus.pairs) {
    src << join(pair.source) << '\n';
    tgt << join(pair.target) << '\n';
  }
}

ParallelCorpus read_parallel(const std::string& source_path,
                             const std::string& target_path) {
  const auto src_lines = read_lines_file(source_path);
  const auto tgt_lines = read_lines_file(target_path);
  if (src_lines.size() != tgt_lines.size())
    throw std::runtime_error("parallel files disagree on line count: " +
                             source_path + " vs " + target_path);
  ParallelCorpus corpus;
  corpus.pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    SentencePair pair{tokenize(src_lines[i]), tokenize(tgt_lines[i])};
    if (pair.source.size() != pair.target.size())
      throw std::runtime_error("pair length mismatch at line " +
                               std::to_string(i + 1));
    for (std::size_t k = 0; k < pair.source.size(); ++k) {
      if (strip_text(pair.target[k]) != pair.source[k])
        throw std::runtime_error("line " + std::to_string(i + 1) +
                                 ": source token is not the stripped target");
    }
    corpus.source_tokens += pair.source.size();
    corpus.target_tokens += pair.target.size();
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

void write_corpus_stats(std::ostream& out, const std::string& name,
                        const ParallelCorpus& corpus) {
  out << "{\"split\":\"" << name << "\",\"sentences\":" << corpus.size()
      << ",\"words\":" << corpus.target_tokens << "}\n";
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.size() >= 3 &&
        static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB &&
        static_cast<unsigned char>(line[2]) == 0xBF)
      line.erase(0, 3);
    first = false;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> read_lines_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_lines(in);
}

std::vector<std::vector<std::string>> target_sentences(
    const ParallelCorpus& corpus) {
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs) out.push_back(p.target);
  return out;
}

std::vector<std::vector<std::string>> source_sentences(
    const ParallelCorpus& corpus) {
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs) out.push_back(p.source);
  return out;
}

}  // namespace vdr
