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

#include "vdr/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace vdr {

namespace {

void validate(const DecoderConfig& config) {
  if (config.beam_width < 1)
    throw std::invalid_argument("decode: beam width must be >= 1");
  if (config.omega <= 0)
    throw std::invalid_argument("decode: omega must be > 0");
  if (config.distortion_limit < 0)
    throw std::invalid_argument("decode: distortion limit must be >= 0");
  if (config.max_phrase_len < 1)
    throw std::invalid_argument("decode: max phrase length must be >= 1");
}

// One translation option for a source span, with LM ids precomputed.
struct Candidate {
  std::vector<std::string> target;
  std::vector<std::uint32_t> lm_ids;
  double log_phi = 0.0;
  double log_phi_rev = 0.0;
};

std::string join_span(std::span<const std::string> tokens, std::size_t begin,
                      std::size_t len) {
  std::string out;
  for (std::size_t k = 0; k < len; ++k) {
    if (k) out.push_back(' ');
    out += tokens[begin + k];
  }
  return out;
}

// cands[start][len-1]; single-token spans without table entries get a
// copy-through candidate so coverage is always completable.
std::vector<std::vector<std::vector<Candidate>>> collect_candidates(
    std::span<const std::string> source, const PhraseTable& table,
    const NGramModel& lm, int max_phrase_len) {
  const std::size_t n = source.size();
  std::vector<std::vector<std::vector<Candidate>>> cands(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t top = std::min<std::size_t>(max_phrase_len, n - s);
    cands[s].resize(top);
    for (std::size_t len = 1; len <= top; ++len) {
      auto& slot = cands[s][len - 1];
      const auto* options = table.lookup(join_span(source, s, len));
      if (options) {
        slot.reserve(options->size());
        for (const auto& opt : *options) {
          Candidate c;
          c.target = opt.target_tokens;
          c.log_phi = opt.log_phi;
          c.log_phi_rev = opt.log_phi_rev;
          for (const auto& t : c.target) c.lm_ids.push_back(lm.vocab_id(t));
          slot.push_back(std::move(c));
        }
      } else if (len == 1) {
        Candidate c;
        c.target = {source[s]};
        c.lm_ids = {lm.vocab_id(source[s])};
        slot.push_back(std::move(c));
      }
    }
  }
  return cands;
}

struct Hypothesis {
  std::vector<std::uint64_t> coverage;  // empty in the monotone path
  int covered = 0;
  int end = 0;  // index one past the last translated source phrase
  NGramModel::State lm_state;
  double score = 0.0;
  std::vector<std::string> target;
};

bool covers(const std::vector<std::uint64_t>& cov, std::size_t i) {
  return (cov[i >> 6] >> (i & 63)) & 1;
}

void set_covered(std::vector<std::uint64_t>& cov, std::size_t i) {
  cov[i >> 6] |= std::uint64_t{1} << (i & 63);
}

// Extension arithmetic shared by the beam search and the monotone DP
// reference, so the two agree bitwise and only the search differs.
double extension_score(const Hypothesis& hyp, const Candidate& cand,
                       std::size_t start, const NGramModel& lm,
                       const DecoderConfig& config,
                       NGramModel::State& state_out) {
  const auto& w = config.weights;
  double score = hyp.score;
  score += w.phi * cand.log_phi + w.phi_rev * cand.log_phi_rev;
  const int jump = static_cast<int>(start) - hyp.end;
  if (jump != 0)
    score += w.distortion * std::abs(jump) * std::log(config.distortion_base);
  state_out = hyp.lm_state;
  for (std::uint32_t id : cand.lm_ids)
    score += w.lm * lm.score_next(state_out, id);
  score += static_cast<double>(cand.target.size()) * std::log(config.omega);
  return score;
}

bool lex_less(const std::vector<std::string>& a,
              const std::vector<std::string>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// score desc, then lexicographically smaller target first
bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return lex_less(a.target, b.target);
}

std::u32string recomb_key(const Hypothesis& hyp) {
  std::u32string key;
  key.reserve(2 + hyp.lm_state.size() + 2 * hyp.coverage.size());
  key.push_back(static_cast<char32_t>(hyp.end));
  for (std::uint32_t id : hyp.lm_state) key.push_back(id);
  for (std::uint64_t word : hyp.coverage) {
    key.push_back(static_cast<char32_t>(word & 0xFFFFFFFFu));
    key.push_back(static_cast<char32_t>(word >> 32));
  }
  return key;
}

// Beam search; keeps up to `keep_per_state` hypotheses per recombination
// state so n-best lists survive recombination.
std::vector<Hypothesis> run_beam(std::span<const std::string> source,
                                 const PhraseTable& table, const NGramModel& lm,
                                 const DecoderConfig& config,
                                 int keep_per_state) {
  const std::size_t n = source.size();
  const bool monotone = config.distortion_limit == 0;
  const std::size_t cov_words = monotone ? 0 : (n + 63) / 64;
  const auto cands =
      collect_candidates(source, table, lm, config.max_phrase_len);

  std::vector<std::vector<Hypothesis>> stacks(n + 1);
  Hypothesis init;
  init.coverage.assign(cov_words, 0);
  init.lm_state = lm.begin_state();
  stacks[0].push_back(std::move(init));

  // Insert with recombination: identical (coverage, end, LM state) keep
  // only the keep_per_state best.
  std::vector<std::unordered_map<std::u32string, std::vector<std::size_t>>>
      recomb(n + 1);
  const auto insert = [&](int stack, Hypothesis&& hyp) {
    auto& slots = recomb[stack][recomb_key(hyp)];
    auto& stack_v = stacks[stack];
    for (std::size_t pos = 0; pos < slots.size(); ++pos) {
      if (better(hyp, stack_v[slots[pos]])) {
        // shift worse ones down, drop the last when over capacity
        if (static_cast<int>(slots.size()) < keep_per_state) {
          Hypothesis spill = stack_v[slots.back()];
          stack_v.push_back(std::move(spill));
          slots.push_back(stack_v.size() - 1);
        }
        for (std::size_t k = slots.size() - 1; k > pos; --k)
          stack_v[slots[k]] = stack_v[slots[k - 1]];
        stack_v[slots[pos]] = std::move(hyp);
        return;
      }
    }
    if (static_cast<int>(slots.size()) < keep_per_state) {
      stack_v.push_back(std::move(hyp));
      slots.push_back(stack_v.size() - 1);
    }
  };

  for (std::size_t covered = 0; covered < n; ++covered) {
    auto& stack = stacks[covered];
    if (stack.empty()) continue;
    if (static_cast<int>(stack.size()) > config.beam_width) {
      std::sort(stack.begin(), stack.end(), better);
      stack.resize(config.beam_width);
      // recomb slots for this stack are no longer needed
    }
    for (const auto& hyp : stack) {
      for (std::size_t start = 0; start < n; ++start) {
        if (monotone) {
          if (static_cast<int>(start) != hyp.end) continue;
        } else {
          if (std::abs(static_cast<int>(start) - hyp.end) >
              config.distortion_limit)
            continue;
          if (covers(hyp.coverage, start)) continue;
        }
        const std::size_t max_len =
            std::min<std::size_t>(cands[start].size(), n - start);
        for (std::size_t len = 1; len <= max_len; ++len) {
          if (!monotone && covers(hyp.coverage, start + len - 1)) break;
          for (const auto& cand : cands[start][len - 1]) {
            Hypothesis next;
            next.score = extension_score(hyp, cand, start, lm, config,
                                         next.lm_state);
            next.covered = hyp.covered + static_cast<int>(len);
            next.end = static_cast<int>(start + len);
            if (!monotone) {
              next.coverage = hyp.coverage;
              for (std::size_t i = start; i < start + len; ++i)
                set_covered(next.coverage, i);
            }
            next.target = hyp.target;
            next.target.insert(next.target.end(), cand.target.begin(),
                               cand.target.end());
            insert(next.covered, std::move(next));
          }
        }
      }
    }
  }

  // completion: end-of-sentence LM term
  auto& full = stacks[n];
  for (auto& hyp : full)
    hyp.score += config.weights.lm * lm.end_score(hyp.lm_state);
  std::sort(full.begin(), full.end(), better);
  return std::move(full);
}

}  // namespace

ScoredSequence decode_scored(std::span<const std::string> source,
                             const PhraseTable& table, const NGramModel& lm,
                             const DecoderConfig& config) {
  validate(config);
  auto full = run_beam(source, table, lm, config, 1);
  if (full.empty()) throw std::runtime_error("decode: no complete hypothesis");
  return {std::move(full.front().target), full.front().score};
}

std::vector<std::string> decode(std::span<const std::string> source,
                                const PhraseTable& table, const NGramModel& lm,
                                const DecoderConfig& config) {
  if (source.empty()) return {};
  return decode_scored(source, table, lm, config).tokens;
}

std::vector<ScoredSequence> decode_nbest(std::span<const std::string> source,
                                         const PhraseTable& table,
                                         const NGramModel& lm,
                                         const DecoderConfig& config, int n) {
  if (n < 1) throw std::invalid_argument("decode_nbest: n must be >= 1");
  validate(config);
  auto full = run_beam(source, table, lm, config, n);
  std::vector<ScoredSequence> out;
  for (auto& hyp : full) {
    bool duplicate = false;
    for (const auto& seen : out)
      if (seen.tokens == hyp.target) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    out.push_back({std::move(hyp.target), hyp.score});
    if (static_cast<int>(out.size()) == n) break;
  }
  return out;
}

ScoredSequence decode_monotone_dp(std::span<const std::string> source,
                                  const PhraseTable& table,
                                  const NGramModel& lm,
                                  const DecoderConfig& config) {
  validate(config);
  if (config.distortion_limit != 0)
    throw std::invalid_argument(
        "decode_monotone_dp: requires distortion_limit == 0");
  const std::size_t n = source.size();
  const auto cands =
      collect_candidates(source, table, lm, config.max_phrase_len);

  // positions[p]: best hypothesis per LM state covering exactly [0, p)
  std::vector<std::unordered_map<std::u32string, Hypothesis>> positions(n + 1);
  Hypothesis init;
  init.lm_state = lm.begin_state();
  positions[0][std::u32string(init.lm_state.begin(), init.lm_state.end())] =
      std::move(init);

  for (std::size_t p = 0; p < n; ++p) {
    for (const auto& [key, hyp] : positions[p]) {
      (void)key;
      const std::size_t max_len =
          std::min<std::size_t>(cands[p].size(), n - p);
      for (std::size_t len = 1; len <= max_len; ++len) {
        for (const auto& cand : cands[p][len - 1]) {
          Hypothesis next;
          next.score =
              extension_score(hyp, cand, p, lm, config, next.lm_state);
          next.end = static_cast<int>(p + len);
          next.covered = next.end;
          next.target = hyp.target;
          next.target.insert(next.target.end(), cand.target.begin(),
                             cand.target.end());
          std::u32string state_key(next.lm_state.begin(),
                                   next.lm_state.end());
          auto it = positions[p + len].find(state_key);
          if (it == positions[p + len].end())
            positions[p + len].emplace(std::move(state_key), std::move(next));
          else if (better(next, it->second))
            it->second = std::move(next);
        }
      }
    }
  }

  const Hypothesis* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, const Hypothesis*>> finals;
  for (auto& [key, hyp] : positions[n]) {
    (void)key;
    hyp.score += config.weights.lm * lm.end_score(hyp.lm_state);
    finals.emplace_back(hyp.score, &hyp);
  }
  for (const auto& [score, hyp] : finals) {
    if (!best || score > best_score ||
        (score == best_score && lex_less(hyp->target, best->target))) {
      best = hyp;
      best_score = score;
    }
  }
  if (!best) throw std::runtime_error("decode_monotone_dp: no hypothesis");
  return {best->target, best_score};
}

ScoredSequence brute_force_decode(std::span<const std::string> source,
                                  const PhraseTable& table,
                                  const NGramModel& lm,
                                  const DecoderConfig& config) {
  validate(config);
  const std::size_t n = source.size();
  if (n > 8)
    throw std::invalid_argument(
        "brute_force_decode: source length exceeds guard (8)");
  const auto cands =
      collect_candidates(source, table, lm, config.max_phrase_len);
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& slot : cands[s])
      if (slot.size() > 10)
        throw std::invalid_argument(
            "brute_force_decode: candidate fan-out exceeds guard (10)");

  ScoredSequence best;
  best.score = -std::numeric_limits<double>::infinity();
  bool found = false;
  std::vector<std::string> target;

  const double log_omega = std::log(config.omega);
  const double log_base = std::log(config.distortion_base);
  const auto& w = config.weights;

  // DFS over (coverage, end); feature sums are recomputed per complete
  // derivation, with the LM scored through the sentence-level API.
  const std::function<void(std::uint32_t, int, double)> dfs =
      [&](std::uint32_t coverage, int end, double features) {
        if (coverage == (n == 0 ? 0u : ((1u << n) - 1))) {
          double score = features +
                         static_cast<double>(target.size()) * log_omega +
                         w.lm * lm.score_sequence(target);
          if (!found || score > best.score ||
              (score == best.score && lex_less(target, best.tokens))) {
            best.tokens = target;
            best.score = score;
            found = true;
          }
          return;
        }
        for (std::size_t start = 0; start < n; ++start) {
          if (std::abs(static_cast<int>(start) - end) >
              config.distortion_limit)
            continue;
          const std::size_t max_len =
              std::min<std::size_t>(cands[start].size(), n - start);
          for (std::size_t len = 1; len <= max_len; ++len) {
            const std::uint32_t mask = ((1u << len) - 1) << start;
            if (coverage & mask) break;
            for (const auto& cand : cands[start][len - 1]) {
              double f = features + w.phi * cand.log_phi +
                         w.phi_rev * cand.log_phi_rev;
              const int jump = static_cast<int>(start) - end;
              if (jump != 0) f += w.distortion * std::abs(jump) * log_base;
              const std::size_t before = target.size();
              target.insert(target.end(), cand.target.begin(),
                            cand.target.end());
              dfs(coverage | mask, static_cast<int>(start + len), f);
              target.resize(before);
            }
          }
        }
      };
  dfs(0, 0, 0.0);
  if (!found)
    throw std::runtime_error("brute_force_decode: no complete derivation");
  return best;
}

}  // namespace vdr
