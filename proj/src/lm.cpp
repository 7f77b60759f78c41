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

#include "vdr/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace vdr {

namespace {

// Finite stand-in for log 0, used only by unsmoothed (k=0) configurations.
constexpr double kLogZeroFloor = -690.775527898;  // log(1e-300)
constexpr double kLn10 = 2.302585092994046;

const std::string kUnkToken = "<unk>";
const std::string kBosToken = "<s>";
const std::string kEosToken = "</s>";

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

NGramModel NGramModel::train(
    const std::vector<std::vector<std::string>>& corpus,
    const LmConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("train_lm: empty corpus");
  if (config.order < 1) throw std::invalid_argument("train_lm: order must be >= 1");
  if (config.smoothing == LmConfig::Smoothing::kKneserNey &&
      (config.discount <= 0.0 || config.discount >= 1.0))
    throw std::invalid_argument("train_lm: discount must be in (0,1)");
  if (config.add_k < 0.0)
    throw std::invalid_argument("train_lm: add_k must be >= 0");

  NGramModel m;
  m.order_ = config.order;
  m.config_ = config;

  // Vocabulary: specials first, then kept types in lexicographic order.
  std::unordered_map<std::string, std::uint64_t> raw_types;
  for (const auto& sent : corpus)
    for (const auto& tok : sent) ++raw_types[tok];
  std::vector<std::string> kept;
  kept.reserve(raw_types.size());
  for (const auto& [tok, n] : raw_types)
    if (n >= static_cast<std::uint64_t>(config.min_count)) kept.push_back(tok);
  std::sort(kept.begin(), kept.end());
  m.vocab_ = {kUnkToken, kBosToken, kEosToken};
  for (auto& t : kept) m.vocab_.push_back(std::move(t));
  for (std::uint32_t id = 0; id < m.vocab_.size(); ++id)
    m.token_to_id_[m.vocab_[id]] = id;

  const int order = config.order;
  m.counts_.assign(order, {});
  m.ctx_totals_.assign(order, {});

  // N-gram counting over <s>-padded, </s>-terminated id sequences.
  // Windows ending on <s> are not events and are skipped.
  std::vector<std::uint32_t> ids;
  for (const auto& sent : corpus) {
    ids.assign(order - 1, kBos);
    for (const auto& tok : sent) ids.push_back(m.vocab_id(tok));
    ids.push_back(kEos);
    for (int o = 1; o <= order; ++o) {
      for (std::size_t start = 0; start + o <= ids.size(); ++start) {
        if (ids[start + o - 1] == kBos) continue;
        IdKey key(ids.begin() + start, ids.begin() + start + o);
        ++m.counts_[o - 1][key];
      }
    }
  }

  // Unknown-word floor: treat <unk> as a unigram event whose mass comes
  // from the singleton count.
  std::uint64_t n1 = 0;
  for (const auto& [key, c] : m.counts_[0])
    if (c == 1) ++n1;
  IdKey unk_key(1, static_cast<char32_t>(kUnk));
  if (config.unk_from_singletons &&
      m.counts_[0].find(unk_key) == m.counts_[0].end())
    m.counts_[0][unk_key] = std::max<std::uint64_t>(1, n1);

  for (int o = 1; o <= order; ++o)
    for (const auto& [key, c] : m.counts_[o - 1])
      m.ctx_totals_[o - 1][key.substr(0, o - 1)] += c;

  if (config.smoothing == LmConfig::Smoothing::kKneserNey) {
    const double D = config.discount;
    const double V = static_cast<double>(m.vocab_size());
    m.probs_.assign(order, {});
    m.bows_.assign(order, {});

    // Adjusted counts: raw at the top order, continuation counts below,
    // except that <s>-initial n-grams keep raw counts (<s> has no
    // left extension).
    std::vector<std::unordered_map<IdKey, std::uint64_t>> adjusted(order);
    adjusted[order - 1] = m.counts_[order - 1];
    for (int o = order - 1; o >= 1; --o) {
      auto& adj = adjusted[o - 1];
      for (const auto& [key, c] : m.counts_[o]) {
        (void)c;
        ++adj[key.substr(1)];
      }
      for (auto& [key, c] : adj)
        if (key[0] == static_cast<char32_t>(kBos)) c = m.counts_[o - 1].at(key);
    }
    if (order == 1) adjusted[0] = m.counts_[0];
    if (config.unk_from_singletons &&
        adjusted[0].find(unk_key) == adjusted[0].end())
      adjusted[0][unk_key] = std::max<std::uint64_t>(1, n1);

    // Unigrams: interpolate the discounted distribution with the uniform
    // one, so the whole vocabulary has mass and totals are exactly 1.
    {
      std::uint64_t total = 0, distinct = 0;
      for (const auto& [key, c] : adjusted[0]) {
        (void)key;
        total += c;
        ++distinct;
      }
      const double T1 = static_cast<double>(total);
      const double lambda = D * static_cast<double>(distinct) / T1;
      for (std::uint32_t w = 0; w < m.vocab_.size(); ++w) {
        if (w == kBos) continue;
        auto it = adjusted[0].find(IdKey(1, static_cast<char32_t>(w)));
        const double c = it == adjusted[0].end()
                             ? 0.0
                             : static_cast<double>(it->second);
        const double p = std::max(c - D, 0.0) / T1 + lambda / V;
        m.probs_[0][IdKey(1, static_cast<char32_t>(w))] = std::log(p);
      }
    }

    for (int o = 2; o <= order; ++o) {
      // group by context
      std::unordered_map<IdKey, std::vector<std::pair<char32_t, std::uint64_t>>>
          groups;
      for (const auto& [key, c] : adjusted[o - 1])
        groups[key.substr(0, o - 1)].emplace_back(key.back(), c);
      for (const auto& [ctx, entries] : groups) {
        std::uint64_t total = 0;
        for (const auto& [w, c] : entries) {
          (void)w;
          total += c;
        }
        const double T = static_cast<double>(total);
        const double lambda =
            D * static_cast<double>(entries.size()) / T;
        m.bows_[o - 1][ctx] = std::log(lambda);
        std::vector<std::uint32_t> shorter(ctx.begin() + 1, ctx.end());
        for (const auto& [w, c] : entries) {
          const double lower = std::exp(m.walk_log_prob(
              static_cast<std::uint32_t>(w), shorter.data(), shorter.size()));
          const double p =
              std::max(static_cast<double>(c) - D, 0.0) / T + lambda * lower;
          IdKey key = ctx;
          key.push_back(w);
          m.probs_[o - 1][key] = std::log(p);
        }
      }
    }
  }
  return m;
}

std::uint32_t NGramModel::vocab_id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

double NGramModel::walk_log_prob(std::uint32_t word, const std::uint32_t* ctx,
                                 std::size_t len) const {
  if (len > 0) {
    IdKey key;
    key.reserve(len + 1);
    for (std::size_t i = 0; i < len; ++i)
      key.push_back(static_cast<char32_t>(ctx[i]));
    key.push_back(static_cast<char32_t>(word));
    auto it = probs_[len].find(key);
    if (it != probs_[len].end()) return it->second;
    key.pop_back();
    double bow = 0.0;
    auto bit = bows_[len].find(key);
    if (bit != bows_[len].end()) bow = bit->second;
    return bow + walk_log_prob(word, ctx + 1, len - 1);
  }
  auto it = probs_[0].find(IdKey(1, static_cast<char32_t>(word)));
  if (it != probs_[0].end()) return it->second;
  auto unk = probs_[0].find(IdKey(1, static_cast<char32_t>(kUnk)));
  return unk != probs_[0].end() ? unk->second : kLogZeroFloor;
}

double NGramModel::addk_log_prob(std::uint32_t word, const std::uint32_t* ctx,
                                 std::size_t len) const {
  const double k = config_.add_k;
  const double V = static_cast<double>(vocab_size());
  for (std::size_t L = len;; --L) {
    IdKey ctx_key;
    ctx_key.reserve(L);
    for (std::size_t i = len - L; i < len; ++i)
      ctx_key.push_back(static_cast<char32_t>(ctx[i]));
    auto tot = ctx_totals_[L].find(ctx_key);
    if (tot != ctx_totals_[L].end()) {
      IdKey key = ctx_key;
      key.push_back(static_cast<char32_t>(word));
      auto cit = counts_[L].find(key);
      const double c =
          cit == counts_[L].end() ? 0.0 : static_cast<double>(cit->second);
      const double num = c + k;
      if (num <= 0.0) return kLogZeroFloor;
      return std::log(num / (static_cast<double>(tot->second) + k * V));
    }
    if (L == 0) return kLogZeroFloor;  // cannot happen: "" total always exists
  }
}

double NGramModel::log_prob_ids(std::uint32_t word,
                                std::span<const std::uint32_t> context) const {
  const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
  const std::size_t len = std::min(context.size(), max_ctx);
  const std::uint32_t* ctx = context.data() + (context.size() - len);
  if (!probs_.empty()) return walk_log_prob(word, ctx, len);
  return addk_log_prob(word, ctx, len);
}

double NGramModel::log_prob(std::string_view word,
                            std::span<const std::string> context) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(context.size());
  for (const auto& t : context) ids.push_back(vocab_id(t));
  return log_prob_ids(vocab_id(word), ids);
}

NGramModel::State NGramModel::begin_state() const {
  return State(static_cast<std::size_t>(order_ - 1), kBos);
}

double NGramModel::score_next(State& state, std::uint32_t word_id) const {
  const double lp = log_prob_ids(word_id, state);
  if (!state.empty()) {
    std::copy(state.begin() + 1, state.end(), state.begin());
    state.back() = word_id;
  }
  return lp;
}

double NGramModel::end_score(const State& state) const {
  return log_prob_ids(kEos, state);
}

double NGramModel::score_sequence(const std::vector<std::string>& tokens) const {
  State state = begin_state();
  double total = 0.0;
  for (const auto& t : tokens) total += score_next(state, vocab_id(t));
  return total + end_score(state);
}

double NGramModel::perplexity(
    const std::vector<std::vector<std::string>>& corpus) const {
  if (corpus.empty()) throw std::invalid_argument("perplexity: empty corpus");
  double total = 0.0;
  std::uint64_t tokens = 0;
  for (const auto& sent : corpus) {
    total += score_sequence(sent);
    tokens += sent.size() + 1;  // </s> counts
  }
  return std::exp(-total / static_cast<double>(tokens));
}

double NGramModel::context_mass(std::span<const std::uint32_t> context) const {
  double mass = 0.0;
  for (std::uint32_t w = 0; w < vocab_.size(); ++w) {
    if (w == kBos) continue;
    mass += std::exp(log_prob_ids(w, context));
  }
  return mass;
}

std::vector<std::vector<std::uint32_t>> NGramModel::sample_contexts(
    std::size_t n, std::uint64_t seed) const {
  std::vector<IdKey> all;
  if (!ctx_totals_.empty()) {
    for (const auto& table : ctx_totals_)
      for (const auto& [key, c] : table) {
        (void)c;
        all.push_back(key);
      }
  } else {
    all.emplace_back();  // unigram context
    for (const auto& table : bows_)
      for (const auto& [key, c] : table) {
        (void)c;
        all.push_back(key);
      }
  }
  std::sort(all.begin(), all.end());
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n && !all.empty(); ++i) {
    const IdKey& key = all[rng() % all.size()];
    out.emplace_back(key.begin(), key.end());
  }
  return out;
}

void NGramModel::save_arpa(std::ostream& out) const {
  // Materialize walk tables for models queried through raw counts.
  std::vector<ProbMap> probs = probs_;
  std::vector<ProbMap> bows = bows_;
  if (probs.empty()) {
    probs.assign(order_, {});
    bows.assign(order_, {});
    for (int o = 1; o <= order_; ++o) {
      for (const auto& [key, c] : counts_[o - 1]) {
        (void)c;
        std::vector<std::uint32_t> ctx(key.begin(), key.end() - 1);
        probs[o - 1][key] =
            addk_log_prob(static_cast<std::uint32_t>(key.back()), ctx.data(),
                          ctx.size());
      }
    }
    // Numeric backoff: leftover mass of the context over leftover mass of
    // its suffix context.
    for (int L = 1; L < order_; ++L) {
      for (const auto& [ctx, total] : ctx_totals_[L]) {
        (void)total;
        double stored_here = 0.0, stored_lower = 0.0;
        for (std::uint32_t w = 0; w < vocab_.size(); ++w) {
          if (w == kBos) continue;
          IdKey key = ctx;
          key.push_back(static_cast<char32_t>(w));
          if (counts_[L].find(key) == counts_[L].end()) continue;
          std::vector<std::uint32_t> full(ctx.begin(), ctx.end());
          stored_here += std::exp(addk_log_prob(w, full.data(), full.size()));
          std::vector<std::uint32_t> shorter(ctx.begin() + 1, ctx.end());
          stored_lower +=
              std::exp(addk_log_prob(w, shorter.data(), shorter.size()));
        }
        const double num = std::max(0.0, 1.0 - stored_here);
        const double den = std::max(0.0, 1.0 - stored_lower);
        double bow = 1.0;
        if (den > 1e-12) bow = num / den;
        bows[L][ctx] = bow > 0 ? std::log(bow) : kLogZeroFloor;
      }
    }
  }

  // Every backoff context must appear as an entry line; <s>-style contexts
  // that are not events get the conventional -99 placeholder.
  const double kPlaceholder = -99.0 * kLn10;
  for (int L = 1; L < order_; ++L)
    for (const auto& [ctx, b] : bows[L]) {
      (void)b;
      if (probs[L - 1].find(ctx) == probs[L - 1].end())
        probs[L - 1][ctx] = kPlaceholder;
    }
  if (order_ > 1 && probs[0].find(IdKey(1, static_cast<char32_t>(kBos))) ==
                        probs[0].end())
    probs[0][IdKey(1, static_cast<char32_t>(kBos))] = kPlaceholder;

  const auto ngram_text = [&](const IdKey& key) {
    std::string s;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i) s.push_back(' ');
      s += vocab_[static_cast<std::uint32_t>(key[i])];
    }
    return s;
  };

  out << "\\data\\\n";
  for (int o = 1; o <= order_; ++o)
    out << "ngram " << o << "=" << probs[o - 1].size() << "\n";
  for (int o = 1; o <= order_; ++o) {
    out << "\n\\" << o << "-grams:\n";
    std::vector<std::pair<std::string, const IdKey*>> lines;
    lines.reserve(probs[o - 1].size());
    for (const auto& [key, lp] : probs[o - 1]) {
      (void)lp;
      lines.emplace_back(ngram_text(key), &key);
    }
    std::sort(lines.begin(), lines.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [text, keyp] : lines) {
      const double lp = probs[o - 1].at(*keyp);
      out << format_g(lp / kLn10) << '\t' << text;
      if (o < order_) {
        auto bit = bows[o].find(*keyp);
        if (bit != bows[o].end())
          out << '\t' << format_g(bit->second / kLn10);
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void NGramModel::save_arpa_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_arpa(out);
}

NGramModel NGramModel::load_arpa(std::istream& in) {
  NGramModel m;
  std::string line;
  // header
  while (std::getline(in, line) && line != "\\data\\") {
  }
  if (line != "\\data\\")
    throw std::runtime_error("ARPA load: missing \\data\\ header");
  std::vector<std::size_t> declared;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    std::size_t eq = line.find('=');
    if (line.rfind("ngram ", 0) != 0 || eq == std::string::npos)
      throw std::runtime_error("ARPA load: bad count line: " + line);
    declared.push_back(std::stoull(line.substr(eq + 1)));
  }
  if (declared.empty()) throw std::runtime_error("ARPA load: no ngram counts");
  m.order_ = static_cast<int>(declared.size());
  m.probs_.assign(m.order_, {});
  m.bows_.assign(m.order_, {});
  m.vocab_ = {kUnkToken, kBosToken, kEosToken};
  for (std::uint32_t id = 0; id < m.vocab_.size(); ++id)
    m.token_to_id_[m.vocab_[id]] = id;

  const auto intern = [&m](const std::string& tok) {
    auto it = m.token_to_id_.find(tok);
    if (it != m.token_to_id_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(m.vocab_.size());
    m.vocab_.push_back(tok);
    m.token_to_id_[tok] = id;
    return id;
  };

  int current = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "\\end\\") break;
    if (line[0] == '\\') {
      const std::size_t dash = line.find("-grams:");
      if (dash == std::string::npos)
        throw std::runtime_error("ARPA load: unexpected section: " + line);
      current = std::stoi(line.substr(1, dash - 1));
      if (current < 1 || current > m.order_)
        throw std::runtime_error("ARPA load: order out of range in " + line);
      continue;
    }
    if (current == 0)
      throw std::runtime_error("ARPA load: entry before any n-gram section");
    std::istringstream ss(line);
    std::string prob_s, ngram_s, bow_s;
    if (!std::getline(ss, prob_s, '\t') || !std::getline(ss, ngram_s, '\t'))
      throw std::runtime_error("ARPA load: malformed line in \\" +
                               std::to_string(current) + "-grams: " + line);
    std::getline(ss, bow_s, '\t');
    IdKey key;
    std::istringstream ts(ngram_s);
    std::string tok;
    while (ts >> tok) {
      std::uint32_t id;
      if (current == 1) {
        id = intern(tok);
      } else {
        auto it = m.token_to_id_.find(tok);
        if (it == m.token_to_id_.end())
          throw std::runtime_error("ARPA load: token outside \\1-grams in \\" +
                                   std::to_string(current) + "-grams: " + tok);
        id = it->second;
      }
      key.push_back(static_cast<char32_t>(id));
    }
    if (static_cast<int>(key.size()) != current)
      throw std::runtime_error("ARPA load: arity mismatch in \\" +
                               std::to_string(current) + "-grams: " + line);
    m.probs_[current - 1][key] = std::stod(prob_s) * kLn10;
    if (!bow_s.empty() && current < m.order_)
      m.bows_[current][key] = std::stod(bow_s) * kLn10;
  }
  m.config_.order = m.order_;
  return m;
}

NGramModel NGramModel::load_arpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_arpa(in);
}

NGramModel train_lm(const std::vector<std::vector<std::string>>& corpus,
                    const LmConfig& config) {
  return NGramModel::train(corpus, config);
}

}  // namespace vdr
