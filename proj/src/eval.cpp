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

#include "vdr/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "vdr/corpus.hpp"
#include "vdr/utf8.hpp"

namespace vdr {

namespace {

std::string fold_case_ascii(const std::string& s) {
  // ASCII-only fold; the Vietnamese letters compare case-sensitively even
  // under case_insensitive since news casing rarely differs beyond ASCII.
  std::string out = s;
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
  return out;
}

bool tokens_equal(const std::string& a, const std::string& b,
                  bool case_sensitive) {
  if (case_sensitive) return a == b;
  return fold_case_ascii(a) == fold_case_ascii(b);
}

}  // namespace

double word_accuracy(const TokenCorpus& hypotheses,
                     const TokenCorpus& references,
                     const AccuracyOptions& options) {
  if (hypotheses.size() != references.size())
    throw std::invalid_argument(
        "word_accuracy: hypothesis/reference sentence counts differ (" +
        std::to_string(hypotheses.size()) + " vs " +
        std::to_string(references.size()) + ")");
  std::uint64_t correct = 0, denom = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s];
    const auto& ref = references[s];
    const std::size_t common = std::min(hyp.size(), ref.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (options.exclude_punct && is_punct_token(ref[i])) continue;
      ++denom;
      if (tokens_equal(hyp[i], ref[i], options.case_sensitive)) ++correct;
    }
    for (std::size_t i = common; i < ref.size(); ++i) {
      if (options.exclude_punct && is_punct_token(ref[i])) continue;
      ++denom;  // missing tokens are errors
    }
    for (std::size_t i = common; i < hyp.size(); ++i) {
      if (options.exclude_punct && is_punct_token(hyp[i])) continue;
      ++denom;  // surplus tokens are errors
    }
  }
  if (denom == 0) return 100.0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(denom);
}

double bleu(const TokenCorpus& hypotheses, const TokenCorpus& references) {
  if (hypotheses.empty())
    throw std::invalid_argument("bleu: empty corpus");
  if (hypotheses.size() != references.size())
    throw std::invalid_argument("bleu: sentence counts differ");
  constexpr int kMaxOrder = 4;
  std::uint64_t clipped[kMaxOrder] = {0};
  std::uint64_t total[kMaxOrder] = {0};
  std::uint64_t hyp_len = 0, ref_len = 0;

  const auto ngram_counts = [](const std::vector<std::string>& tokens, int n) {
    std::unordered_map<std::string, std::uint64_t> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key;
      for (int k = 0; k < n; ++k) {
        if (k) key.push_back('\x01');
        key += tokens[i + k];
      }
      ++counts[key];
    }
    return counts;
  };

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s];
    const auto& ref = references[s];
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (int n = 1; n <= kMaxOrder; ++n) {
      const auto hyp_counts = ngram_counts(hyp, n);
      if (hyp_counts.empty()) continue;
      const auto ref_counts = ngram_counts(ref, n);
      for (const auto& [gram, c] : hyp_counts) {
        total[n - 1] += c;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) clipped[n - 1] += std::min(c, it->second);
      }
    }
  }

  // Orders longer than every sentence contribute no counts and are left
  // out of the geometric mean, so identical corpora always score 100.
  double log_precision = 0.0;
  int orders = 0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (total[n] == 0) continue;
    if (clipped[n] == 0) return 0.0;
    ++orders;
    log_precision += std::log(static_cast<double>(clipped[n]) /
                              static_cast<double>(total[n]));
  }
  if (orders == 0) return 0.0;
  double brevity = 1.0;
  if (hyp_len == 0) return 0.0;
  if (hyp_len < ref_len)
    brevity = std::exp(1.0 - static_cast<double>(ref_len) /
                                 static_cast<double>(hyp_len));
  return 100.0 * brevity * std::exp(log_precision / kMaxOrder);
}

BenchResult benchmark_throughput(const RestoreFn& system,
                                 const TokenCorpus& corpus, int warmup) {
  if (corpus.empty())
    throw std::invalid_argument("benchmark_throughput: empty corpus");
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < warmup; ++i) system(corpus[i % corpus.size()]);

  std::vector<double> latencies_ms;
  latencies_ms.reserve(corpus.size());
  const auto t0 = clock::now();
  for (const auto& sent : corpus) {
    const auto s0 = clock::now();
    system(sent);
    const auto s1 = clock::now();
    latencies_ms.push_back(
        std::chrono::duration<double, std::milli>(s1 - s0).count());
  }
  const auto t1 = clock::now();

  BenchResult result;
  result.sentences = corpus.size();
  result.total_seconds = std::chrono::duration<double>(t1 - t0).count();
  result.sentences_per_second =
      result.total_seconds > 0
          ? static_cast<double>(corpus.size()) / result.total_seconds
          : std::numeric_limits<double>::infinity();
  std::sort(latencies_ms.begin(), latencies_ms.end());
  const auto pct = [&](double q) {
    const std::size_t idx = std::min(
        latencies_ms.size() - 1,
        static_cast<std::size_t>(q * static_cast<double>(latencies_ms.size())));
    return latencies_ms[idx];
  };
  result.p50_ms = pct(0.50);
  result.p95_ms = pct(0.95);
  return result;
}

EvalReport compare_report(
    const std::vector<std::pair<std::string, RestoreFn>>& systems,
    const TokenCorpus& test_source, const TokenCorpus& test_reference,
    int warmup) {
  EvalReport report;
  for (const auto& [name, fn] : systems) {
    SystemReport sys;
    sys.name = name;
    TokenCorpus outputs;
    outputs.reserve(test_source.size());
    for (const auto& sent : test_source) outputs.push_back(fn(sent));
    sys.accuracy = word_accuracy(outputs, test_reference);
    sys.bleu = bleu(outputs, test_reference);
    sys.bench = benchmark_throughput(fn, test_source, warmup);
    report.systems.push_back(std::move(sys));
  }
  return report;
}

void render_text(std::ostream& out, const EvalReport& report) {
  std::size_t width = 12;
  for (const auto& sys : report.systems)
    width = std::max(width, sys.name.size() + 2);

  if (!report.corpus_id.empty())
    out << "# corpus: " << report.corpus_id << "\n";
  for (const auto& [k, v] : report.config)
    out << "# config: " << k << " = " << v << "\n";

  out << std::left << std::setw(static_cast<int>(width)) << "System"
      << std::right << std::setw(10) << "Accuracy" << std::setw(10) << "BLEU"
      << "\n";
  out << std::fixed << std::setprecision(2);
  for (const auto& sys : report.systems)
    out << std::left << std::setw(static_cast<int>(width)) << sys.name
        << std::right << std::setw(10) << sys.accuracy << std::setw(10)
        << sys.bleu << "\n";

  out << "\n"
      << std::left << std::setw(static_cast<int>(width)) << "System"
      << std::right << std::setw(14) << "Training(s)" << std::setw(12)
      << "sent/s" << std::setw(12) << "p50(ms)" << std::setw(12) << "p95(ms)"
      << "\n";
  for (const auto& sys : report.systems) {
    out << std::left << std::setw(static_cast<int>(width)) << sys.name
        << std::right << std::setw(14);
    if (sys.train_seconds >= 0)
      out << sys.train_seconds;
    else
      out << "-";
    out << std::setw(12) << sys.bench.sentences_per_second << std::setw(12)
        << sys.bench.p50_ms << std::setw(12) << sys.bench.p95_ms << "\n";
  }
}

std::string render_json(const EvalReport& report) {
  nlohmann::json j;
  j["corpus"] = report.corpus_id;
  j["config"] = report.config;
  j["systems"] = nlohmann::json::array();
  for (const auto& sys : report.systems) {
    nlohmann::json s;
    s["name"] = sys.name;
    s["accuracy"] = sys.accuracy;
    s["bleu"] = sys.bleu;
    s["sentences_per_second"] = sys.bench.sentences_per_second;
    s["latency_p50_ms"] = sys.bench.p50_ms;
    s["latency_p95_ms"] = sys.bench.p95_ms;
    if (sys.train_seconds >= 0) s["train_seconds"] = sys.train_seconds;
    j["systems"].push_back(std::move(s));
  }
  return j.dump(2);
}

}  // namespace vdr
