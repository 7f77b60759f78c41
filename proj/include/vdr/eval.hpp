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
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vdr {

using TokenCorpus = std::vector<std::vector<std::string>>;

struct AccuracyOptions {
  bool case_sensitive = true;
  bool exclude_punct = false;  // skip positions whose reference token is punctuation
};

// Percentage of correctly restored words, position-wise. When a hypothesis
// and its reference differ in length, the overhang counts as errors on
// either side: denominator = reference tokens + surplus hypothesis tokens.
// Throws std::invalid_argument on sentence-count mismatch.
double word_accuracy(const TokenCorpus& hypotheses, const TokenCorpus& references,
                     const AccuracyOptions& options = {});

// Corpus-level BLEU in [0,100]: geometric mean of modified 1..4-gram
// precisions times the brevity penalty, no smoothing (any zero precision
// gives 0). Single reference. Throws std::invalid_argument on empty input
// or count mismatch.
double bleu(const TokenCorpus& hypotheses, const TokenCorpus& references);

using RestoreFn =
    std::function<std::vector<std::string>(const std::vector<std::string>&)>;

struct BenchResult {
  double sentences_per_second = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  std::size_t sentences = 0;
  double total_seconds = 0;
};

// Single-stream wall-clock throughput; the first `warmup` restorations run
// untimed.
BenchResult benchmark_throughput(const RestoreFn& system, const TokenCorpus& corpus,
                                 int warmup = 10);

struct SystemReport {
  std::string name;
  double accuracy = 0;
  double bleu = 0;
  BenchResult bench;
  double train_seconds = -1;  // < 0 = unknown
};

struct EvalReport {
  std::vector<SystemReport> systems;
  std::string corpus_id;
  std::map<std::string, std::string> config;  // echoed effective config
};

// Scores each system on the held-out corpus and benchmarks it.
EvalReport compare_report(
    const std::vector<std::pair<std::string, RestoreFn>>& systems,
    const TokenCorpus& test_source, const TokenCorpus& test_reference,
    int warmup = 10);

// Aligned-column quality and speed tables.
void render_text(std::ostream& out, const EvalReport& report);
// Machine-readable form of the same report.
std::string render_json(const EvalReport& report);

}  // namespace vdr
