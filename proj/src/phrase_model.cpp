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

#include "vdr/phrase_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <omp.h>

namespace vdr {

Alignment align_monotone(const SentencePair& pair) {
  if (pair.source.size() != pair.target.size())
    throw std::invalid_argument(
        "align_monotone: source/target length mismatch (" +
        std::to_string(pair.source.size()) + " vs " +
        std::to_string(pair.target.size()) + ")");
  Alignment a;
  a.links.reserve(pair.source.size());
  for (std::uint32_t i = 0; i < pair.source.size(); ++i)
    a.links.emplace_back(i, i);
  return a;
}

namespace {

std::string join_span(const std::vector<std::string>& tokens, std::size_t begin,
                      std::size_t len) {
  std::string out;
  for (std::size_t k = 0; k < len; ++k) {
    if (k) out.push_back(' ');
    out += tokens[begin + k];
  }
  return out;
}

void count_pair(const SentencePair& pair, int max_len,
                std::unordered_map<std::string, std::uint64_t>& joint) {
  const std::size_t n = pair.source.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t top = std::min<std::size_t>(max_len, n - i);
    for (std::size_t len = 1; len <= top; ++len) {
      ++joint[PhraseCounts::key(join_span(pair.source, i, len),
                                join_span(pair.target, i, len))];
    }
  }
}

}  // namespace

PhraseCounts extract_phrases(const ParallelCorpus& corpus, int max_len,
                             int jobs) {
  if (max_len < 1)
    throw std::invalid_argument("extract_phrases: max_len must be >= 1");
  PhraseCounts counts;
  if (jobs <= 1) {
    for (const auto& pair : corpus.pairs) count_pair(pair, max_len, counts.joint);
    return counts;
  }
  std::vector<std::unordered_map<std::string, std::uint64_t>> partial(jobs);
#pragma omp parallel num_threads(jobs)
  {
    const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < corpus.pairs.size(); ++i)
      count_pair(corpus.pairs[i], max_len, partial[tid]);
  }
  for (const auto& p : partial)
    for (const auto& [key, c] : p) counts.joint[key] += c;
  return counts;
}

PhraseTable estimate_phrase_table(const PhraseCounts& counts,
                                  std::uint64_t min_count) {
  if (counts.joint.empty())
    throw std::invalid_argument("estimate_phrase_table: empty counts");
  std::unordered_map<std::string, std::uint64_t> source_totals, target_totals;
  for (const auto& [key, c] : counts.joint) {
    const std::size_t sep = key.find('\x01');
    source_totals[key.substr(0, sep)] += c;
    target_totals[key.substr(sep + 1)] += c;
  }
  PhraseTable table;
  table.entries_.reserve(counts.joint.size());
  for (const auto& [key, c] : counts.joint) {
    if (c < min_count) continue;
    const std::size_t sep = key.find('\x01');
    PhraseEntry e;
    e.source = key.substr(0, sep);
    e.target = key.substr(sep + 1);
    e.count = c;
    e.phi = static_cast<double>(c) /
            static_cast<double>(target_totals.at(e.target));
    e.phi_rev = static_cast<double>(c) /
                static_cast<double>(source_totals.at(e.source));
    table.entries_.push_back(std::move(e));
  }
  std::sort(table.entries_.begin(), table.entries_.end(),
            [](const PhraseEntry& a, const PhraseEntry& b) {
              return a.source != b.source ? a.source < b.source
                                          : a.target < b.target;
            });
  table.build_index();
  return table;
}

void PhraseTable::build_index() {
  by_source_.clear();
  max_phrase_len_ = 0;
  for (const auto& e : entries_) {
    PhraseOption opt;
    std::istringstream ts(e.target);
    std::string tok;
    while (ts >> tok) opt.target_tokens.push_back(tok);
    opt.log_phi = std::log(e.phi);
    opt.log_phi_rev = std::log(e.phi_rev);
    opt.count = e.count;
    by_source_[e.source].push_back(std::move(opt));
    const int len =
        1 + static_cast<int>(std::count(e.source.begin(), e.source.end(), ' '));
    max_phrase_len_ = std::max(max_phrase_len_, len);
  }
  for (auto& [src, opts] : by_source_) {
    (void)src;
    std::sort(opts.begin(), opts.end(),
              [](const PhraseOption& a, const PhraseOption& b) {
                if (a.log_phi_rev != b.log_phi_rev)
                  return a.log_phi_rev > b.log_phi_rev;
                return a.target_tokens < b.target_tokens;
              });
  }
}

const std::vector<PhraseOption>* PhraseTable::lookup(
    const std::string& source) const {
  auto it = by_source_.find(source);
  return it == by_source_.end() ? nullptr : &it->second;
}

double PhraseTable::max_normalization_error() const {
  std::unordered_map<std::string, double> sums;
  for (const auto& e : entries_) sums[e.target] += e.phi;
  double worst = 0.0;
  for (const auto& [tgt, s] : sums) {
    (void)tgt;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

void PhraseTable::save(std::ostream& out) const {
  out.precision(12);
  for (const auto& e : entries_)
    out << e.source << " ||| " << e.target << " ||| " << e.phi << ' '
        << e.phi_rev << ' ' << e.count << '\n';
}

void PhraseTable::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save(out);
}

PhraseTable PhraseTable::load(std::istream& in) {
  PhraseTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t a = line.find(" ||| ");
    const std::size_t b = a == std::string::npos
                              ? std::string::npos
                              : line.find(" ||| ", a + 5);
    if (b == std::string::npos)
      throw std::runtime_error("phrase table line " + std::to_string(lineno) +
                               ": expected 'f ||| e ||| phi phi_rev count'");
    PhraseEntry e;
    e.source = line.substr(0, a);
    e.target = line.substr(a + 5, b - a - 5);
    std::istringstream rest(line.substr(b + 5));
    if (!(rest >> e.phi >> e.phi_rev >> e.count))
      throw std::runtime_error("phrase table line " + std::to_string(lineno) +
                               ": bad numeric fields");
    table.entries_.push_back(std::move(e));
  }
  if (table.entries_.empty())
    throw std::runtime_error("phrase table: no entries");
  table.build_index();
  return table;
}

PhraseTable PhraseTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return PhraseTable::load(in);
}

}  // namespace vdr
