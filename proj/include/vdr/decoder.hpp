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

#include <span>
#include <string>
#include <vector>

#include "vdr/lm.hpp"
#include "vdr/phrase_model.hpp"

namespace vdr {

struct DecoderWeights {
  double lm = 1.0;
  double phi = 1.0;
  double phi_rev = 1.0;
  double distortion = 1.0;
};

struct DecoderConfig {
  double omega = 1.0;          // per-output-token length calibration, > 0
  int beam_width = 16;         // histogram pruning per coverage stack
  int max_phrase_len = 4;
  int distortion_limit = 0;    // 0 = monotone
  double distortion_base = 0.5;  // d = base^{|start - prev_end|}
  DecoderWeights weights;
};

struct ScoredSequence {
  std::vector<std::string> tokens;
  double score = 0.0;
};

// Beam search over phrase segmentations scoring
//   sum_i [ w_phi log phi(f_i|e_i) + w_rev log phi_rev(e_i|f_i)
//           + w_d |jump_i| log(base) ]
//   + w_lm log p_LM(e) + length(e) log omega.
// Unknown single-token source phrases are copied through with phi = 1, so
// every input is decodable. Hypotheses identical in (coverage, end
// position, LM state) are recombined; score ties break toward the
// lexicographically smaller output.
std::vector<std::string> decode(std::span<const std::string> source,
                                const PhraseTable& table, const NGramModel& lm,
                                const DecoderConfig& config = {});

// Distinct outputs in non-increasing score order; the first equals
// decode()'s output.
std::vector<ScoredSequence> decode_nbest(std::span<const std::string> source,
                                         const PhraseTable& table,
                                         const NGramModel& lm,
                                         const DecoderConfig& config, int n);

// Exhaustive test oracle: enumerates every segmentation, candidate choice
// and permissible reordering, and scores complete derivations by the same
// formula. Guards: source length <= 8 and at most 10 candidates per
// phrase; throws std::invalid_argument past either bound.
ScoredSequence brute_force_decode(std::span<const std::string> source,
                                  const PhraseTable& table,
                                  const NGramModel& lm,
                                  const DecoderConfig& config = {});

// Serial reference for the monotone case: exact dynamic program over
// (position, LM state), no pruning. Requires distortion_limit == 0.
ScoredSequence decode_monotone_dp(std::span<const std::string> source,
                                  const PhraseTable& table,
                                  const NGramModel& lm,
                                  const DecoderConfig& config = {});

// Best completed score alongside the tokens (same search as decode()).
ScoredSequence decode_scored(std::span<const std::string> source,
                             const PhraseTable& table, const NGramModel& lm,
                             const DecoderConfig& config = {});

}  // namespace vdr
