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
#include <string>
#include <vector>

namespace vdr::textgen {

// Template-generated Vietnamese sentences over a fixed fully-diacritized
// lexicon. Deterministic given the seed; used for desk-scale experiments
// and the end-to-end test fixtures.
std::vector<std::string> make_corpus(std::size_t sentences, std::uint64_t seed);

// Small fixed corpus exercising the "đảm đang" / "dâm đãng" ambiguity:
// "rất đảm đang" appears in capable-housewife contexts while "dâm đãng"
// only follows pejorative subjects, so a 3-gram LM resolves the stripped
// form "dam dang" by context.
std::vector<std::string> ambiguity_corpus();

}  // namespace vdr::textgen
