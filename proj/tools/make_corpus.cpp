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

// Emits a deterministic template-generated Vietnamese corpus, one sentence
// per line, for desk-scale experiments.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "viet_corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a toy diacritized Vietnamese corpus"};
  std::size_t sentences = 5200;
  std::uint64_t seed = 1;
  bool ambiguity = false;
  app.add_option("--sentences", sentences, "number of sentences");
  app.add_option("--seed", seed, "generator seed");
  app.add_flag("--ambiguity", ambiguity,
               "emit the fixed 200-sentence ambiguity corpus instead");
  CLI11_PARSE(app, argc, argv);

  const auto corpus = ambiguity ? vdr::textgen::ambiguity_corpus()
                                : vdr::textgen::make_corpus(sentences, seed);
  for (const auto& line : corpus) std::cout << line << '\n';
  return 0;
}
