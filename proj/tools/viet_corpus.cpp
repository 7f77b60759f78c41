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

#include "viet_corpus.hpp"

#include <random>

#include "vdr/diacritics.hpp"
#include "vdr/utf8.hpp"

namespace vdr::textgen {

namespace {

const std::vector<std::string> kSubjects = {
    "tôi",       "bạn",        "cô ấy",      "anh ấy",     "chúng tôi",
    "họ",        "mẹ tôi",     "bố tôi",     "em gái tôi", "ông ấy",
    "bà ấy",     "cô giáo",    "người dân",  "các em nhỏ", "gia đình tôi",
    "chị tôi",   "bác sĩ",     "người nông dân"};

const std::vector<std::string> kAdverbs = {"rất",  "khá",     "hơi",
                                           "thật", "luôn",    "thường",
                                           "đôi khi", "luôn luôn"};

const std::vector<std::string> kAdjectives = {
    "đảm đang",  "chăm chỉ",  "xinh đẹp",  "thông minh", "vui vẻ",
    "tốt bụng",  "cẩn thận",  "hiền lành", "mạnh mẽ",    "nhanh nhẹn",
    "hạnh phúc", "mệt mỏi",   "bận rộn",   "giỏi giang"};

const std::vector<std::string> kVerbs = {
    "ăn",   "uống", "đọc", "viết", "học",  "làm", "mua",
    "bán",  "nấu",  "thích", "yêu", "xem",  "nghe", "tìm",
    "gặp",  "tặng", "giữ"};

const std::vector<std::string> kObjects = {
    "cơm",       "phở",      "sách",     "báo",       "bánh mì",
    "cà phê",    "trà",      "áo dài",   "xe đạp",    "bài hát",
    "bức tranh", "món quà",  "ngôi nhà", "vườn rau",  "bữa tối",
    "chiếc bánh"};

const std::vector<std::string> kPlaces = {
    "ở hà nội",   "ở sài gòn",  "ở trường", "ở nhà",
    "ở chợ",      "ở công viên", "ở thư viện", "ở quê"};

const std::vector<std::string> kTimes = {
    "hôm nay",   "ngày mai",   "hôm qua",  "buổi sáng",
    "buổi chiều", "buổi tối",  "mỗi ngày", "cuối tuần"};

std::string capitalize(const std::string& sentence) {
  if (sentence.empty()) return sentence;
  const DiacriticMap& map = diacritic_map();
  std::size_t i = 0;
  const char32_t first = utf8_decode_one(sentence, i);
  char32_t upper = first;
  if (const auto info = map.lookup(first); info && !info->upper) {
    if (const auto composed =
            map.compose(info->base, info->shape, info->tone, true))
      upper = *composed;
  } else if (first >= U'a' && first <= U'z') {
    upper = first - (U'a' - U'A');
  }
  std::string out;
  utf8_append(out, upper);
  out += sentence.substr(i);
  return out;
}

const std::string& pick(const std::vector<std::string>& pool,
                        std::mt19937_64& rng) {
  return pool[rng() % pool.size()];
}

}  // namespace

std::vector<std::string> make_corpus(std::size_t sentences,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(sentences);
  for (std::size_t i = 0; i < sentences; ++i) {
    std::string s;
    switch (rng() % 6) {
      case 0:
        s = pick(kTimes, rng) + " " + pick(kSubjects, rng) + " " +
            pick(kVerbs, rng) + " " + pick(kObjects, rng) + " " +
            pick(kPlaces, rng);
        break;
      case 1:
        s = pick(kSubjects, rng) + " " + pick(kAdverbs, rng) + " " +
            pick(kAdjectives, rng);
        break;
      case 2:
        s = pick(kSubjects, rng) + " " + pick(kVerbs, rng) + " " +
            pick(kObjects, rng) + " " + pick(kTimes, rng);
        break;
      case 3:
        s = pick(kTimes, rng) + " " + pick(kSubjects, rng) + " " +
            pick(kAdverbs, rng) + " " + pick(kAdjectives, rng);
        break;
      case 4:
        s = pick(kSubjects, rng) + " " + pick(kVerbs, rng) + " " +
            pick(kObjects, rng) + " và " + pick(kVerbs, rng) + " " +
            pick(kObjects, rng);
        break;
      default:
        s = pick(kSubjects, rng) + " muốn " + pick(kVerbs, rng) + " " +
            pick(kObjects, rng) + " " + pick(kPlaces, rng);
        break;
    }
    s = capitalize(s);
    if (rng() % 10 < 8) s += " .";
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> ambiguity_corpus() {
  std::vector<std::string> out;
  const std::vector<std::string> capable_subjects = {
      "Cô ấy", "Mẹ tôi", "Chị tôi", "Bà ấy", "Cô giáo"};
  // "rất đảm đang" contexts, including the bare five-token sentence
  for (int round = 0; round < 8; ++round)
    for (const auto& subj : capable_subjects)
      out.push_back(subj + " rất đảm đang" + (round % 2 ? " ." : ""));
  // "dâm đãng" in pejorative contexts only, never after "rất"
  const std::vector<std::string> pejorative = {
      "Hắn ta dâm đãng .",     "Kẻ dâm đãng bị bắt .",
      "Tên dâm đãng bỏ trốn .", "Hắn ta là kẻ dâm đãng ."};
  for (int round = 0; round < 5; ++round)
    for (const auto& s : pejorative) out.push_back(s);
  // filler built from the shared lexicon
  auto filler = make_corpus(200 - out.size(), 97);
  out.insert(out.end(), filler.begin(), filler.end());
  return out;
}

}  // namespace vdr::textgen
