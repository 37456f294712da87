// Copyright 2026 The Htrpost Authors
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

#include "htrpost/noise.hpp"

#include <istream>
#include <ostream>
#include <random>

#include "htrpost/errors.hpp"
#include "htrpost/utf8.hpp"

namespace htrpost {

namespace {

// Raw-output draws instead of std::uniform_* distributions, so streams are
// identical across standard library implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

}  // namespace

void NoiseModel::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(p_insert) || !in_unit(p_delete) || !in_unit(p_substitute)) {
    throw ValidationError("NoiseModel: probabilities must be in [0,1]");
  }
  if (p_delete + p_substitute > 1.0) {
    throw ValidationError("NoiseModel: p_delete + p_substitute must be <= 1");
  }
  if (p_insert > 0.0 && insert_alphabet.empty()) {
    throw ValidationError("NoiseModel: p_insert > 0 needs an insert_alphabet");
  }
  for (const auto& [c, alternatives] : confusion) {
    if (alternatives.empty()) {
      throw ValidationError("NoiseModel: empty confusion entry for '" +
                            utf8_encode(c) + "'");
    }
    if (alternatives.find(c) != std::u32string::npos) {
      throw ValidationError("NoiseModel: '" + utf8_encode(c) +
                            "' maps to itself");
    }
  }
}

const ConfusionMap& default_confusion_map() {
  static const ConfusionMap map = {
      {U'a', U"ou"},  {U'b', U"hl"},  {U'c', U"eo"},  {U'd', U"cl"},
      {U'e', U"co"},  {U'f', U"t"},   {U'g', U"qy"},  {U'h', U"bn"},
      {U'i', U"lj"},  {U'j', U"iy"},  {U'k', U"h"},   {U'l', U"it"},
      {U'm', U"nw"},  {U'n', U"mru"}, {U'o', U"ac"},  {U'p', U"q"},
      {U'q', U"gp"},  {U'r', U"nv"},  {U's', U"z"},   {U't', U"fl"},
      {U'u', U"nv"},  {U'v', U"ur"},  {U'w', U"mv"},  {U'y', U"gq"},
      {U'z', U"s"},   {U'0', U"o"},   {U'1', U"l"},   {U'5', U"s"},
      {U'6', U"b"},   {U'9', U"q"},
  };
  return map;
}

const std::u32string& default_insert_alphabet() {
  static const std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyz ";
  return alphabet;
}

NoiseModel default_noise_model() {
  NoiseModel model;
  model.confusion = default_confusion_map();
  model.insert_alphabet = default_insert_alphabet();
  return model;
}

std::string corrupt(const std::string& text, const NoiseModel& model,
                    Seed seed) {
  model.validate();
  const std::u32string chars = utf8_decode(text);
  std::mt19937_64 rng(seed);
  std::u32string out;
  out.reserve(chars.size() + 4);
  for (std::size_t i = 0; i <= chars.size(); ++i) {
    if (model.p_insert > 0.0 && uniform01(rng) < model.p_insert) {
      out.push_back(
          model.insert_alphabet[uniform_index(rng, model.insert_alphabet.size())]);
    }
    if (i == chars.size()) break;
    const char32_t c = chars[i];
    const double u = uniform01(rng);
    if (u < model.p_delete) continue;
    if (u < model.p_delete + model.p_substitute) {
      if (const auto it = model.confusion.find(c); it != model.confusion.end()) {
        out.push_back(it->second[uniform_index(rng, it->second.size())]);
      } else {
        out.push_back(c);  // unmapped: substitution is a no-op
      }
      continue;
    }
    out.push_back(c);
  }
  return utf8_encode(out);
}

Seed mix_seed(Seed seed, std::uint64_t index) {
  // splitmix64 finalizer over seed + (index+1) * golden gamma.
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::pair<std::string, std::string>> generate_pairs(
    std::istream& corpus, const NoiseModel& model, Seed seed) {
  model.validate();
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::uint64_t index = 0;
  while (std::getline(corpus, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pairs.emplace_back(corrupt(line, model, mix_seed(seed, index)), line);
    ++index;
  }
  return pairs;
}

std::size_t generate_pairs_tsv(std::istream& corpus, std::ostream& out,
                               const NoiseModel& model, Seed seed) {
  model.validate();
  std::string line;
  std::uint64_t index = 0;
  while (std::getline(corpus, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out << corrupt(line, model, mix_seed(seed, index)) << '\t' << line << '\n';
    ++index;
  }
  if (!out) throw IoError("failed writing noise pairs");
  return static_cast<std::size_t>(index);
}

}  // namespace htrpost
