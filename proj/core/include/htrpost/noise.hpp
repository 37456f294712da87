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

#ifndef HTRPOST_NOISE_HPP_
#define HTRPOST_NOISE_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace htrpost {

using Seed = std::uint64_t;

using ConfusionMap = std::map<char32_t, std::u32string>;

// Corruption parameters for synthesizing (noisy, clean) training pairs:
// uniform insertions and deletions plus substitutions drawn from a map of
// visually similar characters.
struct NoiseModel {
  double p_insert = 0.02;      // per gap, including both ends
  double p_delete = 0.02;      // per character
  double p_substitute = 0.02;  // per character
  ConfusionMap confusion;
  std::u32string insert_alphabet;

  void validate() const;
};

// Built-in table of glyphs handwriting recognisers commonly mistake for one
// another (always includes d -> {c, l}). No character maps to itself.
// data/confusion_default.json carries the same table for reference and as a
// template for custom maps.
const ConfusionMap& default_confusion_map();

// Characters eligible for insertion by default: lowercase a-z and space.
const std::u32string& default_insert_alphabet();

NoiseModel default_noise_model();

// One left-to-right pass, deterministic given (text, model, seed). Per gap
// (including both ends) a character from insert_alphabet is inserted with
// p_insert; per original character, it is deleted with p_delete, else
// substituted with p_substitute by a uniformly chosen confusion entry
// (copied unchanged when unmapped), else copied.
std::string corrupt(const std::string& text, const NoiseModel& model,
                    Seed seed);

// One (noisy, clean) pair per corpus line. Pair i depends only on
// (line i, seed, i): the per-line generator is seeded with
// splitmix64(seed + (i+1) * 0x9E3779B97F4A7C15), so streams are
// reproducible and any line can be regenerated independently.
std::vector<std::pair<std::string, std::string>> generate_pairs(
    std::istream& corpus, const NoiseModel& model, Seed seed);

// Streaming variant writing "noisy TAB clean" lines; returns the pair count.
std::size_t generate_pairs_tsv(std::istream& corpus, std::ostream& out,
                               const NoiseModel& model, Seed seed);

// The per-line sub-seed mixing function (splitmix64 finalizer).
Seed mix_seed(Seed seed, std::uint64_t index);

}  // namespace htrpost

#endif  // HTRPOST_NOISE_HPP_
