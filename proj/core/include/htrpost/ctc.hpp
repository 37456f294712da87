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

#ifndef HTRPOST_CTC_HPP_
#define HTRPOST_CTC_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace htrpost {

// The symbol inventory of an emission grid. blank_index is explicit rather
// than fixed because exporters disagree on where the blank lives; the grid
// file format records it.
class Alphabet {
 public:
  Alphabet(std::u32string symbols, std::size_t blank_index);

  std::size_t size() const { return symbols_.size(); }
  std::size_t blank_index() const { return blank_index_; }
  char32_t symbol(std::size_t i) const { return symbols_.at(i); }
  const std::u32string& symbols() const { return symbols_; }
  bool is_blank(std::size_t i) const { return i == blank_index_; }

  // Index of a symbol, or size() when absent.
  std::size_t index_of(char32_t c) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::u32string symbols_;
  std::size_t blank_index_;
};

// N x M grid of per-timestep symbol probabilities as produced by a line
// recogniser: N timesteps, M = alphabet size. Every entry lies in [0,1]
// and each row sums to 1 within 1e-6.
class EmissionGrid {
 public:
  EmissionGrid(Alphabet alphabet, std::vector<double> row_major_probs,
               std::size_t n_rows);
  static EmissionGrid from_rows(Alphabet alphabet,
                                const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return n_rows_; }
  std::size_t symbols() const { return alphabet_.size(); }
  const Alphabet& alphabet() const { return alphabet_; }
  double prob(std::size_t t, std::size_t s) const {
    return probs_[t * alphabet_.size() + s];
  }
  std::span<const double> row(std::size_t t) const {
    return {probs_.data() + t * alphabet_.size(), alphabet_.size()};
  }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
  std::size_t n_rows_;
};

// A decoded string with its natural-log score under the decoder's scoring
// rule: best-path probability for greedy decoding, total collapsed-string
// mass for beam and exhaustive decoding.
struct DecodeResult {
  std::string text;
  double log_prob = 0.0;

  bool operator==(const DecodeResult&) const = default;
};

// Log-probability provider for shallow fusion: returns ln P(next | prefix).
using LmScorer =
    std::function<double(const std::u32string& prefix, char32_t next)>;

struct BeamSearchParams {
  std::size_t beam_width = 32;
  std::size_t top_k = 1;
  // When lm is set, extending a prefix by character c multiplies the
  // extension mass by P(c | prefix)^lm_weight.
  LmScorer lm;
  double lm_weight = 0.0;
};

// The CTC many-to-one map: merge adjacent repeats, then delete blanks.
std::string ctc_collapse(std::span<const std::size_t> labels,
                         const Alphabet& alphabet);

// Best-path decoding: per-row argmax (ties to the lowest index) collapsed
// with ctc_collapse. log_prob is the sum of the logs of the row maxima.
DecodeResult greedy_decode(const EmissionGrid& grid);

// Prefix beam search over collapsed strings. Per step, each surviving
// prefix tracks blank-ending and non-blank-ending mass; paths collapsing to
// the same string are merged by summing mass, and the beam_width best
// prefixes by total mass survive. Scores stay in natural-log space with
// log-sum-exp merging. Returns up to top_k distinct strings by total score,
// descending, ties broken lexicographically.
std::vector<DecodeResult> beam_search_decode(const EmissionGrid& grid,
                                             const BeamSearchParams& params);

// Exact marginal probability of every collapsed string, by enumerating all
// M^N paths. Refuses grids with M^N > 10^7.
std::map<std::u32string, double> exhaustive_distribution(
    const EmissionGrid& grid);

// Top top_k collapsed strings from exhaustive_distribution; the testing
// oracle for beam search.
std::vector<DecodeResult> exhaustive_decode(const EmissionGrid& grid,
                                            std::size_t top_k);

// Encodes text as the deterministic grid [blank, c0, blank, c1, ..., blank]
// with probability 1 rows. greedy_decode inverts it exactly.
EmissionGrid one_hot_grid(const std::string& text, const Alphabet& alphabet);

}  // namespace htrpost

#endif  // HTRPOST_CTC_HPP_
