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

#include "htrpost/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "htrpost/errors.hpp"
#include "htrpost/utf8.hpp"

namespace htrpost {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

Alphabet::Alphabet(std::u32string symbols, std::size_t blank_index)
    : symbols_(std::move(symbols)), blank_index_(blank_index) {
  if (symbols_.empty()) throw ValidationError("Alphabet must not be empty");
  if (blank_index_ >= symbols_.size()) {
    throw ValidationError("Alphabet blank_index " + std::to_string(blank_index_) +
                          " out of range for " + std::to_string(symbols_.size()) +
                          " symbols");
  }
  const std::set<char32_t> distinct(symbols_.begin(), symbols_.end());
  if (distinct.size() != symbols_.size()) {
    throw ValidationError("Alphabet symbols must be distinct");
  }
}

std::size_t Alphabet::index_of(char32_t c) const {
  const auto pos = symbols_.find(c);
  return pos == std::u32string::npos ? symbols_.size() : pos;
}

EmissionGrid::EmissionGrid(Alphabet alphabet, std::vector<double> row_major_probs,
                           std::size_t n_rows)
    : alphabet_(std::move(alphabet)),
      probs_(std::move(row_major_probs)),
      n_rows_(n_rows) {
  if (n_rows_ == 0) throw ValidationError("EmissionGrid needs at least one row");
  const std::size_t m = alphabet_.size();
  if (probs_.size() != n_rows_ * m) {
    throw ValidationError("EmissionGrid: expected " +
                          std::to_string(n_rows_ * m) + " probabilities, got " +
                          std::to_string(probs_.size()));
  }
  for (std::size_t t = 0; t < n_rows_; ++t) {
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const double p = probs_[t * m + s];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("EmissionGrid: probability out of [0,1] at row " +
                              std::to_string(t));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw ValidationError("EmissionGrid: row " + std::to_string(t) +
                            " sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

EmissionGrid EmissionGrid::from_rows(
    Alphabet alphabet, const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * alphabet.size());
  for (const auto& row : rows) {
    if (row.size() != alphabet.size()) {
      throw ValidationError("EmissionGrid: row width mismatch");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return EmissionGrid(std::move(alphabet), std::move(flat), rows.size());
}

std::string ctc_collapse(std::span<const std::size_t> labels,
                         const Alphabet& alphabet) {
  std::u32string out;
  std::size_t prev = alphabet.size();  // sentinel: no previous label
  for (std::size_t label : labels) {
    if (label >= alphabet.size()) {
      throw ValidationError("ctc_collapse: label " + std::to_string(label) +
                            " out of range");
    }
    if (label != prev && !alphabet.is_blank(label)) {
      out.push_back(alphabet.symbol(label));
    }
    prev = label;
  }
  return utf8_encode(out);
}

DecodeResult greedy_decode(const EmissionGrid& grid) {
  std::vector<std::size_t> path(grid.rows());
  double log_prob = 0.0;
  for (std::size_t t = 0; t < grid.rows(); ++t) {
    const auto row = grid.row(t);
    const auto best = std::max_element(row.begin(), row.end());
    path[t] = static_cast<std::size_t>(best - row.begin());
    log_prob += std::log(*best);
  }
  return DecodeResult{ctc_collapse(path, grid.alphabet()), log_prob};
}

namespace {

struct PrefixMass {
  double blank = kNegInf;     // mass of paths ending in blank
  double nonblank = kNegInf;  // mass of paths ending in the last character

  double total() const { return log_sum_exp(blank, nonblank); }
};

// Deterministic final ordering: best score first, ties lexicographic.
std::vector<DecodeResult> top_results(
    const std::map<std::u32string, double>& scores, std::size_t top_k) {
  std::vector<std::pair<std::u32string, double>> ranked(scores.begin(),
                                                        scores.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  std::vector<DecodeResult> out;
  out.reserve(std::min(top_k, ranked.size()));
  for (const auto& [text, score] : ranked) {
    if (out.size() == top_k) break;
    out.push_back(DecodeResult{utf8_encode(text), score});
  }
  return out;
}

}  // namespace

std::vector<DecodeResult> beam_search_decode(const EmissionGrid& grid,
                                             const BeamSearchParams& params) {
  if (params.beam_width == 0) {
    throw ValidationError("beam_search_decode: beam_width must be >= 1");
  }
  if (params.top_k == 0) {
    throw ValidationError("beam_search_decode: top_k must be >= 1");
  }
  if (params.top_k > params.beam_width) {
    throw ValidationError("beam_search_decode: top_k (" +
                          std::to_string(params.top_k) +
                          ") must not exceed beam_width (" +
                          std::to_string(params.beam_width) + ")");
  }
  if (params.lm && params.lm_weight < 0.0) {
    throw ValidationError("beam_search_decode: lm_weight must be >= 0");
  }

  const Alphabet& alphabet = grid.alphabet();
  // std::map keeps prefix iteration order deterministic, which pins the
  // floating-point accumulation order and with it the whole decode.
  std::map<std::u32string, PrefixMass> beams;
  beams[U""] = PrefixMass{0.0, kNegInf};

  for (std::size_t t = 0; t < grid.rows(); ++t) {
    std::map<std::u32string, PrefixMass> next;
    for (const auto& [prefix, mass] : beams) {
      for (std::size_t s = 0; s < alphabet.size(); ++s) {
        const double p = grid.prob(t, s);
        if (p <= 0.0) continue;
        const double lp = std::log(p);
        if (alphabet.is_blank(s)) {
          PrefixMass& m = next[prefix];
          m.blank = log_sum_exp(m.blank, mass.total() + lp);
          continue;
        }
        const char32_t c = alphabet.symbol(s);
        double extend;
        if (!prefix.empty() && prefix.back() == c) {
          // Same character again without a blank gap: the collapsed string
          // is unchanged.
          PrefixMass& m = next[prefix];
          m.nonblank = log_sum_exp(m.nonblank, mass.nonblank + lp);
          // Only the blank-ending mass can start a genuine repeat.
          extend = mass.blank + lp;
        } else {
          extend = mass.total() + lp;
        }
        if (extend == kNegInf) continue;
        if (params.lm && params.lm_weight > 0.0) {
          extend += params.lm_weight * params.lm(prefix, c);
        }
        std::u32string extended = prefix;
        extended.push_back(c);
        PrefixMass& m = next[extended];
        m.nonblank = log_sum_exp(m.nonblank, extend);
      }
    }

    if (next.size() > params.beam_width) {
      std::vector<std::pair<const std::u32string*, double>> ranked;
      ranked.reserve(next.size());
      for (const auto& [prefix, mass] : next) {
        ranked.emplace_back(&prefix, mass.total());
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) {
                         if (a.second != b.second) return a.second > b.second;
                         return *a.first < *b.first;
                       });
      std::map<std::u32string, PrefixMass> pruned;
      for (std::size_t i = 0; i < params.beam_width; ++i) {
        pruned.emplace(*ranked[i].first, next[*ranked[i].first]);
      }
      next = std::move(pruned);
    }
    beams = std::move(next);
  }

  std::map<std::u32string, double> totals;
  for (const auto& [prefix, mass] : beams) {
    const double total = mass.total();
    if (total != kNegInf) totals[prefix] = total;
  }
  return top_results(totals, params.top_k);
}

namespace {

void enumerate_paths(const EmissionGrid& grid, std::size_t t,
                     std::size_t prev_label, double path_prob,
                     std::u32string& collapsed,
                     std::map<std::u32string, double>& acc) {
  if (t == grid.rows()) {
    acc[collapsed] += path_prob;
    return;
  }
  const Alphabet& alphabet = grid.alphabet();
  for (std::size_t s = 0; s < alphabet.size(); ++s) {
    const double p = grid.prob(t, s);
    if (p <= 0.0) continue;
    const bool emits = s != prev_label && !alphabet.is_blank(s);
    if (emits) collapsed.push_back(alphabet.symbol(s));
    enumerate_paths(grid, t + 1, s, path_prob * p, collapsed, acc);
    if (emits) collapsed.pop_back();
  }
}

}  // namespace

std::map<std::u32string, double> exhaustive_distribution(
    const EmissionGrid& grid) {
  const double paths =
      std::pow(static_cast<double>(grid.symbols()),
               static_cast<double>(grid.rows()));
  if (paths > 1e7) {
    throw ValidationError(
        "exhaustive_distribution: M^N exceeds the 10^7 path bound (M=" +
        std::to_string(grid.symbols()) + ", N=" + std::to_string(grid.rows()) +
        ")");
  }
  std::map<std::u32string, double> acc;
  std::u32string collapsed;
  enumerate_paths(grid, 0, grid.symbols(), 1.0, collapsed, acc);
  return acc;
}

std::vector<DecodeResult> exhaustive_decode(const EmissionGrid& grid,
                                            std::size_t top_k) {
  if (top_k == 0) throw ValidationError("exhaustive_decode: top_k must be >= 1");
  std::map<std::u32string, double> log_scores;
  for (const auto& [text, p] : exhaustive_distribution(grid)) {
    if (p > 0.0) log_scores[text] = std::log(p);
  }
  return top_results(log_scores, top_k);
}

EmissionGrid one_hot_grid(const std::string& text, const Alphabet& alphabet) {
  const std::u32string chars = utf8_decode(text);
  const std::size_t m = alphabet.size();
  const std::size_t n = 2 * chars.size() + 1;
  std::vector<double> probs(n * m, 0.0);
  auto set_row = [&](std::size_t t, std::size_t s) { probs[t * m + s] = 1.0; };
  set_row(0, alphabet.blank_index());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const std::size_t s = alphabet.index_of(chars[i]);
    if (s == m) {
      throw ValidationError("one_hot_grid: character not in alphabet: " +
                            utf8_encode(chars[i]));
    }
    if (alphabet.is_blank(s)) {
      throw ValidationError("one_hot_grid: text contains the blank symbol");
    }
    set_row(2 * i + 1, s);
    set_row(2 * i + 2, alphabet.blank_index());
  }
  return EmissionGrid(alphabet, std::move(probs), n);
}

}  // namespace htrpost
