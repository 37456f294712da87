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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "htrpost/ctc.hpp"
#include "htrpost/errors.hpp"
#include "htrpost/language.hpp"
#include "support.hpp"

using namespace htrpost;
using htrpost::testing::random_grid;
using htrpost::testing::random_text;
using htrpost::testing::test_alphabet;
using htrpost::testing::uniform_index;

namespace {

EmissionGrid grid3(const std::vector<std::vector<double>>& rows) {
  return EmissionGrid::from_rows(test_alphabet(rows[0].size()), rows);
}

}  // namespace

TEST_CASE("Alphabet validates symbols and blank index") {
  CHECK_THROWS_AS(Alphabet(U"", 0), ValidationError);
  CHECK_THROWS_AS(Alphabet(U"ab", 2), ValidationError);
  CHECK_THROWS_AS(Alphabet(U"aba", 0), ValidationError);
  const Alphabet a(U"-ab", 0);
  CHECK(a.index_of(U'b') == 2);
  CHECK(a.index_of(U'z') == a.size());
}

TEST_CASE("EmissionGrid validates shape and row sums") {
  const Alphabet a = test_alphabet(2);
  CHECK_THROWS_AS(EmissionGrid(a, {0.5, 0.5}, 2), ValidationError);
  CHECK_THROWS_AS(EmissionGrid(a, {0.7, 0.7}, 1), ValidationError);
  CHECK_THROWS_AS(EmissionGrid(a, {1.2, -0.2}, 1), ValidationError);
  CHECK_THROWS_AS(EmissionGrid(a, {}, 0), ValidationError);
  CHECK_NOTHROW(EmissionGrid(a, {0.5, 0.5}, 1));
}

TEST_CASE("ctc_collapse merges repeats then removes blanks") {
  const Alphabet a = test_alphabet(3);  // '-','a','b'
  CHECK(ctc_collapse(std::vector<std::size_t>{1, 1, 0, 1, 2}, a) == "aab");
  CHECK(ctc_collapse(std::vector<std::size_t>{0, 0, 0}, a) == "");
  CHECK(ctc_collapse(std::vector<std::size_t>{1, 0, 0, 1, 2, 2}, a) == "aab");
  CHECK(ctc_collapse(std::vector<std::size_t>{}, a) == "");
  CHECK_THROWS_AS(ctc_collapse(std::vector<std::size_t>{3}, a), ValidationError);
}

TEST_CASE("ctc_collapse output is blank-free and collapse-stable") {
  std::mt19937_64 rng(9001);
  const Alphabet a = test_alphabet(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> labels(uniform_index(rng, 30));
    for (auto& l : labels) l = uniform_index(rng, a.size());
    const std::string text = ctc_collapse(labels, a);
    CHECK(text.find('-') == std::string::npos);
    // Re-encoding the collapsed string as labels and collapsing again is a
    // fixed point.
    std::vector<std::size_t> relabeled;
    for (char c : text) relabeled.push_back(a.index_of(static_cast<char32_t>(c)));
    CHECK(ctc_collapse(relabeled, a) == text);
  }
}

TEST_CASE("greedy_decode picks the argmax path") {
  const auto blank_wins = grid3({{0.9, 0.1}});
  const DecodeResult r = greedy_decode(blank_wins);
  CHECK(r.text == "");
  CHECK(r.log_prob == doctest::Approx(std::log(0.9)));

  const auto ab = grid3({{0.1, 0.8, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.2, 0.7}});
  const DecodeResult r2 = greedy_decode(ab);
  CHECK(r2.text == "ab");
  CHECK(r2.log_prob ==
        doctest::Approx(std::log(0.8) + std::log(0.7) + std::log(0.7)));

  // Blank between repeats keeps both.
  const auto aa = grid3({{0.1, 0.9}, {0.8, 0.2}, {0.1, 0.9}});
  CHECK(greedy_decode(aa).text == "aa");

  // Ties go to the lowest index (the blank here).
  const auto tie = grid3({{0.4, 0.4, 0.2}});
  CHECK(greedy_decode(tie).text == "");
}

TEST_CASE("exhaustive_distribution on tiny grids matches hand enumeration") {
  const auto two_paths = grid3({{0.6, 0.4}});
  const auto dist = exhaustive_distribution(two_paths);
  REQUIRE(dist.size() == 2);
  CHECK(dist.at(U"") == doctest::Approx(0.6));
  CHECK(dist.at(U"a") == doctest::Approx(0.4));

  const auto results = exhaustive_decode(two_paths, 2);
  REQUIRE(results.size() == 2);
  CHECK(results[0].text == "");
  CHECK(results[0].log_prob == doctest::Approx(std::log(0.6)));
  CHECK(results[1].text == "a");
  CHECK(results[1].log_prob == doctest::Approx(std::log(0.4)));

  // Paths (-,-) -> ""; (-,a),(a,-),(a,a) -> "a".
  const auto uniform2 = grid3({{0.5, 0.5}, {0.5, 0.5}});
  const auto dist2 = exhaustive_distribution(uniform2);
  CHECK(dist2.at(U"") == doctest::Approx(0.25));
  CHECK(dist2.at(U"a") == doctest::Approx(0.75));
}

TEST_CASE("exhaustive_distribution conserves total probability") {
  std::mt19937_64 rng(9002);
  for (int trial = 0; trial < 100; ++trial) {
    const auto grid =
        random_grid(rng, 1 + uniform_index(rng, 6), 2 + uniform_index(rng, 3));
    double total = 0.0;
    for (const auto& [text, p] : exhaustive_distribution(grid)) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("exhaustive_decode refuses explosive grids") {
  std::mt19937_64 rng(9003);
  const auto grid = random_grid(rng, 9, 10);  // 10^9 paths
  CHECK_THROWS_WITH_AS(exhaustive_decode(grid, 1),
                       doctest::Contains("10^7"), ValidationError);
}

TEST_CASE("beam search equals hand-computed masses on a 3x3 grid") {
  // All 27 paths enumerated by hand; e.g. "ba" collects
  // (2,1,0)+(2,1,1)+(2,0,1)+(2,2,1)+(0,2,1) = 0.2185.
  const auto grid =
      grid3({{0.25, 0.40, 0.35}, {0.40, 0.35, 0.25}, {0.10, 0.50, 0.40}});
  BeamSearchParams params;
  params.beam_width = 16;  // exhaustive: 15 reachable prefixes at most
  params.top_k = 3;
  const auto results = beam_search_decode(grid, params);
  REQUIRE(results.size() == 3);
  CHECK(results[0].text == "ba");
  CHECK(std::exp(results[0].log_prob) == doctest::Approx(0.2185));
  CHECK(results[1].text == "ab");
  CHECK(std::exp(results[1].log_prob) == doctest::Approx(0.205));
  CHECK(results[2].text == "a");
  CHECK(std::exp(results[2].log_prob) == doctest::Approx(0.2025));

  const auto oracle = exhaustive_decode(grid, 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(results[i].text == oracle[i].text);
    CHECK(results[i].log_prob == doctest::Approx(oracle[i].log_prob));
  }
}

TEST_CASE("wide beam reproduces the exhaustive oracle on small grids") {
  std::mt19937_64 rng(9004);
  BeamSearchParams params;
  params.beam_width = 64;
  params.top_k = 1;
  for (int trial = 0; trial < 300; ++trial) {
    const auto grid =
        random_grid(rng, 1 + uniform_index(rng, 4), 2 + uniform_index(rng, 2));
    const auto beam = beam_search_decode(grid, params);
    const auto oracle = exhaustive_decode(grid, 1);
    REQUIRE(!beam.empty());
    CHECK(beam[0].text == oracle[0].text);
    CHECK(beam[0].log_prob == doctest::Approx(oracle[0].log_prob).epsilon(1e-9));
  }
}

TEST_CASE("top-1 score never degrades as the beam widens") {
  std::mt19937_64 rng(9005);
  for (int trial = 0; trial < 30; ++trial) {
    const auto grid = random_grid(rng, 12, 6);
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t width : {1, 2, 4, 8, 16, 32}) {
      BeamSearchParams params;
      params.beam_width = width;
      const auto results = beam_search_decode(grid, params);
      REQUIRE(!results.empty());
      CHECK(results[0].log_prob >= previous - 1e-12);
      previous = results[0].log_prob;
    }
  }
}

TEST_CASE("symmetric symbols tie and fill top_k") {
  // Uniform rows make 'a' and 'b' exchangeable.
  const auto grid = grid3({{1.0 / 3, 1.0 / 3, 1.0 / 3},
                           {1.0 / 3, 1.0 / 3, 1.0 / 3},
                           {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  BeamSearchParams params;
  params.beam_width = 16;
  params.top_k = 2;
  const auto results = beam_search_decode(grid, params);
  REQUIRE(results.size() == 2);
  CHECK(results[0].log_prob == doctest::Approx(results[1].log_prob));
  CHECK(results[0].text == "a");  // lexicographic tie-break
  CHECK(results[1].text == "b");
}

TEST_CASE("zero LM weight decodes exactly like no LM") {
  std::mt19937_64 rng(9006);
  const CharLM lm(3, 1.0, {U'a', U'b', U'c'});
  for (int trial = 0; trial < 20; ++trial) {
    const auto grid = random_grid(rng, 8, 4);
    BeamSearchParams plain;
    plain.beam_width = 8;
    plain.top_k = 4;
    BeamSearchParams zero = plain;
    zero.lm = char_lm_scorer(lm);
    zero.lm_weight = 0.0;
    CHECK(beam_search_decode(grid, plain) == beam_search_decode(grid, zero));
  }
}

TEST_CASE("a uniform LM rescales but keeps same-length order") {
  std::mt19937_64 rng(9007);
  const CharLM uniform_lm(4, 1.0, {U'a', U'b'});
  for (int trial = 0; trial < 30; ++trial) {
    const auto grid = random_grid(rng, 4, 3);
    BeamSearchParams plain;
    plain.beam_width = 64;
    plain.top_k = 64;
    BeamSearchParams fused = plain;
    fused.lm = char_lm_scorer(uniform_lm);
    fused.lm_weight = 0.7;
    const auto base = beam_search_decode(grid, plain);
    const auto rescored = beam_search_decode(grid, fused);
    REQUIRE(base.size() == rescored.size());
    // Compare the order of candidates within each length class.
    for (std::size_t len = 0; len <= 4; ++len) {
      std::vector<std::string> base_order;
      std::vector<std::string> rescored_order;
      for (const auto& r : base) {
        if (r.text.size() == len) base_order.push_back(r.text);
      }
      for (const auto& r : rescored) {
        if (r.text.size() == len) rescored_order.push_back(r.text);
      }
      CHECK(base_order == rescored_order);
    }
  }
}

TEST_CASE("beam parameters are validated") {
  const auto grid = grid3({{0.5, 0.5}});
  BeamSearchParams params;
  params.beam_width = 0;
  CHECK_THROWS_AS(beam_search_decode(grid, params), ValidationError);
  params.beam_width = 4;
  params.top_k = 0;
  CHECK_THROWS_AS(beam_search_decode(grid, params), ValidationError);
  params.top_k = 5;
  CHECK_THROWS_AS(beam_search_decode(grid, params), ValidationError);
}

TEST_CASE("one-hot grids decode back to their text") {
  const Alphabet a = test_alphabet(12);
  const auto grid = one_hot_grid("abba", a);
  CHECK(grid.rows() == 9);
  CHECK(greedy_decode(grid).text == "abba");
  CHECK(greedy_decode(grid).log_prob == 0.0);

  CHECK(one_hot_grid("", a).rows() == 1);
  CHECK(greedy_decode(one_hot_grid("", a)).text == "");

  CHECK_THROWS_AS(one_hot_grid("xyz!", a), ValidationError);
  CHECK_THROWS_AS(one_hot_grid("-", a), ValidationError);

  std::mt19937_64 rng(9008);
  for (int trial = 0; trial < 100; ++trial) {
    const std::string text =
        random_text(rng, 50, "abcdefghij");
    CHECK(greedy_decode(one_hot_grid(text, a)).text == text);
  }
}

TEST_CASE("decode scores are never positive") {
  std::mt19937_64 rng(9009);
  for (int trial = 0; trial < 50; ++trial) {
    const auto grid = random_grid(rng, 6, 4);
    CHECK(greedy_decode(grid).log_prob <= 0.0);
    BeamSearchParams params;
    params.beam_width = 8;
    params.top_k = 8;
    for (const auto& r : beam_search_decode(grid, params)) {
      CHECK(r.log_prob <= 0.0);
    }
  }
}
