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

#include <algorithm>
#include <random>

#include "htrpost/errors.hpp"
#include "htrpost/layout.hpp"
#include "support.hpp"

using namespace htrpost;
using htrpost::testing::make_band_page;
using htrpost::testing::uniform;
using htrpost::testing::uniform_index;

namespace {

Detection word(double x, double y, double w, double h) {
  return Detection(BBox(x, y, w, h), 0.9, "handwriting");
}

LineProposal line_of(const BBox& box) {
  return LineProposal{box, {Detection(box, 1.0, "member")}};
}

// Typical clustered pages for the per-rule idempotence checks: aligned
// lines with occasional outliers of the kind each rule exists to catch.
std::vector<LineProposal> realistic_lines(std::mt19937_64& rng) {
  std::vector<LineProposal> lines;
  const std::size_t n = 3 + uniform_index(rng, 8);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = 0.05 + 0.1 * static_cast<double>(i);
    lines.push_back(line_of(BBox(uniform(rng, 0.08, 0.12), y,
                                 uniform(rng, 0.5, 0.8),
                                 uniform(rng, 0.04, 0.06))));
  }
  if (uniform_index(rng, 2) == 0) {
    lines.push_back(line_of(BBox(0.4, 0.97, 0.01, 0.01)));  // speck
  }
  if (uniform_index(rng, 2) == 0) {
    lines.push_back(line_of(BBox(0.8, 0.5, 0.4, 0.05)));  // runs off the page
  }
  if (uniform_index(rng, 2) == 0) {
    lines.push_back(line_of(BBox(0.7, 0.75, 0.55, 0.05)));  // far-right start
  }
  return lines;
}

}  // namespace

TEST_CASE("clustering handles empty input and a single word") {
  CHECK(cluster_words_to_lines(std::vector<Detection>{}, 0.4).empty());

  const Detection w = word(0.1, 0.2, 0.05, 0.04);
  const auto lines = cluster_words_to_lines(std::vector<Detection>{w}, 0.4);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].box == w.box);
  REQUIRE(lines[0].members.size() == 1);
  CHECK(lines[0].members[0] == w);
}

TEST_CASE("clustering splits two vertical bands into two lines") {
  const std::vector<Detection> words{
      word(0.10, 0.10, 0.05, 0.05), word(0.20, 0.11, 0.05, 0.05),
      word(0.30, 0.10, 0.05, 0.05), word(0.10, 0.30, 0.05, 0.05),
      word(0.20, 0.31, 0.05, 0.05), word(0.30, 0.30, 0.05, 0.05)};
  const auto lines = cluster_words_to_lines(words, 0.4);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].members.size() == 3);
  CHECK(lines[1].members.size() == 3);
  CHECK(lines[0].box.y < lines[1].box.y);
  // Each line box encloses exactly its members.
  for (const auto& line : lines) {
    std::vector<BBox> boxes;
    for (const auto& m : line.members) boxes.push_back(m.box);
    CHECK(line.box == enclosing_bbox(boxes));
  }
}

TEST_CASE("clustering rejects a bad threshold") {
  CHECK_THROWS_AS(cluster_words_to_lines(std::vector<Detection>{}, 1.2),
                  ValidationError);
}

TEST_CASE("clustering partitions all words and ignores input order") {
  std::mt19937_64 rng(8101);
  for (int trial = 0; trial < 100; ++trial) {
    auto page = make_band_page(rng, 1 + uniform_index(rng, 10));
    const auto baseline = cluster_words_to_lines(page.words, 0.4);
    CHECK(baseline.size() == page.bands);
    std::size_t total = 0;
    for (const auto& line : baseline) total += line.members.size();
    CHECK(total == page.words.size());
    for (const auto& w : page.words) {
      std::size_t owners = 0;
      for (const auto& line : baseline) {
        owners += std::count(line.members.begin(), line.members.end(), w);
      }
      CHECK(owners == 1);
    }
    std::shuffle(page.words.begin(), page.words.end(), rng);
    CHECK(cluster_words_to_lines(page.words, 0.4) == baseline);
  }
}

TEST_CASE("unseeded clustering drops boundary words") {
  // Three words in a top band, one isolated word, two in a bottom band.
  const std::vector<Detection> words{
      word(0.10, 0.10, 0.05, 0.05), word(0.20, 0.10, 0.05, 0.05),
      word(0.30, 0.10, 0.05, 0.05), word(0.10, 0.40, 0.05, 0.05),
      word(0.10, 0.70, 0.05, 0.05), word(0.20, 0.70, 0.05, 0.05)};

  const auto seeded = cluster_words_to_lines(words, 0.4, ClusterSeeding::kSeeded);
  REQUIRE(seeded.size() == 3);
  CHECK(seeded[0].members.size() == 3);
  CHECK(seeded[1].members.size() == 1);
  CHECK(seeded[2].members.size() == 2);

  // The unseeded variant loses each cluster's first word: the top band
  // keeps two words, the isolated word disappears, the bottom keeps one.
  const auto unseeded =
      cluster_words_to_lines(words, 0.4, ClusterSeeding::kUnseeded);
  REQUIRE(unseeded.size() == 2);
  CHECK(unseeded[0].members.size() == 2);
  CHECK(unseeded[0].members[0] == words[1]);
  CHECK(unseeded[1].members.size() == 1);
  CHECK(unseeded[1].members[0] == words[5]);
}

TEST_CASE("filter keeps a clean page untouched") {
  std::vector<LineProposal> lines;
  for (int i = 0; i < 5; ++i) {
    lines.push_back(line_of(BBox(0.1, 0.05 + 0.1 * i, 0.7, 0.05)));
  }
  CHECK(filter_lines(lines, HeuristicParams{}) == lines);
}

TEST_CASE("filter drops specks, out-of-page lines, and far starts") {
  HeuristicParams params;
  std::vector<LineProposal> lines;
  for (int i = 0; i < 4; ++i) {
    lines.push_back(line_of(BBox(0.1, 0.05 + 0.1 * i, 0.7, 0.05)));
  }
  const auto clean = lines;

  SUBCASE("minimum area") {
    lines.push_back(line_of(BBox(0.5, 0.5, 0.02, 0.02)));
    CHECK(filter_lines(lines, params) == clean);
  }
  SUBCASE("past the right edge") {
    lines.push_back(line_of(BBox(0.5, 0.5, 0.7, 0.05)));
    CHECK(filter_lines(lines, params) == clean);
  }
  SUBCASE("past the top") {
    lines.push_back(line_of(BBox(0.1, -0.02, 0.7, 0.05)));
    CHECK(filter_lines(lines, params) == clean);
  }
  SUBCASE("deviating start") {
    lines.push_back(line_of(BBox(0.55, 0.5, 0.7, 0.05)));
    CHECK(filter_lines(lines, params) == clean);
  }
}

TEST_CASE("short lines are dropped except the bottom-most") {
  HeuristicParams params;
  std::vector<LineProposal> lines{
      line_of(BBox(0.1, 0.1, 0.8, 0.05)), line_of(BBox(0.1, 0.2, 0.1, 0.05)),
      line_of(BBox(0.1, 0.3, 0.8, 0.05)), line_of(BBox(0.1, 0.4, 0.8, 0.05)),
      line_of(BBox(0.1, 0.5, 0.1, 0.05))};
  const auto kept = filter_lines(lines, params);
  REQUIRE(kept.size() == 4);
  // The short line at y=0.2 died; the short final line survived.
  CHECK(kept[1].box.y == 0.3);
  CHECK(kept[3].box == BBox(0.1, 0.5, 0.1, 0.05));
}

TEST_CASE("a double-height line splits into two halves tiling it") {
  HeuristicParams params;
  std::vector<LineProposal> lines;
  for (int i = 0; i < 5; ++i) {
    lines.push_back(line_of(BBox(0.1, 0.05 + 0.12 * i, 0.7, 0.05)));
  }
  LineProposal tall{BBox(0.1, 0.65, 0.7, 0.1),
                    {word(0.1, 0.66, 0.2, 0.03), word(0.4, 0.67, 0.2, 0.03),
                     word(0.1, 0.71, 0.2, 0.03), word(0.4, 0.72, 0.2, 0.03)}};
  lines.push_back(tall);

  const auto out = filter_lines(lines, params);
  CHECK(out.size() == 7);
  const LineProposal& top = out[5];
  const LineProposal& bottom = out[6];
  CHECK(top.box == BBox(0.1, 0.65, 0.7, 0.05));
  CHECK(bottom.box == BBox(0.1, 0.70, 0.7, 0.05));
  // Members are shared by the y midpoint; none are lost or invented.
  REQUIRE(top.members.size() == 2);
  REQUIRE(bottom.members.size() == 2);
  CHECK(top.members[0] == tall.members[0]);
  CHECK(bottom.members[0] == tall.members[2]);
}

TEST_CASE("greatly overlapping lines lose the smaller") {
  HeuristicParams params;
  std::vector<LineProposal> lines;
  for (int i = 0; i < 3; ++i) {
    lines.push_back(line_of(BBox(0.1, 0.05 + 0.1 * i, 0.7, 0.05)));
  }
  // Near-duplicate of the second line, slightly narrower.
  lines.push_back(line_of(BBox(0.12, 0.155, 0.6, 0.05)));
  const auto out = filter_lines(lines, params);
  REQUIRE(out.size() == 3);
  CHECK(out[1].box == BBox(0.1, 0.15, 0.7, 0.05));
}

TEST_CASE("filter rules 1, 2, 3, 5, 6 are idempotent on realistic pages") {
  std::mt19937_64 rng(8102);
  const HeuristicParams p;
  using Rule = std::vector<LineProposal> (*)(std::vector<LineProposal>, double);
  const std::pair<Rule, double> rules[] = {
      {line_rules::drop_small_areas, p.min_area},
      {line_rules::drop_out_of_page, p.max_right_edge},
      {line_rules::drop_short_lines, p.short_line_ratio},
      {line_rules::drop_deviating_starts, p.start_deviation},
      {line_rules::drop_overlapping, p.overlap_removal}};
  for (int trial = 0; trial < 200; ++trial) {
    const auto lines = realistic_lines(rng);
    for (const auto& [rule, arg] : rules) {
      const auto once = rule(lines, arg);
      CHECK(rule(once, arg) == once);
    }
  }
}

TEST_CASE("split halves tile the parent exactly") {
  std::mt19937_64 rng(8103);
  for (int trial = 0; trial < 100; ++trial) {
    auto lines = realistic_lines(rng);
    lines.push_back(line_of(BBox(0.1, 0.86, 0.7,
                                 uniform(rng, 0.12, 0.2))));  // double line
    const auto out = line_rules::split_tall_lines(lines, 1.5);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        const BBox& a = out[i].box;
        const BBox& b = out[j].box;
        if (a.x == b.x && a.w == b.w && a.h == b.h &&
            b.y == doctest::Approx(a.y + a.h)) {
          const BBox merged(a.x, a.y, a.w, a.h + b.h);
          // Reassembled halves give back a line of the input.
          CHECK(std::any_of(lines.begin(), lines.end(), [&](const auto& l) {
            return l.box == merged;
          }));
        }
      }
    }
  }
}

TEST_CASE("filter never invents members") {
  std::mt19937_64 rng(8104);
  for (int trial = 0; trial < 100; ++trial) {
    const auto page = make_band_page(rng, 1 + uniform_index(rng, 6));
    const auto lines = cluster_words_to_lines(page.words, 0.4);
    const auto filtered = filter_lines(lines, HeuristicParams{});
    for (const auto& out : filtered) {
      for (const auto& m : out.members) {
        CHECK(std::count(page.words.begin(), page.words.end(), m) == 1);
      }
    }
  }
}

TEST_CASE("pipeline composes clustering and filtering") {
  CHECK(pipeline_words_to_lines(std::vector<Detection>{}, HeuristicParams{})
            .empty());

  std::mt19937_64 rng(8105);
  const auto page = make_band_page(rng, 2);
  const auto lines = pipeline_words_to_lines(page.words, HeuristicParams{});
  CHECK(lines.size() == 2);

  // A lone speck between the bands clusters alone and dies to rule 1.
  auto with_speck = page.words;
  with_speck.push_back(word(0.5, 0.115, 0.012, 0.012));
  CHECK(pipeline_words_to_lines(with_speck, HeuristicParams{}) == lines);
}
