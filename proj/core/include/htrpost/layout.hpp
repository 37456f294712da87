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

#ifndef HTRPOST_LAYOUT_HPP_
#define HTRPOST_LAYOUT_HPP_

#include <span>
#include <vector>

#include "htrpost/geometry.hpp"

namespace htrpost {

// A candidate text line: the line box plus the word detections that formed
// it. As produced by clustering, box is the enclosing box of the members;
// filtering may later replace the box (line splitting) while keeping the
// member list as provenance.
struct LineProposal {
  BBox box;
  std::vector<Detection> members;

  bool operator==(const LineProposal&) const = default;
};

// Knobs for line filtering and clustering. The clustering threshold of 0.4
// is the operating default; the filter thresholds are configurable
// stand-ins for qualitative rules ("substantially shorter", "much longer").
struct HeuristicParams {
  double min_area = 0.0005;         // rule 1: minimum line area
  double max_right_edge = 1.0;      // rule 2: x + w past this is out of page
  double short_line_ratio = 0.5;    // rule 3: width floor as fraction of median
  double tall_line_ratio = 1.5;     // rule 4: height ceiling as multiple of median
  double start_deviation = 0.2;     // rule 5: allowed |x - median start|
  double overlap_removal = 0.4;     // rule 6: IoU above this drops the smaller
  double y_overlap_threshold = 0.4; // clustering threshold

  void validate() const;
};

// How a new cluster begins when the scan crosses a line boundary.
//
// kSeeded starts the new cluster with the boundary word itself, so every
// word lands in exactly one line. kUnseeded reproduces a historical variant
// that drops the boundary word (each cluster misses its first word and
// one-word lines vanish); it exists for side-by-side study only.
enum class ClusterSeeding { kSeeded, kUnseeded };

// Sorts words by (y, x, ...) and scans them in order: a word joins the
// current cluster when its y_overlap with the previous word exceeds the
// threshold, otherwise the current cluster is emitted and a new one begins.
// Each output box is the enclosing box of its members, and the output is in
// y order. Empty input gives empty output.
std::vector<LineProposal> cluster_words_to_lines(
    std::span<const Detection> words, double y_overlap_threshold,
    ClusterSeeding seeding = ClusterSeeding::kSeeded);

// Applies the line heuristics in a fixed order:
//   1. drop lines with area < min_area
//   2. drop lines exceeding the page boundaries
//   3. drop lines (except the bottom-most) with width < short_line_ratio x
//      median width
//   4. split lines with height > tall_line_ratio x median height into two
//      stacked halves tiling the parent exactly; members go to the half
//      containing their center
//   5. drop lines whose start x deviates from the median start by more than
//      start_deviation
//   6. for pairs with IoU > overlap_removal, drop the smaller-area line
// Medians are recomputed on each rule's input; even counts use the mean of
// the middle two. Result is sorted by y.
std::vector<LineProposal> filter_lines(std::vector<LineProposal> lines,
                                       const HeuristicParams& params);

// cluster_words_to_lines followed by filter_lines.
std::vector<LineProposal> pipeline_words_to_lines(
    std::span<const Detection> words, const HeuristicParams& params);

// The individual filter rules, in the order filter_lines applies them.
// Exposed so each heuristic can be studied and tuned on its own.
namespace line_rules {

std::vector<LineProposal> drop_small_areas(std::vector<LineProposal> lines,
                                           double min_area);
std::vector<LineProposal> drop_out_of_page(std::vector<LineProposal> lines,
                                           double max_right_edge);
// Expects lines sorted by y; the bottom-most line is exempt.
std::vector<LineProposal> drop_short_lines(std::vector<LineProposal> lines,
                                           double short_line_ratio);
std::vector<LineProposal> split_tall_lines(std::vector<LineProposal> lines,
                                           double tall_line_ratio);
std::vector<LineProposal> drop_deviating_starts(std::vector<LineProposal> lines,
                                                double start_deviation);
std::vector<LineProposal> drop_overlapping(std::vector<LineProposal> lines,
                                           double overlap_removal);

}  // namespace line_rules

}  // namespace htrpost

#endif  // HTRPOST_LAYOUT_HPP_
