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

#include "htrpost/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "htrpost/errors.hpp"

namespace htrpost {

namespace {

// Total order over detections: canonical input order for the scan, so the
// clustering result is independent of how the caller ordered the words.
bool detection_less(const Detection& a, const Detection& b) {
  return std::tie(a.box.y, a.box.x, a.box.w, a.box.h, a.score, a.label) <
         std::tie(b.box.y, b.box.x, b.box.w, b.box.h, b.score, b.label);
}

bool line_y_less(const LineProposal& a, const LineProposal& b) {
  return std::tie(a.box.y, a.box.x, a.box.w, a.box.h) <
         std::tie(b.box.y, b.box.x, b.box.w, b.box.h);
}

BBox enclosing_box_of(const std::vector<Detection>& members) {
  std::vector<BBox> boxes;
  boxes.reserve(members.size());
  for (const Detection& d : members) boxes.push_back(d.box);
  return enclosing_bbox(boxes);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double median_of(const std::vector<LineProposal>& lines,
                 double (*get)(const LineProposal&)) {
  std::vector<double> values;
  values.reserve(lines.size());
  for (const LineProposal& line : lines) values.push_back(get(line));
  return median(std::move(values));
}

}  // namespace

void HeuristicParams::validate() const {
  if (!(min_area >= 0.0)) throw ValidationError("min_area must be >= 0");
  if (!(short_line_ratio > 0.0))
    throw ValidationError("short_line_ratio must be > 0");
  if (!(tall_line_ratio > 0.0))
    throw ValidationError("tall_line_ratio must be > 0");
  if (!(start_deviation > 0.0))
    throw ValidationError("start_deviation must be > 0");
  if (!(overlap_removal >= 0.0 && overlap_removal <= 1.0))
    throw ValidationError("overlap_removal must be in [0,1]");
  if (!(y_overlap_threshold >= 0.0 && y_overlap_threshold <= 1.0))
    throw ValidationError("y_overlap_threshold must be in [0,1]");
  if (!(max_right_edge > 0.0))
    throw ValidationError("max_right_edge must be > 0");
}

std::vector<LineProposal> cluster_words_to_lines(
    std::span<const Detection> words, double y_overlap_threshold,
    ClusterSeeding seeding) {
  if (!(y_overlap_threshold >= 0.0 && y_overlap_threshold <= 1.0)) {
    throw ValidationError("y_overlap_threshold must be in [0,1], got " +
                          std::to_string(y_overlap_threshold));
  }
  if (words.empty()) return {};

  std::vector<Detection> sorted(words.begin(), words.end());
  std::sort(sorted.begin(), sorted.end(), detection_less);

  std::vector<LineProposal> lines;
  std::vector<Detection> cluster;
  if (seeding == ClusterSeeding::kSeeded) cluster.push_back(sorted.front());

  auto emit = [&]() {
    if (!cluster.empty()) {
      lines.push_back(LineProposal{enclosing_box_of(cluster), cluster});
    }
    cluster.clear();
  };

  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (y_overlap(sorted[i - 1].box, sorted[i].box) > y_overlap_threshold) {
      cluster.push_back(sorted[i]);
    } else {
      emit();
      // The boundary word seeds the next cluster; the unseeded variant
      // drops it, as well as never seeing the very first word.
      if (seeding == ClusterSeeding::kSeeded) cluster.push_back(sorted[i]);
    }
  }
  emit();
  return lines;
}

namespace line_rules {

std::vector<LineProposal> drop_small_areas(std::vector<LineProposal> lines,
                                           double min_area) {
  std::erase_if(lines,
                [&](const LineProposal& l) { return l.box.area() < min_area; });
  return lines;
}

std::vector<LineProposal> drop_out_of_page(std::vector<LineProposal> lines,
                                           double max_right_edge) {
  std::erase_if(lines, [&](const LineProposal& l) {
    return l.box.x < 0.0 || l.box.y < 0.0 || l.box.x2() > max_right_edge ||
           l.box.y2() > 1.0;
  });
  return lines;
}

// Lines substantially narrower than the median width are dropped, except
// the bottom-most line, which is commonly a short final line of text.
std::vector<LineProposal> drop_short_lines(std::vector<LineProposal> lines,
                                           double short_line_ratio) {
  if (lines.size() < 2) return lines;
  const double floor_w =
      short_line_ratio *
      median_of(lines, [](const LineProposal& l) { return l.box.w; });
  std::vector<LineProposal> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const bool last = (i + 1 == lines.size());
    if (last || lines[i].box.w >= floor_w) out.push_back(std::move(lines[i]));
  }
  return out;
}

// Lines much taller than the median height are usually two stacked lines
// merged by clustering; split them into two halves tiling the parent.
std::vector<LineProposal> split_tall_lines(std::vector<LineProposal> lines,
                                           double tall_line_ratio) {
  if (lines.empty()) return lines;
  const double ceiling_h =
      tall_line_ratio *
      median_of(lines, [](const LineProposal& l) { return l.box.h; });
  std::vector<LineProposal> out;
  out.reserve(lines.size());
  for (LineProposal& line : lines) {
    if (line.box.h <= ceiling_h) {
      out.push_back(std::move(line));
      continue;
    }
    const double half_h = line.box.h / 2.0;
    const double mid = line.box.y + half_h;
    LineProposal top{BBox(line.box.x, line.box.y, line.box.w, half_h), {}};
    LineProposal bottom{BBox(line.box.x, mid, line.box.w, half_h), {}};
    for (Detection& d : line.members) {
      (d.box.center_y() < mid ? top : bottom).members.push_back(std::move(d));
    }
    out.push_back(std::move(top));
    out.push_back(std::move(bottom));
  }
  std::sort(out.begin(), out.end(), line_y_less);
  return out;
}

std::vector<LineProposal> drop_deviating_starts(std::vector<LineProposal> lines,
                                                double start_deviation) {
  if (lines.empty()) return lines;
  const double median_x =
      median_of(lines, [](const LineProposal& l) { return l.box.x; });
  std::erase_if(lines, [&](const LineProposal& l) {
    return std::abs(l.box.x - median_x) > start_deviation;
  });
  return lines;
}

// Greedy by descending area: a line survives unless it greatly overlaps an
// already-kept (larger) line.
std::vector<LineProposal> drop_overlapping(std::vector<LineProposal> lines,
                                           double overlap_removal) {
  std::vector<std::size_t> order(lines.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return lines[i].box.area() > lines[j].box.area();
  });
  std::vector<bool> dropped(lines.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (dropped[order[i]]) continue;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (dropped[order[j]]) continue;
      if (iou(lines[order[i]].box, lines[order[j]].box) > overlap_removal) {
        dropped[order[j]] = true;
      }
    }
  }
  std::vector<LineProposal> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!dropped[i]) out.push_back(std::move(lines[i]));
  }
  return out;
}

}  // namespace line_rules

std::vector<LineProposal> filter_lines(std::vector<LineProposal> lines,
                                       const HeuristicParams& params) {
  params.validate();
  std::sort(lines.begin(), lines.end(), line_y_less);
  lines = line_rules::drop_small_areas(std::move(lines), params.min_area);
  lines = line_rules::drop_out_of_page(std::move(lines), params.max_right_edge);
  lines = line_rules::drop_short_lines(std::move(lines), params.short_line_ratio);
  lines = line_rules::split_tall_lines(std::move(lines), params.tall_line_ratio);
  lines = line_rules::drop_deviating_starts(std::move(lines), params.start_deviation);
  lines = line_rules::drop_overlapping(std::move(lines), params.overlap_removal);
  std::sort(lines.begin(), lines.end(), line_y_less);
  return lines;
}

std::vector<LineProposal> pipeline_words_to_lines(
    std::span<const Detection> words, const HeuristicParams& params) {
  params.validate();
  return filter_lines(cluster_words_to_lines(words, params.y_overlap_threshold),
                      params);
}



}  // namespace htrpost
