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

#include "htrpost/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "htrpost/errors.hpp"

namespace htrpost {

BBox::BBox(double x, double y, double w, double h) : x(x), y(y), w(w), h(h) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    throw ValidationError("BBox fields must be finite");
  }
  if (w <= 0.0 || h <= 0.0) {
    throw ValidationError("BBox width and height must be > 0, got w=" +
                          std::to_string(w) + " h=" + std::to_string(h));
  }
}

Detection::Detection(BBox box, double score, std::string label)
    : box(box), score(score), label(std::move(label)) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ValidationError("Detection score must be in [0,1], got " +
                          std::to_string(score));
  }
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x2(), b.x2()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y2(), b.y2()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

double y_overlap(const BBox& a, const BBox& b) {
  const double inter = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
  if (inter <= 0.0) return 0.0;
  return inter / std::min(a.h, b.h);
}

BBox enclosing_bbox(std::span<const BBox> boxes) {
  if (boxes.empty()) {
    throw ValidationError("enclosing_bbox: no boxes to enclose");
  }
  double x1 = boxes[0].x, y1 = boxes[0].y;
  double x2 = boxes[0].x2(), y2 = boxes[0].y2();
  for (const BBox& b : boxes.subspan(1)) {
    x1 = std::min(x1, b.x);
    y1 = std::min(y1, b.y);
    x2 = std::max(x2, b.x2());
    y2 = std::max(y2, b.y2());
  }
  return BBox(x1, y1, x2 - x1, y2 - y1);
}

std::vector<Detection> nms(std::span<const Detection> detections,
                           double iou_threshold) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("nms: iou_threshold must be in [0,1], got " +
                          std::to_string(iou_threshold));
  }
  // Stable sort keeps input order on equal scores, making the result
  // deterministic under permutation of distinct inputs.
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return detections[i].score > detections[j].score;
  });

  std::vector<Detection> kept;
  std::vector<bool> suppressed(detections.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (suppressed[i]) continue;
    const Detection& winner = detections[order[i]];
    kept.push_back(winner);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (suppressed[j]) continue;
      if (iou(winner.box, detections[order[j]].box) > iou_threshold) {
        suppressed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<BBox> generate_anchors(const AnchorSpec& spec) {
  if (spec.grid_rows == 0 || spec.grid_cols == 0) {
    throw ValidationError("generate_anchors: grid dimensions must be positive");
  }
  if (spec.sizes.empty() || spec.ratios.empty()) {
    throw ValidationError("generate_anchors: sizes and ratios must be non-empty");
  }
  for (double s : spec.sizes) {
    if (!(s > 0.0 && s <= 1.0)) {
      throw ValidationError("generate_anchors: sizes must lie in (0,1], got " +
                            std::to_string(s));
    }
  }
  for (double r : spec.ratios) {
    if (!(r >= 1.0)) {
      throw ValidationError(
          "generate_anchors: ratios must be >= 1 (squares or wide "
          "rectangles), got " +
          std::to_string(r));
    }
  }

  std::vector<BBox> anchors;
  anchors.reserve(spec.grid_rows * spec.grid_cols * spec.sizes.size() *
                  spec.ratios.size());
  for (std::size_t row = 0; row < spec.grid_rows; ++row) {
    const double cy = (row + 0.5) / static_cast<double>(spec.grid_rows);
    for (std::size_t col = 0; col < spec.grid_cols; ++col) {
      const double cx = (col + 0.5) / static_cast<double>(spec.grid_cols);
      for (double size : spec.sizes) {
        for (double ratio : spec.ratios) {
          const double w = size * std::sqrt(ratio);
          const double h = size / std::sqrt(ratio);
          double x1 = std::max(0.0, cx - w / 2.0);
          double y1 = std::max(0.0, cy - h / 2.0);
          double x2 = std::min(1.0, cx + w / 2.0);
          double y2 = std::min(1.0, cy + h / 2.0);
          if (y2 - y1 > x2 - x1) {
            // Horizontal clipping cut below the height; shrink the height
            // about its center so the box stays word-shaped.
            const double mid = (y1 + y2) / 2.0;
            const double half = (x2 - x1) / 2.0;
            y1 = mid - half;
            y2 = mid + half;
          }
          anchors.emplace_back(x1, y1, x2 - x1, y2 - y1);
        }
      }
    }
  }
  return anchors;
}

}  // namespace htrpost
