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

#ifndef HTRPOST_GEOMETRY_HPP_
#define HTRPOST_GEOMETRY_HPP_

#include <span>
#include <string>
#include <vector>

namespace htrpost {

// Axis-aligned rectangle in page-normalized coordinates: x and w are
// fractions of the page width, y and h fractions of the page height.
// Width and height must be strictly positive and all fields finite.
// Negative x or y is allowed: detectors may place boxes that spill past
// the page edges, and boundary enforcement is a layout heuristic, not a
// construction rule.
struct BBox {
  double x;
  double y;
  double w;
  double h;

  BBox(double x, double y, double w, double h);

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double area() const { return w * h; }
  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }

  bool operator==(const BBox&) const = default;
};

// A detector output: box plus class confidence in [0,1] and a class label.
struct Detection {
  BBox box;
  double score;
  std::string label;

  Detection(BBox box, double score, std::string label);

  bool operator==(const Detection&) const = default;
};

// Anchor grid description. Ratios are width:height and must be >= 1, so
// every generated prior is a square or a wide rectangle.
struct AnchorSpec {
  std::size_t grid_rows = 1;
  std::size_t grid_cols = 1;
  std::vector<double> sizes;   // scale fractions in (0,1]
  std::vector<double> ratios;  // each >= 1
};

// Intersection area over union area; 0 for disjoint boxes, 1 for identical.
double iou(const BBox& a, const BBox& b);

// Vertical interval overlap divided by the smaller of the two heights, so a
// short word fully inside a tall line scores 1.0. Returns 0 when the
// y-ranges are disjoint.
double y_overlap(const BBox& a, const BBox& b);

// Smallest box containing every input. Throws ValidationError on an empty
// span.
BBox enclosing_bbox(std::span<const BBox> boxes);

// Greedy non-maximum suppression in descending score order. Detections with
// equal scores keep their input order. Every surviving pair has
// iou <= iou_threshold, and the globally highest-scoring detection always
// survives. Output is in descending score order.
std::vector<Detection> nms(std::span<const Detection> detections,
                           double iou_threshold);

// Emits grid_rows x grid_cols x |sizes| x |ratios| boxes, row-major over
// grid cells with centers on a uniform grid, then sizes, then ratios.
// Parameterization is area-preserving: w = size * sqrt(ratio),
// h = size / sqrt(ratio). Boxes are clipped to the unit page; when the
// horizontal cut would leave a box taller than wide, the height is reduced
// about its center so the word-shape guarantee w >= h holds for every
// emitted box.
std::vector<BBox> generate_anchors(const AnchorSpec& spec);

}  // namespace htrpost

#endif  // HTRPOST_GEOMETRY_HPP_
