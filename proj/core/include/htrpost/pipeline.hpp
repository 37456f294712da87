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

#ifndef HTRPOST_PIPELINE_HPP_
#define HTRPOST_PIPELINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "htrpost/eval.hpp"
#include "htrpost/layout.hpp"
#include "htrpost/noise.hpp"

namespace htrpost {

enum class DecodeMode { kGreedy, kBeam };

// End-to-end run over files: word detections in, transcript out.
//
// Emission grids stand in for the per-line recogniser: grid files in
// grids_dir (*.csv, sorted by filename) pair with the final line proposals
// in y order, index by index. A line beyond the last grid transcribes as
// an empty string; surplus grids are ignored.
struct PipelineConfig {
  std::string detections_path;           // required: words JSONL
  std::string grids_dir;                 // required: per-line grids
  std::string refs_path;                 // optional: reference lines
  std::string transcript_path;           // optional: transcript output
  HeuristicParams params;
  bool apply_filter = true;              // false = cluster only
  DecodeMode mode = DecodeMode::kGreedy;
  std::size_t beam_width = 32;
  std::size_t top_k = 1;
  bool rank = false;                     // re-rank beam candidates
  std::string lexicon_path;              // required when rank is on
  std::string lm_path;                   // fusion and/or ranking model
  double lm_weight = 0.0;
  Seed seed = 0;  // reserved: every randomized stage draws from this seed
};

struct PipelineResult {
  std::vector<LineProposal> lines;
  std::vector<std::string> transcript;        // one string per line, y order
  std::optional<AlignmentReport> alignment;   // set when refs are supplied
};

// words -> lines -> per-line decode -> optional re-ranking -> transcript,
// plus CER against the references when given. Pages are compared as lines
// concatenated in y order with newline separators, so dropped or invented
// lines surface as deletions or insertions. Identical config and seed give
// byte-identical outputs. Stage failures are rethrown with the stage name
// and the input that caused them.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace htrpost

#endif  // HTRPOST_PIPELINE_HPP_
