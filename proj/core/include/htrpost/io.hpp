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
//
// File formats shared across pipeline stages:
//
//   detections  JSON-lines, one object per detection:
//               {"x":..,"y":..,"w":..,"h":..,"score":..,"label":".."}
//   lines       JSON-lines, one object per line proposal:
//               {"x":..,"y":..,"w":..,"h":..,"member_count":N}
//   grid        text; header "alphabet,blank_index,N,M" where the alphabet
//               field escapes backslash, comma, tab, CR and LF as \\ \, \t
//               \r \n; then N CSV rows of M probabilities
//   candidates  JSON-lines: {"text":"..","source_score":..}
//   lexicon     plain text, one word per line
//   confusion   JSON object: {"d":["c","l"], ...}

#ifndef HTRPOST_IO_HPP_
#define HTRPOST_IO_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "htrpost/ctc.hpp"
#include "htrpost/geometry.hpp"
#include "htrpost/language.hpp"
#include "htrpost/layout.hpp"
#include "htrpost/noise.hpp"

namespace htrpost {

std::vector<Detection> read_detections_jsonl(std::istream& in);
std::vector<Detection> read_detections_file(const std::string& path);
void write_detections_jsonl(std::ostream& out,
                            std::span<const Detection> detections);

void write_lines_jsonl(std::ostream& out, std::span<const LineProposal> lines);
void write_lines_file(const std::string& path,
                      std::span<const LineProposal> lines);
// A lines file carries no word provenance, so each proposal is loaded with
// member_count placeholder members covering the line box.
std::vector<LineProposal> read_lines_jsonl(std::istream& in);
std::vector<LineProposal> read_lines_file(const std::string& path);

void write_grid(std::ostream& out, const EmissionGrid& grid);
void write_grid_file(const std::string& path, const EmissionGrid& grid);
EmissionGrid read_grid(std::istream& in);
EmissionGrid read_grid_file(const std::string& path);

std::vector<Candidate> read_candidates_jsonl(std::istream& in);
std::vector<Candidate> read_candidates_file(const std::string& path);
void write_candidates_jsonl(std::ostream& out,
                            std::span<const Candidate> candidates);

Lexicon read_lexicon_file(const std::string& path);

ConfusionMap read_confusion_json(std::istream& in);
ConfusionMap read_confusion_file(const std::string& path);

// Heuristic parameters as a JSON object; absent keys keep their defaults,
// unknown keys are rejected.
HeuristicParams read_heuristic_params(std::istream& in);
HeuristicParams read_heuristic_params_file(const std::string& path);

std::vector<std::string> read_text_lines(const std::string& path);
void write_text_lines(const std::string& path,
                      std::span<const std::string> lines);

// Regular files in dir with the given extension, sorted by filename.
std::vector<std::string> list_files_sorted(const std::string& dir,
                                           const std::string& extension);

}  // namespace htrpost

#endif  // HTRPOST_IO_HPP_
