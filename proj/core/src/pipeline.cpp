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

#include "htrpost/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <utility>

#include "htrpost/ctc.hpp"
#include "htrpost/errors.hpp"
#include "htrpost/io.hpp"
#include "htrpost/language.hpp"

namespace htrpost {

namespace {

void require_file(const std::string& path, const char* what) {
  if (path.empty()) {
    throw ValidationError(std::string("pipeline: ") + what + " path not set");
  }
  if (!std::filesystem::is_regular_file(path)) {
    throw ValidationError(std::string("pipeline: ") + what +
                          " does not exist: " + path);
  }
}

template <typename Fn>
auto stage(const char* name, const std::string& input, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + " [" + input + "]: " + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string(name) + " [" + input + "]: " + e.what());
  }
}

std::string join_page(std::span<const std::string> lines) {
  std::string page;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) page.push_back('\n');
    page += lines[i];
  }
  return page;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  require_file(config.detections_path, "detections");
  if (config.grids_dir.empty() ||
      !std::filesystem::is_directory(config.grids_dir)) {
    throw ValidationError("pipeline: grids dir does not exist: " +
                          config.grids_dir);
  }
  if (!config.refs_path.empty()) require_file(config.refs_path, "refs");
  if (config.rank) {
    require_file(config.lexicon_path, "lexicon");
    require_file(config.lm_path, "language model");
    if (config.mode != DecodeMode::kBeam || config.top_k < 2) {
      throw ValidationError(
          "pipeline: ranking needs beam decoding with top_k >= 2");
    }
  }
  if (!config.lm_path.empty()) require_file(config.lm_path, "language model");
  config.params.validate();

  const std::vector<Detection> words =
      stage("detections stage", config.detections_path,
            [&] { return read_detections_file(config.detections_path); });

  PipelineResult result;
  result.lines = config.apply_filter
                     ? pipeline_words_to_lines(words, config.params)
                     : cluster_words_to_lines(words,
                                              config.params.y_overlap_threshold);

  std::optional<CharLM> lm;
  if (!config.lm_path.empty()) {
    lm = stage("language model stage", config.lm_path,
               [&] { return CharLM::load_file(config.lm_path); });
  }
  std::optional<Lexicon> lexicon;
  if (config.rank) {
    lexicon = stage("lexicon stage", config.lexicon_path,
                    [&] { return read_lexicon_file(config.lexicon_path); });
  }

  const std::vector<std::string> grid_files =
      list_files_sorted(config.grids_dir, ".csv");

  result.transcript.reserve(result.lines.size());
  for (std::size_t i = 0; i < result.lines.size(); ++i) {
    if (i >= grid_files.size()) {
      result.transcript.emplace_back();
      continue;
    }
    const std::string& grid_path = grid_files[i];
    result.transcript.push_back(stage("decode stage", grid_path, [&] {
      const EmissionGrid grid = read_grid_file(grid_path);
      if (config.mode == DecodeMode::kGreedy) {
        return greedy_decode(grid).text;
      }
      BeamSearchParams params;
      params.beam_width = config.beam_width;
      params.top_k = config.top_k;
      if (lm && config.lm_weight > 0.0) {
        params.lm = char_lm_scorer(*lm);
        params.lm_weight = config.lm_weight;
      }
      const std::vector<DecodeResult> results = beam_search_decode(grid, params);
      if (results.empty()) return std::string();
      if (!config.rank) return results.front().text;
      // Re-rank the beam candidates against the raw best-path reading.
      std::vector<Candidate> candidates;
      candidates.reserve(results.size());
      for (const DecodeResult& r : results) {
        candidates.push_back(Candidate{r.text, r.log_prob});
      }
      const std::string source = greedy_decode(grid).text;
      return rank_candidates(candidates, source, *lexicon, *lm).front().text;
    }));
  }

  if (!config.transcript_path.empty()) {
    write_text_lines(config.transcript_path, result.transcript);
  }

  if (!config.refs_path.empty()) {
    const std::vector<std::string> refs = read_text_lines(config.refs_path);
    result.alignment = align(join_page(refs), join_page(result.transcript));
  }
  return result;
}

}  // namespace htrpost
