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

#ifndef HTRPOST_EVAL_HPP_
#define HTRPOST_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace htrpost {

enum class EditOp { kMatch, kSubstitute, kInsert, kDelete };

// One step of an optimal ref/hyp character alignment.
struct AlignedOp {
  EditOp op;
  std::optional<char32_t> ref_char;
  std::optional<char32_t> hyp_char;
};

// Counts and operation trace of an optimal unit-cost edit alignment.
// substitutions + insertions + deletions always equals the Levenshtein
// distance between ref and hyp.
struct AlignmentReport {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;  // hyp characters with no ref counterpart
  std::size_t deletions = 0;   // ref characters missing from hyp
  std::size_t ref_length = 0;
  std::vector<AlignedOp> aligned_ops;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  double cer() const {
    return static_cast<double>(errors()) / static_cast<double>(ref_length);
  }
};

// Optimal edit alignment with unit costs; ties prefer substitution over
// insertion over deletion, making the trace deterministic.
AlignmentReport align(const std::string& ref, const std::string& hyp);

enum class CerMode {
  kMacro,  // mean over lines of per-line CER
  kMicro   // pooled error counts over pooled reference length
};

// Average CER over (ref, hyp) pairs, line by line. Throws ValidationError
// on an empty list or an empty reference line (naming the line).
double corpus_cer(std::span<const std::pair<std::string, std::string>> pairs,
                  CerMode mode = CerMode::kMacro);

struct BenchmarkReport {
  std::string name;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;  // sample standard deviation
  std::size_t iterations = 0;
  std::optional<std::uint64_t> peak_bytes;  // process peak RSS, when exposed
};

// Wall-clock timing of a repeatable task: warmup discarded iterations, then
// mean and sample std over the measured ones. Runs on the calling thread;
// keep the machine quiet while measuring. A throwing task is propagated
// with its iteration index.
BenchmarkReport run_benchmark(const std::string& name,
                              const std::function<void()>& task,
                              std::size_t iterations, std::size_t warmup);

}  // namespace htrpost

#endif  // HTRPOST_EVAL_HPP_
