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

#include "htrpost/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <sys/resource.h>

#include "htrpost/errors.hpp"
#include "htrpost/utf8.hpp"

namespace htrpost {

AlignmentReport align(const std::string& ref, const std::string& hyp) {
  const std::u32string r = utf8_decode(ref);
  const std::u32string h = utf8_decode(hyp);
  const std::size_t nr = r.size();
  const std::size_t nh = h.size();

  // dist[i][j]: edit distance between ref[0..i) and hyp[0..j). choice holds
  // the backtrace move; on equal cost the preference is substitution (or
  // match), then insertion, then deletion.
  std::vector<std::size_t> dist((nr + 1) * (nh + 1));
  std::vector<std::uint8_t> choice((nr + 1) * (nh + 1));
  auto at = [&](std::size_t i, std::size_t j) { return i * (nh + 1) + j; };
  enum : std::uint8_t { kDiag, kIns, kDel };

  for (std::size_t j = 0; j <= nh; ++j) {
    dist[at(0, j)] = j;
    choice[at(0, j)] = kIns;
  }
  for (std::size_t i = 0; i <= nr; ++i) {
    dist[at(i, 0)] = i;
    choice[at(i, 0)] = kDel;
  }
  for (std::size_t i = 1; i <= nr; ++i) {
    for (std::size_t j = 1; j <= nh; ++j) {
      const std::size_t diag =
          dist[at(i - 1, j - 1)] + (r[i - 1] == h[j - 1] ? 0 : 1);
      const std::size_t ins = dist[at(i, j - 1)] + 1;
      const std::size_t del = dist[at(i - 1, j)] + 1;
      std::size_t best = diag;
      std::uint8_t move = kDiag;
      if (ins < best) {
        best = ins;
        move = kIns;
      }
      if (del < best) {
        best = del;
        move = kDel;
      }
      dist[at(i, j)] = best;
      choice[at(i, j)] = move;
    }
  }

  AlignmentReport report;
  report.ref_length = nr;
  std::size_t i = nr;
  std::size_t j = nh;
  while (i > 0 || j > 0) {
    switch (choice[at(i, j)]) {
      case kDiag: {
        const bool match = r[i - 1] == h[j - 1];
        report.aligned_ops.push_back(AlignedOp{
            match ? EditOp::kMatch : EditOp::kSubstitute, r[i - 1], h[j - 1]});
        if (!match) ++report.substitutions;
        --i;
        --j;
        break;
      }
      case kIns:
        report.aligned_ops.push_back(
            AlignedOp{EditOp::kInsert, std::nullopt, h[j - 1]});
        ++report.insertions;
        --j;
        break;
      default:
        report.aligned_ops.push_back(
            AlignedOp{EditOp::kDelete, r[i - 1], std::nullopt});
        ++report.deletions;
        --i;
        break;
    }
  }
  std::reverse(report.aligned_ops.begin(), report.aligned_ops.end());
  return report;
}

double corpus_cer(std::span<const std::pair<std::string, std::string>> pairs,
                  CerMode mode) {
  if (pairs.empty()) throw ValidationError("corpus_cer: no pairs to score");
  double cer_sum = 0.0;
  std::size_t pooled_errors = 0;
  std::size_t pooled_ref = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [ref, hyp] = pairs[i];
    const AlignmentReport report = align(ref, hyp);
    if (report.ref_length == 0) {
      throw ValidationError("corpus_cer: empty reference at line " +
                            std::to_string(i + 1));
    }
    cer_sum += report.cer();
    pooled_errors += report.errors();
    pooled_ref += report.ref_length;
  }
  if (mode == CerMode::kMicro) {
    return static_cast<double>(pooled_errors) / static_cast<double>(pooled_ref);
  }
  return cer_sum / static_cast<double>(pairs.size());
}

namespace {

std::optional<std::uint64_t> peak_rss_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  // ru_maxrss is in kilobytes on Linux.
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024ULL;
}

}  // namespace

BenchmarkReport run_benchmark(const std::string& name,
                              const std::function<void()>& task,
                              std::size_t iterations, std::size_t warmup) {
  if (iterations == 0) {
    throw ValidationError("run_benchmark: iterations must be >= 1");
  }
  using clock = std::chrono::steady_clock;

  auto run_once = [&](std::size_t index, const char* phase) {
    try {
      task();
    } catch (const std::exception& e) {
      throw std::runtime_error("benchmark '" + name + "' failed at " + phase +
                               " iteration " + std::to_string(index) + ": " +
                               e.what());
    }
  };

  for (std::size_t i = 0; i < warmup; ++i) run_once(i, "warmup");

  std::vector<double> samples(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto start = clock::now();
    run_once(i, "measured");
    samples[i] = std::chrono::duration<double>(clock::now() - start).count();
  }

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(iterations);
  double var = 0.0;
  if (iterations > 1) {
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(iterations - 1);
  }

  BenchmarkReport report;
  report.name = name;
  report.mean_seconds = mean;
  report.std_seconds = std::sqrt(var);
  report.iterations = iterations;
  report.peak_bytes = peak_rss_bytes();
  return report;
}

}  // namespace htrpost
