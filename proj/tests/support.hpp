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
// Deterministic fixture generators shared by the test binaries. Every
// generator takes an explicit engine so failures reproduce from the seed.

#ifndef HTRPOST_TESTS_SUPPORT_HPP_
#define HTRPOST_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "htrpost/ctc.hpp"
#include "htrpost/geometry.hpp"

namespace htrpost::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Alphabet of m symbols with the blank first: '-', then letters.
inline Alphabet test_alphabet(std::size_t m) {
  static const std::u32string pool =
      U"-abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .'";
  return Alphabet(pool.substr(0, m), 0);
}

// Random grid with strictly positive, exactly normalized rows.
inline EmissionGrid random_grid(std::mt19937_64& rng, std::size_t n,
                                std::size_t m) {
  std::vector<double> probs(n * m);
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      probs[t * m + s] = uniform(rng, 1e-3, 1.0);
      sum += probs[t * m + s];
    }
    for (std::size_t s = 0; s < m; ++s) probs[t * m + s] /= sum;
  }
  return EmissionGrid(test_alphabet(m), std::move(probs), n);
}

inline std::string random_text(std::mt19937_64& rng, std::size_t max_len,
                               const std::string& chars = "abcde") {
  const std::size_t len = uniform_index(rng, max_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(chars[uniform_index(rng, chars.size())]);
  }
  return out;
}

// A page of k horizontal bands of word detections. Bands are vertically
// well separated; words within a band overlap heavily in y.
struct BandPage {
  std::vector<Detection> words;
  std::size_t bands = 0;
};

// Bands share a similar start and total width (like justified text), so a
// clean page passes the line filter untouched regardless of word counts.
inline BandPage make_band_page(std::mt19937_64& rng, std::size_t k,
                               std::size_t max_words_per_band = 12) {
  BandPage page;
  page.bands = k;
  const double band_h = 0.04;
  const double gap = 0.05;
  for (std::size_t b = 0; b < k; ++b) {
    const double y = 0.05 + static_cast<double>(b) * (band_h + gap);
    const std::size_t words = 1 + uniform_index(rng, max_words_per_band);
    const double band_w = uniform(rng, 0.55, 0.75);
    const double word_w =
        (band_w - 0.01 * static_cast<double>(words - 1)) /
        static_cast<double>(words);
    double x = 0.08;
    for (std::size_t wi = 0; wi < words; ++wi) {
      const double jitter = uniform(rng, -0.004, 0.004);
      page.words.emplace_back(BBox(x, y + jitter, word_w, band_h),
                              uniform(rng, 0.5, 1.0), "handwriting");
      x += word_w + 0.01;
    }
  }
  return page;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace htrpost::testing

#endif  // HTRPOST_TESTS_SUPPORT_HPP_
