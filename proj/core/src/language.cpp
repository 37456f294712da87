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

#include "htrpost/language.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>
#include <utility>

#include "htrpost/errors.hpp"
#include "htrpost/utf8.hpp"

namespace htrpost {

namespace {

constexpr char kLmMagic[8] = {'H', 'T', 'R', 'L', 'M', '0', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

std::uint32_t read_u32(std::istream& in) {
  char b[4];
  in.read(b, 4);
  if (!in) throw IoError("truncated language model file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  char b[8];
  in.read(b, 8);
  if (!in) throw IoError("truncated language model file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

// Characters colliding with the sentinels cannot appear as text.
char32_t strip_sentinels(char32_t c) {
  return (c == CharLM::kBegin || c == CharLM::kEnd) ? CharLM::kUnknown : c;
}

}  // namespace

CharLM::CharLM(std::size_t order, double smoothing_k,
               std::set<char32_t> alphabet)
    : order_(order), smoothing_k_(smoothing_k) {
  if (order_ == 0) throw ValidationError("CharLM order must be >= 1");
  if (!(smoothing_k_ > 0.0)) {
    throw ValidationError("CharLM smoothing_k must be > 0");
  }
  alphabet.insert(kBegin);
  alphabet.insert(kEnd);
  alphabet.insert(kUnknown);
  alphabet_set_ = std::move(alphabet);
  alphabet_.assign(alphabet_set_.begin(), alphabet_set_.end());
}

char32_t CharLM::normalize(char32_t c) const {
  return alphabet_set_.contains(c) ? c : kUnknown;
}

double CharLM::prob(const std::u32string& context, char32_t next) const {
  // Effective context: the last order-1 characters, front-padded with the
  // begin sentinel when shorter.
  std::u32string ctx(order_ - 1, kBegin);
  const std::size_t take = std::min(context.size(), order_ - 1);
  for (std::size_t i = 0; i < take; ++i) {
    ctx[order_ - 1 - take + i] = normalize(context[context.size() - take + i]);
  }

  std::uint64_t count = 0;
  std::uint64_t total = 0;
  if (const auto it = counts_.find(ctx); it != counts_.end()) {
    if (const auto jt = it->second.find(normalize(next)); jt != it->second.end()) {
      count = jt->second;
    }
    total = context_totals_.at(ctx);
  }
  return (static_cast<double>(count) + smoothing_k_) /
         (static_cast<double>(total) +
          smoothing_k_ * static_cast<double>(alphabet_.size()));
}

double CharLM::log_prob(const std::u32string& context, char32_t next) const {
  return std::log(prob(context, next));
}

double CharLM::sequence_log_prob(const std::u32string& text) const {
  std::u32string padded(order_ - 1, kBegin);
  padded.reserve(padded.size() + text.size() + 1);
  for (char32_t c : text) padded.push_back(normalize(strip_sentinels(c)));
  padded.push_back(kEnd);

  double total = 0.0;
  for (std::size_t i = order_ - 1; i < padded.size(); ++i) {
    const std::u32string ctx = padded.substr(i - (order_ - 1), order_ - 1);
    total += log_prob(ctx, padded[i]);
  }
  return total;
}

void CharLM::observe(const std::u32string& context, char32_t next,
                     std::uint64_t count) {
  if (context.size() != order_ - 1) {
    throw ValidationError("CharLM::observe: context must have order-1 = " +
                          std::to_string(order_ - 1) + " characters");
  }
  if (alphabet_set_.insert(next).second) {
    alphabet_.insert(std::lower_bound(alphabet_.begin(), alphabet_.end(), next),
                     next);
  }
  counts_[context][next] += count;
  context_totals_[context] += count;
}

void CharLM::save(std::ostream& out) const {
  out.write(kLmMagic, sizeof(kLmMagic));
  write_u32(out, static_cast<std::uint32_t>(order_));
  write_f64(out, smoothing_k_);
  write_u32(out, static_cast<std::uint32_t>(alphabet_.size()));
  for (char32_t c : alphabet_) write_u32(out, static_cast<std::uint32_t>(c));
  write_u64(out, counts_.size());
  for (const auto& [ctx, next_counts] : counts_) {
    for (char32_t c : ctx) write_u32(out, static_cast<std::uint32_t>(c));
    write_u32(out, static_cast<std::uint32_t>(next_counts.size()));
    for (const auto& [c, n] : next_counts) {
      write_u32(out, static_cast<std::uint32_t>(c));
      write_u64(out, n);
    }
  }
  if (!out) throw IoError("failed writing language model");
}

CharLM CharLM::load(std::istream& in) {
  char magic[sizeof(kLmMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kLmMagic, sizeof(magic)) != 0) {
    throw IoError("not a language model file (bad magic)");
  }
  const std::uint32_t order = read_u32(in);
  const double k = read_f64(in);
  const std::uint32_t alphabet_size = read_u32(in);
  std::set<char32_t> alphabet;
  for (std::uint32_t i = 0; i < alphabet_size; ++i) {
    alphabet.insert(static_cast<char32_t>(read_u32(in)));
  }
  CharLM lm(order, k, std::move(alphabet));
  const std::uint64_t contexts = read_u64(in);
  for (std::uint64_t i = 0; i < contexts; ++i) {
    std::u32string ctx(order - 1, U'\0');
    for (std::uint32_t j = 0; j + 1 < order; ++j) {
      ctx[j] = static_cast<char32_t>(read_u32(in));
    }
    const std::uint32_t entries = read_u32(in);
    for (std::uint32_t j = 0; j < entries; ++j) {
      const auto c = static_cast<char32_t>(read_u32(in));
      const std::uint64_t count = read_u64(in);
      lm.observe(ctx, c, count);
    }
  }
  return lm;
}

void CharLM::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  save(out);
}

CharLM CharLM::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  return load(in);
}

CharLM train_char_ngram(std::istream& corpus, std::size_t order,
                        double smoothing_k) {
  if (order == 0) throw ValidationError("train_char_ngram: order must be >= 1");
  CharLM lm(order, smoothing_k, {});
  std::string line;
  bool any_line = false;
  while (std::getline(corpus, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    any_line = true;
    std::u32string padded(order - 1, CharLM::kBegin);
    padded.reserve(padded.size() + line.size() + 1);
    for (char32_t c : utf8_decode(line)) padded.push_back(strip_sentinels(c));
    padded.push_back(CharLM::kEnd);
    // Every text character occurs as an event target, so observe() grows
    // the alphabet to exactly the observed characters plus the sentinels.
    for (std::size_t i = order - 1; i < padded.size(); ++i) {
      lm.observe(padded.substr(i - (order - 1), order - 1), padded[i]);
    }
  }
  if (!any_line) throw ValidationError("train_char_ngram: empty corpus");
  return lm;
}

double perplexity(const CharLM& lm, const std::string& text) {
  const std::u32string chars = utf8_decode(text);
  if (chars.empty()) throw ValidationError("perplexity: empty text");
  // Events: one per character plus the end sentinel.
  const auto events = static_cast<double>(chars.size() + 1);
  return std::exp(-lm.sequence_log_prob(chars) / events);
}

LmScorer char_lm_scorer(const CharLM& lm) {
  return [&lm](const std::u32string& prefix, char32_t next) {
    return lm.log_prob(prefix, next);
  };
}

Lexicon::Lexicon(std::set<std::string> words) {
  for (const std::string& w : words) {
    if (w.empty()) throw ValidationError("Lexicon: empty word");
    std::string lower = w;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    words_.insert(std::move(lower));
  }
}

bool Lexicon::contains(const std::string& word) const {
  std::string lower = word;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return words_.contains(lower);
}

std::vector<std::string> tokenize_words(const std::string& text) {
  const std::u32string chars = utf8_decode(text);
  std::vector<std::string> tokens;
  std::u32string current;
  auto is_letter = [](char32_t c) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c > 127;
  };
  auto flush = [&]() {
    if (!current.empty()) {
      tokens.push_back(utf8_encode(current));
      current.clear();
    }
  };
  for (char32_t c : chars) {
    if (is_letter(c)) {
      current.push_back(c >= U'A' && c <= U'Z' ? c + 32 : c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

double in_vocab_proportion(const std::string& text, const Lexicon& lexicon) {
  const std::vector<std::string> tokens = tokenize_words(text);
  if (tokens.empty()) return 1.0;
  std::size_t hits = 0;
  for (const std::string& t : tokens) {
    if (lexicon.contains(t)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  if (a.size() < b.size()) return levenshtein(b, a);
  // a is the longer string; two rolling rows over the shorter one.
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  return levenshtein(utf8_decode(a), utf8_decode(b));
}

std::vector<Candidate> rank_candidates(std::span<const Candidate> candidates,
                                       const std::string& source,
                                       const Lexicon& lexicon,
                                       const CharLM& lm) {
  if (candidates.empty()) {
    throw ValidationError("rank_candidates: no candidates");
  }
  struct Keyed {
    double neg_in_vocab;
    std::size_t distance;
    double perplexity;
    std::size_t index;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    if (!std::isfinite(c.source_score)) {
      throw ValidationError("rank_candidates: non-finite source_score");
    }
    const double pp = c.text.empty()
                          ? std::numeric_limits<double>::infinity()
                          : perplexity(lm, c.text);
    keyed.push_back(Keyed{-in_vocab_proportion(c.text, lexicon),
                          levenshtein(c.text, source), pp, i});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.neg_in_vocab, a.distance, a.perplexity) <
           std::tie(b.neg_in_vocab, b.distance, b.perplexity);
  });
  std::vector<Candidate> out;
  out.reserve(candidates.size());
  for (const Keyed& k : keyed) out.push_back(candidates[k.index]);
  return out;
}

}  // namespace htrpost
