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

#include "htrpost/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "htrpost/errors.hpp"
#include "htrpost/utf8.hpp"

namespace htrpost {

namespace {

using json = nlohmann::json;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

json parse_json_line(const std::string& line, const char* what,
                     std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + " line " +
                          std::to_string(line_no) + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(std::string_view field, const char* what,
                    std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ValidationError(std::string(what) + " line " +
                          std::to_string(line_no) + ": bad number '" +
                          std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<Detection> read_detections_jsonl(std::istream& in) {
  std::vector<Detection> detections;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_json_line(line, "detections", line_no);
    try {
      detections.emplace_back(
          BBox(j.at("x").get<double>(), j.at("y").get<double>(),
               j.at("w").get<double>(), j.at("h").get<double>()),
          j.at("score").get<double>(), j.at("label").get<std::string>());
    } catch (const json::exception& e) {
      throw ValidationError("detections line " + std::to_string(line_no) +
                            ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("detections line " + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return detections;
}

std::vector<Detection> read_detections_file(const std::string& path) {
  auto in = open_input(path);
  return read_detections_jsonl(in);
}

void write_detections_jsonl(std::ostream& out,
                            std::span<const Detection> detections) {
  for (const Detection& d : detections) {
    const json j = {{"x", d.box.x},     {"y", d.box.y},
                    {"w", d.box.w},     {"h", d.box.h},
                    {"score", d.score}, {"label", d.label}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing detections");
}

void write_lines_jsonl(std::ostream& out, std::span<const LineProposal> lines) {
  for (const LineProposal& l : lines) {
    const json j = {{"x", l.box.x},
                    {"y", l.box.y},
                    {"w", l.box.w},
                    {"h", l.box.h},
                    {"member_count", l.members.size()}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing lines");
}

void write_lines_file(const std::string& path,
                      std::span<const LineProposal> lines) {
  auto out = open_output(path);
  write_lines_jsonl(out, lines);
}

std::vector<LineProposal> read_lines_jsonl(std::istream& in) {
  std::vector<LineProposal> lines;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_json_line(line, "lines", line_no);
    try {
      const BBox box(j.at("x").get<double>(), j.at("y").get<double>(),
                     j.at("w").get<double>(), j.at("h").get<double>());
      const auto count = j.at("member_count").get<std::size_t>();
      std::vector<Detection> members(count, Detection(box, 1.0, "member"));
      lines.push_back(LineProposal{box, std::move(members)});
    } catch (const json::exception& e) {
      throw ValidationError("lines line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return lines;
}

std::vector<LineProposal> read_lines_file(const std::string& path) {
  auto in = open_input(path);
  return read_lines_jsonl(in);
}

namespace {

std::string escape_alphabet(const std::u32string& symbols) {
  std::string out;
  for (char32_t c : symbols) {
    switch (c) {
      case U'\\': out += "\\\\"; break;
      case U',': out += "\\,"; break;
      case U'\n': out += "\\n"; break;
      case U'\r': out += "\\r"; break;
      case U'\t': out += "\\t"; break;
      default: out += utf8_encode(c);
    }
  }
  return out;
}

std::u32string unescape_alphabet(const std::string& field) {
  std::string bytes;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\') {
      bytes.push_back(field[i]);
      continue;
    }
    if (i + 1 == field.size()) {
      throw ValidationError("grid header: dangling escape in alphabet");
    }
    switch (field[++i]) {
      case '\\': bytes.push_back('\\'); break;
      case ',': bytes.push_back(','); break;
      case 'n': bytes.push_back('\n'); break;
      case 'r': bytes.push_back('\r'); break;
      case 't': bytes.push_back('\t'); break;
      default:
        throw ValidationError("grid header: unknown escape \\" +
                              std::string(1, field[i]));
    }
  }
  return utf8_decode(bytes);
}

// Splits on commas that are not preceded by an odd run of backslashes.
std::vector<std::string> split_header(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool escaped = false;
  for (char c : line) {
    if (escaped) {
      current.push_back(c);
      escaped = false;
      continue;
    }
    if (c == '\\') {
      current.push_back(c);
      escaped = true;
    } else if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::size_t parse_size(const std::string& field, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ValidationError(std::string("grid header: bad ") + what + " '" +
                          field + "'");
  }
  return v;
}

}  // namespace

void write_grid(std::ostream& out, const EmissionGrid& grid) {
  out << escape_alphabet(grid.alphabet().symbols()) << ','
      << grid.alphabet().blank_index() << ',' << grid.rows() << ','
      << grid.symbols() << '\n';
  for (std::size_t t = 0; t < grid.rows(); ++t) {
    const auto row = grid.row(t);
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (s) out << ',';
      out << format_double(row[s]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing grid");
}

void write_grid_file(const std::string& path, const EmissionGrid& grid) {
  auto out = open_output(path);
  write_grid(out, grid);
}

EmissionGrid read_grid(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ValidationError("grid: missing header");
  const std::vector<std::string> fields = split_header(line);
  if (fields.size() != 4) {
    throw ValidationError("grid header: expected alphabet,blank_index,N,M");
  }
  const std::u32string symbols = unescape_alphabet(fields[0]);
  const std::size_t blank_index = parse_size(fields[1], "blank_index");
  const std::size_t n_rows = parse_size(fields[2], "N");
  const std::size_t m = parse_size(fields[3], "M");
  if (m != symbols.size()) {
    throw ValidationError("grid header: M=" + std::to_string(m) +
                          " does not match alphabet size " +
                          std::to_string(symbols.size()));
  }
  Alphabet alphabet(symbols, blank_index);

  std::vector<double> probs;
  probs.reserve(n_rows * m);
  for (std::size_t t = 0; t < n_rows; ++t) {
    if (!next_line(in, line)) {
      throw ValidationError("grid: expected " + std::to_string(n_rows) +
                            " rows, got " + std::to_string(t));
    }
    std::size_t begin = 0;
    std::size_t count = 0;
    while (begin <= line.size()) {
      std::size_t end = line.find(',', begin);
      if (end == std::string::npos) end = line.size();
      probs.push_back(parse_double(
          std::string_view(line).substr(begin, end - begin), "grid", t + 2));
      ++count;
      begin = end + 1;
    }
    if (count != m) {
      throw ValidationError("grid row " + std::to_string(t + 1) + ": expected " +
                            std::to_string(m) + " values, got " +
                            std::to_string(count));
    }
  }
  return EmissionGrid(std::move(alphabet), std::move(probs), n_rows);
}

EmissionGrid read_grid_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_grid(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::vector<Candidate> read_candidates_jsonl(std::istream& in) {
  std::vector<Candidate> candidates;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_json_line(line, "candidates", line_no);
    try {
      candidates.push_back(Candidate{j.at("text").get<std::string>(),
                                     j.at("source_score").get<double>()});
    } catch (const json::exception& e) {
      throw ValidationError("candidates line " + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return candidates;
}

std::vector<Candidate> read_candidates_file(const std::string& path) {
  auto in = open_input(path);
  return read_candidates_jsonl(in);
}

void write_candidates_jsonl(std::ostream& out,
                            std::span<const Candidate> candidates) {
  for (const Candidate& c : candidates) {
    const json j = {{"text", c.text}, {"source_score", c.source_score}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing candidates");
}

Lexicon read_lexicon_file(const std::string& path) {
  auto in = open_input(path);
  std::set<std::string> words;
  std::string line;
  while (next_line(in, line)) {
    if (!blank(line)) words.insert(line);
  }
  return Lexicon(std::move(words));
}

ConfusionMap read_confusion_json(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("confusion map: ") + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError("confusion map: expected a JSON object");
  }
  ConfusionMap map;
  for (const auto& [key, value] : j.items()) {
    const std::u32string from = utf8_decode(key);
    if (from.size() != 1) {
      throw ValidationError("confusion map: key '" + key +
                            "' must be a single character");
    }
    if (!value.is_array()) {
      throw ValidationError("confusion map: value for '" + key +
                            "' must be an array of characters");
    }
    std::u32string to;
    for (const auto& item : value) {
      const std::u32string alt = utf8_decode(item.get<std::string>());
      if (alt.size() != 1) {
        throw ValidationError("confusion map: alternative for '" + key +
                              "' must be a single character");
      }
      to.push_back(alt[0]);
    }
    map[from[0]] = std::move(to);
  }
  return map;
}

ConfusionMap read_confusion_file(const std::string& path) {
  auto in = open_input(path);
  return read_confusion_json(in);
}

HeuristicParams read_heuristic_params(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("params: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("params: expected a JSON object");
  HeuristicParams params;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw ValidationError("params: '" + key + "' must be a number");
    }
    const double v = value.get<double>();
    if (key == "min_area") params.min_area = v;
    else if (key == "max_right_edge") params.max_right_edge = v;
    else if (key == "short_line_ratio") params.short_line_ratio = v;
    else if (key == "tall_line_ratio") params.tall_line_ratio = v;
    else if (key == "start_deviation") params.start_deviation = v;
    else if (key == "overlap_removal") params.overlap_removal = v;
    else if (key == "y_overlap_threshold") params.y_overlap_threshold = v;
    else throw ValidationError("params: unknown key '" + key + "'");
  }
  params.validate();
  return params;
}

HeuristicParams read_heuristic_params_file(const std::string& path) {
  auto in = open_input(path);
  return read_heuristic_params(in);
}

std::vector<std::string> read_text_lines(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (next_line(in, line)) lines.push_back(line);
  return lines;
}

void write_text_lines(const std::string& path,
                      std::span<const std::string> lines) {
  auto out = open_output(path);
  for (const std::string& line : lines) out << line << '\n';
  if (!out) throw IoError("failed writing: " + path);
}

std::vector<std::string> list_files_sorted(const std::string& dir,
                                           const std::string& extension) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

}  // namespace htrpost
