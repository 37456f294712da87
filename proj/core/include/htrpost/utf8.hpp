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

#ifndef HTRPOST_UTF8_HPP_
#define HTRPOST_UTF8_HPP_

#include <string>

namespace htrpost {

// Strict decode; throws ValidationError on malformed input, naming the
// byte offset. Text-level operations (edit distance, CER, language model
// contexts) all work on code points, never on raw bytes.
std::u32string utf8_decode(const std::string& bytes);

std::string utf8_encode(const std::u32string& codepoints);
std::string utf8_encode(char32_t codepoint);

}  // namespace htrpost

#endif  // HTRPOST_UTF8_HPP_
