// mtlg2p/utf8.hpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MTLG2P_UTF8_HPP
#define MTLG2P_UTF8_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtlg2p::utf8 {

/// Decodes a UTF-8 string into Unicode scalar values. Throws ParseError on
/// malformed byte sequences (graphemes are tokenized by scalar value, so the
/// input must be valid UTF-8).
std::vector<std::uint32_t> decode(std::string_view text);

/// Encodes one scalar value back to UTF-8.
std::string encode(std::uint32_t codepoint);

/// Lowercases ASCII and the Latin-1 letters used in German orthography
/// (umlauts, capital sharp s). Sufficient for Anglicism word-list matching;
/// not a full Unicode case folding.
std::uint32_t fold_case(std::uint32_t codepoint);

/// Case-folds an entire UTF-8 string.
std::string fold_case(std::string_view text);

}  // namespace mtlg2p::utf8

#endif  // MTLG2P_UTF8_HPP
