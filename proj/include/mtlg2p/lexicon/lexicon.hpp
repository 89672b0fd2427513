// mtlg2p/lexicon/lexicon.hpp

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

#ifndef MTLG2P_LEXICON_LEXICON_HPP
#define MTLG2P_LEXICON_LEXICON_HPP

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mtlg2p::lexicon {

/// One pronunciation-lexicon row: a word, its phoneme sequence in BAS-SAMPA
/// notation, and an optional Anglicism flag.
struct LexiconEntry {
  std::string word;
  std::vector<std::string> phonemes;
  std::optional<bool> anglicism;

  std::string phonemes_joined() const;
};

struct ParseStats {
  std::size_t lines = 0;
  std::size_t entries = 0;
  std::size_t duplicates_dropped = 0;
};

/// Parses a lexicon TSV: `word<TAB>phonemes space-separated[<TAB>flag 0|1]`,
/// UTF-8, `#` line comments, LF line endings. Malformed lines raise
/// ParseError with the line number. Exact duplicate (word, phonemes) pairs
/// are dropped, keeping the first occurrence; the count is reported via
/// stats and a warning.
std::vector<LexiconEntry> parse_lexicon(const std::string& path,
                                        bool has_flag_column,
                                        ParseStats* stats = nullptr);

/// Same parser over an in-memory buffer; `origin` names the source in errors.
std::vector<LexiconEntry> parse_lexicon_text(std::string_view text,
                                             bool has_flag_column,
                                             const std::string& origin,
                                             ParseStats* stats = nullptr);

/// Writes entries in the same TSV shape. with_flags emits the third column
/// (entries without a flag are written as 0).
void write_lexicon_tsv(const std::string& path,
                       const std::vector<LexiconEntry>& entries,
                       bool with_flags);

/// Reads a word list (one word per line, `#` comments, UTF-8), returning the
/// set of normalized forms used for Anglicism tagging. Normalization is
/// case folding unless case_sensitive is set.
std::set<std::string> parse_wordlist(const std::string& path,
                                     bool case_sensitive = false);

/// Same normalization applied to a single word (for membership tests).
std::string normalize_word(std::string_view word, bool case_sensitive);

/// Reads a word list preserving original spellings and input order, dropping
/// blank lines, comments and exact duplicates. Dictionary generation wants
/// the original forms.
std::vector<std::string> parse_wordlist_ordered(const std::string& path);

}  // namespace mtlg2p::lexicon

#endif  // MTLG2P_LEXICON_LEXICON_HPP
