// mtlg2p/lexicon/lexicon.cpp

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

#include "mtlg2p/lexicon/lexicon.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "mtlg2p/error.hpp"
#include "mtlg2p/log.hpp"
#include "mtlg2p/utf8.hpp"

namespace mtlg2p::lexicon {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace

std::string LexiconEntry::phonemes_joined() const {
  std::string out;
  for (std::size_t i = 0; i < phonemes.size(); ++i) {
    if (i) out += ' ';
    out += phonemes[i];
  }
  return out;
}

std::vector<LexiconEntry> parse_lexicon_text(std::string_view text,
                                             bool has_flag_column,
                                             const std::string& origin,
                                             ParseStats* stats) {
  std::vector<LexiconEntry> entries;
  std::unordered_set<std::string> seen;
  ParseStats local;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = strip_cr(line);
    ++local.lines;
    if (line.empty() || line.front() == '#') continue;

    const auto err = [&](const std::string& what) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
    };

    const auto columns = split(line, '\t');
    const std::size_t expected = has_flag_column ? 3 : 2;
    if (columns.size() != expected) {
      err("expected " + std::to_string(expected) + " tab-separated columns, got " +
          std::to_string(columns.size()));
    }

    LexiconEntry entry;
    entry.word = std::string(columns[0]);
    if (entry.word.empty()) err("empty word");
    utf8::decode(entry.word);  // validates encoding

    for (std::string_view tok : split(columns[1], ' ')) {
      if (tok.empty()) err("empty phoneme token (check for double spaces)");
      entry.phonemes.emplace_back(tok);
    }
    if (entry.phonemes.empty()) err("empty phoneme sequence");

    if (has_flag_column) {
      if (columns[2] == "0") {
        entry.anglicism = false;
      } else if (columns[2] == "1") {
        entry.anglicism = true;
      } else {
        err("flag column must be 0 or 1, got '" + std::string(columns[2]) + "'");
      }
    }

    std::string key = entry.word + "\t" + entry.phonemes_joined();
    if (!seen.insert(std::move(key)).second) {
      ++local.duplicates_dropped;
      continue;
    }
    entries.push_back(std::move(entry));
  }

  local.entries = entries.size();
  if (local.duplicates_dropped > 0) {
    MTLG2P_WARN(origin << ": dropped " << local.duplicates_dropped
                       << " duplicate (word, phonemes) pairs");
  }
  if (stats != nullptr) *stats = local;
  return entries;
}

std::vector<LexiconEntry> parse_lexicon(const std::string& path,
                                        bool has_flag_column,
                                        ParseStats* stats) {
  return parse_lexicon_text(read_file(path), has_flag_column, path, stats);
}

void write_lexicon_tsv(const std::string& path,
                       const std::vector<LexiconEntry>& entries,
                       bool with_flags) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  for (const auto& e : entries) {
    out << e.word << '\t' << e.phonemes_joined();
    if (with_flags) out << '\t' << (e.anglicism.value_or(false) ? '1' : '0');
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

std::string normalize_word(std::string_view word, bool case_sensitive) {
  return case_sensitive ? std::string(word) : utf8::fold_case(word);
}

std::set<std::string> parse_wordlist(const std::string& path,
                                     bool case_sensitive) {
  std::set<std::string> words;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    line = trim(strip_cr(line));
    if (line.empty() || line.front() == '#') continue;
    words.insert(normalize_word(line, case_sensitive));
  }
  return words;
}

std::vector<std::string> parse_wordlist_ordered(const std::string& path) {
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    line = trim(strip_cr(line));
    if (line.empty() || line.front() == '#') continue;
    std::string word(line);
    if (seen.insert(word).second) words.push_back(std::move(word));
  }
  return words;
}

}  // namespace mtlg2p::lexicon
