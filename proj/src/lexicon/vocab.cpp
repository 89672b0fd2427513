// mtlg2p/lexicon/vocab.cpp

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

#include "mtlg2p/lexicon/vocab.hpp"

#include <algorithm>
#include <set>

#include "mtlg2p/error.hpp"
#include "mtlg2p/utf8.hpp"

namespace mtlg2p::lexicon {

std::int32_t Vocabulary::grapheme_id(const std::string& symbol) const {
  const auto it = grapheme_index.find(symbol);
  return it == grapheme_index.end() ? -1 : it->second;
}

std::int32_t Vocabulary::phoneme_id(const std::string& symbol) const {
  const auto it = phoneme_index.find(symbol);
  return it == phoneme_index.end() ? -1 : it->second;
}

const std::string& Vocabulary::phoneme_symbol(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= phoneme_symbols.size()) {
    throw IndexError("phoneme id " + std::to_string(id) +
                     " out of range for vocabulary of " +
                     std::to_string(phoneme_symbols.size()));
  }
  return phoneme_symbols[static_cast<std::size_t>(id)];
}

Vocabulary Vocabulary::from_symbols(std::vector<std::string> graphemes,
                                    std::vector<std::string> phonemes) {
  Vocabulary v;
  v.grapheme_symbols = std::move(graphemes);
  v.phoneme_symbols = std::move(phonemes);
  for (std::size_t i = 0; i < v.grapheme_symbols.size(); ++i) {
    if (!v.grapheme_index.emplace(v.grapheme_symbols[i],
                                  static_cast<std::int32_t>(i)).second) {
      throw ContractError("duplicate grapheme symbol '" + v.grapheme_symbols[i] +
                          "' in vocabulary");
    }
  }
  for (std::size_t i = 0; i < v.phoneme_symbols.size(); ++i) {
    if (!v.phoneme_index.emplace(v.phoneme_symbols[i],
                                 static_cast<std::int32_t>(i)).second) {
      throw ContractError("duplicate phoneme symbol '" + v.phoneme_symbols[i] +
                          "' in vocabulary");
    }
  }
  return v;
}

Vocabulary Vocabulary::build(std::span<const LexiconEntry> train) {
  if (train.empty()) {
    throw ContractError("cannot build a vocabulary from an empty train set");
  }
  // Sorting by code point keeps index assignment deterministic; byte-wise
  // comparison of UTF-8 strings orders by code point already.
  std::set<std::uint32_t> codepoints;
  std::set<std::string> phoneme_tokens;
  for (const auto& entry : train) {
    for (std::uint32_t cp : utf8::decode(entry.word)) codepoints.insert(cp);
    for (const auto& tok : entry.phonemes) phoneme_tokens.insert(tok);
  }

  std::vector<std::string> graphemes{kPadToken, kSeqStartToken};
  for (std::uint32_t cp : codepoints) graphemes.push_back(utf8::encode(cp));

  std::vector<std::string> phonemes{kPadToken, kOutputStartToken, kOutputEndToken};
  for (const auto& tok : phoneme_tokens) phonemes.push_back(tok);

  return from_symbols(std::move(graphemes), std::move(phonemes));
}

EncodedExample encode_example(const LexiconEntry& entry,
                              const Vocabulary& vocab) {
  EncodedExample ex;
  ex.label = entry.anglicism.value_or(false);

  ex.encoder_input = encode_word(entry.word, vocab);

  ex.decoder_input.reserve(entry.phonemes.size() + 1);
  ex.decoder_target.reserve(entry.phonemes.size() + 1);
  ex.decoder_input.push_back(Vocabulary::kOutputStartId);
  for (const auto& tok : entry.phonemes) {
    const std::int32_t id = vocab.phoneme_id(tok);
    if (id < 0) {
      throw IndexError("unknown phoneme '" + tok + "' in word '" + entry.word +
                       "'");
    }
    ex.decoder_input.push_back(id);
    ex.decoder_target.push_back(id);
  }
  ex.decoder_target.push_back(Vocabulary::kOutputEndId);
  return ex;
}

std::vector<std::int32_t> encode_word(const std::string& word,
                                      const Vocabulary& vocab) {
  const auto codepoints = utf8::decode(word);
  if (codepoints.empty()) throw ContractError("cannot encode an empty word");
  std::vector<std::int32_t> ids;
  ids.reserve(codepoints.size() + 1);
  ids.push_back(Vocabulary::kSeqStartId);
  // The encoder reads the word in reverse.
  for (auto it = codepoints.rbegin(); it != codepoints.rend(); ++it) {
    const std::string symbol = utf8::encode(*it);
    const std::int32_t id = vocab.grapheme_id(symbol);
    if (id < 0) {
      throw IndexError("unknown grapheme '" + symbol + "' in word '" + word +
                       "'");
    }
    ids.push_back(id);
  }
  return ids;
}

}  // namespace mtlg2p::lexicon
