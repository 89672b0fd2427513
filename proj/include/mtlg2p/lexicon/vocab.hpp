// mtlg2p/lexicon/vocab.hpp

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

#ifndef MTLG2P_LEXICON_VOCAB_HPP
#define MTLG2P_LEXICON_VOCAB_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtlg2p/lexicon/lexicon.hpp"

namespace mtlg2p::lexicon {

/// Bidirectional symbol/index tables for graphemes and phonemes.
///
/// Index layout (stable across runs; symbol lists are sorted by code point):
///   graphemes: 0 = <pad>, 1 = <s>, then the training set's characters
///   phonemes:  0 = <pad>, 1 = <os>, 2 = </os>, then the phoneme tokens
struct Vocabulary {
  static constexpr std::int32_t kPadId = 0;
  static constexpr std::int32_t kSeqStartId = 1;    // grapheme table
  static constexpr std::int32_t kOutputStartId = 1; // phoneme table
  static constexpr std::int32_t kOutputEndId = 2;   // phoneme table

  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kSeqStartToken = "<s>";
  static constexpr const char* kOutputStartToken = "<os>";
  static constexpr const char* kOutputEndToken = "</os>";

  std::vector<std::string> grapheme_symbols;
  std::vector<std::string> phoneme_symbols;
  std::map<std::string, std::int32_t> grapheme_index;
  std::map<std::string, std::int32_t> phoneme_index;

  std::size_t grapheme_count() const { return grapheme_symbols.size(); }
  std::size_t phoneme_count() const { return phoneme_symbols.size(); }

  /// Index of a grapheme (one Unicode scalar, UTF-8 encoded); -1 if unknown.
  std::int32_t grapheme_id(const std::string& symbol) const;
  std::int32_t phoneme_id(const std::string& symbol) const;

  const std::string& phoneme_symbol(std::int32_t id) const;

  /// Builds the tables from training entries: specials plus the sorted
  /// unique characters/phoneme tokens of the training data.
  static Vocabulary build(std::span<const LexiconEntry> train);

  /// Rebuilds the index maps from the symbol lists (after deserialization).
  static Vocabulary from_symbols(std::vector<std::string> graphemes,
                                 std::vector<std::string> phonemes);
};

/// One training example in the model's sequence conventions: the encoder
/// reads <s> followed by the reversed graphemes; the decoder is teacher
/// forced with <os> + phonemes and predicts phonemes + </os>.
struct EncodedExample {
  std::vector<std::int32_t> encoder_input;
  std::vector<std::int32_t> decoder_input;
  std::vector<std::int32_t> decoder_target;
  bool label = false;
};

/// Encodes one entry. Throws IndexError naming the offending symbol when a
/// grapheme or phoneme is not in the vocabulary (callers implement the
/// skip-word policy on top).
EncodedExample encode_example(const LexiconEntry& entry, const Vocabulary& vocab);

/// Encoder-side encoding only (<s> + reversed graphemes) for inference.
std::vector<std::int32_t> encode_word(const std::string& word,
                                      const Vocabulary& vocab);

}  // namespace mtlg2p::lexicon

#endif  // MTLG2P_LEXICON_VOCAB_HPP
