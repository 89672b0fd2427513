// tests/fixtures.hpp

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

#ifndef MTLG2P_TESTS_FIXTURES_HPP
#define MTLG2P_TESTS_FIXTURES_HPP

#include <set>
#include <string>
#include <vector>

#include "mtlg2p/lexicon/lexicon.hpp"
#include "mtlg2p/lexicon/vocab.hpp"
#include "mtlg2p/model/config.hpp"
#include "mtlg2p/rng.hpp"

namespace mtlg2p::testing {

// ---------------------------------------------------------------------------
// Synthetic lexicon: 200 words over a small alphabet whose pronunciations
// follow deterministic rules. Words containing the marker bigram "sh" are
// the positive ("loanword") class (30%); they use a different vowel mapping
// and "sh" maps to the single phoneme S, so both tasks are learnable from
// the spelling alone.
// ---------------------------------------------------------------------------

inline std::string toy_map_char(char c) {
  switch (c) {
    case 'a': return "a:";
    case 'e': return "e:";
    case 'i': return "I";
    case 'o': return "O";
    case 'u': return "U";
    case 'r': return "R";
    case 's': return "z";
    default: return std::string(1, c);
  }
}

/// Rule-based pronunciation; the oracle for what a perfectly trained toy
/// model must emit. Character-wise mapping with one digraph: "sh" is the
/// single phoneme S (and the marker for the positive class).
inline std::vector<std::string> toy_pronounce(const std::string& word) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size();) {
    if (i + 1 < word.size() && word[i] == 's' && word[i + 1] == 'h') {
      out.push_back("S");
      i += 2;
    } else {
      out.push_back(toy_map_char(word[i]));
      ++i;
    }
  }
  return out;
}

inline std::vector<lexicon::LexiconEntry> make_toy_lexicon(
    std::size_t native_count = 140, std::size_t marked_count = 60,
    std::uint64_t seed = 20240131) {
  static const char consonants[] = {'b', 'd', 'f', 'g', 'k', 'l',
                                    'm', 'n', 'p', 'r', 's', 't'};
  static const char vowels[] = {'a', 'e', 'i', 'o', 'u'};
  Rng rng(seed);
  std::set<std::string> seen;
  std::vector<lexicon::LexiconEntry> entries;

  const auto syllable = [&rng](bool sh_onset) {
    std::string s;
    if (sh_onset) {
      s += "sh";
    } else {
      s += consonants[rng.uniform_index(12)];
    }
    s += vowels[rng.uniform_index(5)];
    return s;
  };

  const auto make_word = [&](bool marked) {
    for (;;) {
      const std::size_t syllables = 2 + rng.uniform_index(2);
      const std::size_t sh_at = marked ? rng.uniform_index(syllables) : syllables;
      std::string word;
      for (std::size_t i = 0; i < syllables; ++i) {
        word += syllable(i == sh_at);
      }
      if (!marked && word.find("sh") != std::string::npos) continue;
      if (seen.insert(word).second) return word;
    }
  };

  for (std::size_t i = 0; i < native_count; ++i) {
    lexicon::LexiconEntry e;
    e.word = make_word(false);
    e.phonemes = toy_pronounce(e.word);
    e.anglicism = false;
    entries.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < marked_count; ++i) {
    lexicon::LexiconEntry e;
    e.word = make_word(true);
    e.phonemes = toy_pronounce(e.word);
    e.anglicism = true;
    entries.push_back(std::move(e));
  }
  rng.shuffle(entries);
  return entries;
}

// ---------------------------------------------------------------------------
// Tiny-model helpers for search and gradient tests.
// ---------------------------------------------------------------------------

/// Vocabulary with the given number of real phonemes (plus the three
/// specials) and two graphemes.
inline lexicon::Vocabulary tiny_vocab(std::size_t real_phonemes = 3) {
  std::vector<std::string> graphemes{"<pad>", "<s>", "a", "b"};
  std::vector<std::string> phonemes{"<pad>", "<os>", "</os>"};
  for (std::size_t i = 0; i < real_phonemes; ++i) {
    phonemes.push_back(std::string(1, static_cast<char>('p' + i)));
  }
  return lexicon::Vocabulary::from_symbols(graphemes, phonemes);
}

inline model::ModelConfig tiny_config(const lexicon::Vocabulary& vocab,
                                      std::size_t hidden = 4,
                                      std::size_t embed = 4) {
  model::ModelConfig config;
  config.embed_dim = embed;
  config.hidden_dim = hidden;
  config.grapheme_vocab = vocab.grapheme_count();
  config.phoneme_vocab = vocab.phoneme_count();
  return config;
}

}  // namespace mtlg2p::testing

#endif  // MTLG2P_TESTS_FIXTURES_HPP
