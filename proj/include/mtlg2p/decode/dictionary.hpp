// mtlg2p/decode/dictionary.hpp

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

#ifndef MTLG2P_DECODE_DICTIONARY_HPP
#define MTLG2P_DECODE_DICTIONARY_HPP

#include <string>
#include <vector>

#include "mtlg2p/decode/decoder.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mtlg2p::decode {

struct DictionaryEntry {
  std::string word;
  std::vector<std::string> phonemes;
  double log_prob = 0.0;
  double anglicism_prob = 0.0;
  bool flag = false;
  bool truncated = false;
  bool ok = false;
  std::string skip_reason;
};

struct DictionaryResult {
  std::vector<DictionaryEntry> rows;  // input order
  std::size_t emitted = 0;
  std::size_t skipped = 0;
};

/// Beam-decodes every word in order. Words with graphemes outside the model
/// vocabulary are skipped and reported, never fatal. Decoding is read-only
/// over the parameters, so words run in parallel; rows keep input order.
template <typename T>
DictionaryResult generate_dictionary(const std::vector<std::string>& words,
                                     const model::ModelParams<T>& params,
                                     const model::ModelConfig& model_config,
                                     const lexicon::Vocabulary& vocab,
                                     const DecodeConfig& config) {
  config.validate();
  DictionaryResult result;
  result.rows.resize(words.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(words.size()); ++i) {
    auto& row = result.rows[static_cast<std::size_t>(i)];
    row.word = words[static_cast<std::size_t>(i)];
    try {
      const auto decoded =
          beam_search(row.word, params, model_config, vocab, config);
      row.phonemes = decoded.phonemes;
      row.log_prob = decoded.log_prob;
      row.anglicism_prob = decoded.anglicism_prob;
      row.flag = decoded.anglicism_prob >= config.threshold;
      row.truncated = decoded.truncated;
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.skip_reason = e.what();
    }
  }

  for (const auto& row : result.rows) {
    if (row.ok) {
      ++result.emitted;
    } else {
      ++result.skipped;
    }
  }
  return result;
}

/// Writes the dictionary in the lexicon TSV shape, preceded by a `#` header
/// recording the decoding settings. With emit_flags two extra columns carry
/// the classifier probability and the thresholded 0/1 flag.
void write_dictionary_tsv(const std::string& path,
                          const DictionaryResult& result, bool emit_flags,
                          const std::string& metadata_header);

/// Sidecar JSON listing skipped words with reasons.
void write_skip_report(const std::string& path, const DictionaryResult& result);

}  // namespace mtlg2p::decode

#endif  // MTLG2P_DECODE_DICTIONARY_HPP
