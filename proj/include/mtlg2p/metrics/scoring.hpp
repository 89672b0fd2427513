// mtlg2p/metrics/scoring.hpp

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

#ifndef MTLG2P_METRICS_SCORING_HPP
#define MTLG2P_METRICS_SCORING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtlg2p/metrics/edit.hpp"

namespace mtlg2p::metrics {

using TokenSeq = std::vector<std::string>;
using SeqPair = std::pair<TokenSeq, TokenSeq>;  // (reference, hypothesis)

/// Phoneme error rate: 100 * sum of edit distances / sum of reference
/// lengths. References must be non-empty.
double per(std::span<const SeqPair> pairs);

/// G2P word error rate: 100 * (pairs with any mismatch) / pair count.
double g2p_wer(std::span<const SeqPair> pairs);

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
};

/// All values in percent. Precision, recall and F1 are defined as 0 (not
/// NaN) when their denominators vanish, e.g. for a classifier that never
/// predicts positive.
struct ClassifierMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
};

/// Thresholded binary-classification metrics; prediction = (p >= threshold).
ClassifierMetrics classifier_metrics(std::span<const double> probabilities,
                                     std::span<const std::uint8_t> labels,
                                     double threshold = 0.5);

/// Reference transcript line: utterance id, words, and a per-word Anglicism
/// flag (words prefixed with `*` in the file).
struct FlaggedTranscript {
  std::string id;
  std::vector<std::string> words;
  std::vector<std::uint8_t> flags;
};

struct Transcript {
  std::string id;
  std::vector<std::string> words;
};

struct AsrNormalize {
  bool map_hyphens = false;  // re-tokenize "E-Mail" as "E Mail" on both sides
  bool ignore_case = false;
};

struct UtteranceScore {
  std::string id;
  EditOps ops;
  std::size_t ref_len = 0;
  std::size_t flagged = 0;
  std::size_t recognized = 0;
};

struct AsrReport {
  double wer = 0.0;
  double aer = 0.0;
  EditOps ops;
  std::size_t ref_len_total = 0;
  std::size_t flagged_total = 0;
  std::size_t recognized_total = 0;
  std::vector<UtteranceScore> utterances;
};

/// AER from counts: 100 * (total - recognized) / total. Zero total gives 0.
double aer_from_counts(std::size_t total_flagged, std::size_t recognized);

/// Transcript-level WER plus the Anglicism error rate. A flagged reference
/// word counts as recognized iff every token it contributes (one token, or
/// several after hyphen mapping) is aligned as an exact match. Utterance ids
/// must match one-to-one between refs and hyps.
AsrReport asr_wer_aer(const std::vector<FlaggedTranscript>& refs,
                      const std::vector<Transcript>& hyps,
                      const AsrNormalize& normalize = {});

/// Parses `id<TAB>words...`; `*word` marks a flagged Anglicism.
std::vector<FlaggedTranscript> parse_ref_transcripts(const std::string& path);

/// Same format without flags (a stray `*` is kept as part of the word).
std::vector<Transcript> parse_hyp_transcripts(const std::string& path);

}  // namespace mtlg2p::metrics

#endif  // MTLG2P_METRICS_SCORING_HPP
