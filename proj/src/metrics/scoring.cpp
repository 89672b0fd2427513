// mtlg2p/metrics/scoring.cpp

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

#include "mtlg2p/metrics/scoring.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mtlg2p/error.hpp"
#include "mtlg2p/utf8.hpp"

namespace mtlg2p::metrics {

double per(std::span<const SeqPair> pairs) {
  if (pairs.empty()) throw ContractError("per requires at least one pair");
  std::size_t dist = 0, ref_len = 0;
  for (const auto& [ref, hyp] : pairs) {
    if (ref.empty()) throw ContractError("per requires non-empty references");
    dist += levenshtein(ref, hyp).distance();
    ref_len += ref.size();
  }
  return 100.0 * static_cast<double>(dist) / static_cast<double>(ref_len);
}

double g2p_wer(std::span<const SeqPair> pairs) {
  if (pairs.empty()) throw ContractError("g2p_wer requires at least one pair");
  std::size_t wrong = 0;
  for (const auto& [ref, hyp] : pairs) {
    if (ref != hyp) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(pairs.size());
}

ClassifierMetrics classifier_metrics(std::span<const double> probabilities,
                                     std::span<const std::uint8_t> labels,
                                     double threshold) {
  if (probabilities.size() != labels.size()) {
    throw ContractError("classifier_metrics length mismatch: " +
                        std::to_string(probabilities.size()) + " vs " +
                        std::to_string(labels.size()));
  }
  if (probabilities.empty()) {
    throw ContractError("classifier_metrics requires at least one prediction");
  }
  ClassifierMetrics m;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const bool pred = probabilities[i] >= threshold;
    const bool truth = labels[i] != 0;
    if (pred && truth) ++m.counts.tp;
    else if (pred && !truth) ++m.counts.fp;
    else if (!pred && truth) ++m.counts.fn;
    else ++m.counts.tn;
  }
  const auto& c = m.counts;
  const double n = static_cast<double>(c.total());
  m.accuracy = 100.0 * static_cast<double>(c.tp + c.tn) / n;
  // Zero-denominator convention: report 0, not NaN.
  m.precision = (c.tp + c.fp) == 0
                    ? 0.0
                    : 100.0 * static_cast<double>(c.tp) /
                          static_cast<double>(c.tp + c.fp);
  m.recall = (c.tp + c.fn) == 0
                 ? 0.0
                 : 100.0 * static_cast<double>(c.tp) /
                       static_cast<double>(c.tp + c.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double aer_from_counts(std::size_t total_flagged, std::size_t recognized) {
  if (total_flagged == 0) return 0.0;
  return 100.0 *
         static_cast<double>(total_flagged - recognized) /
         static_cast<double>(total_flagged);
}

namespace {

struct NormalizedRef {
  std::vector<std::string> tokens;
  std::vector<std::size_t> group_of_token;  // index into group_flagged
  std::vector<std::uint8_t> group_flagged;
};

std::vector<std::string> split_word(const std::string& word,
                                    const AsrNormalize& norm) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : word) {
    if (norm.map_hyphens && ch == '-') {
      if (!current.empty()) parts.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) parts.push_back(std::move(current));
  if (norm.ignore_case) {
    for (auto& p : parts) p = utf8::fold_case(p);
  }
  return parts;
}

NormalizedRef normalize_ref(const FlaggedTranscript& ref,
                            const AsrNormalize& norm) {
  NormalizedRef out;
  for (std::size_t w = 0; w < ref.words.size(); ++w) {
    const auto parts = split_word(ref.words[w], norm);
    if (parts.empty()) continue;  // word was only hyphens
    const std::size_t group = out.group_flagged.size();
    out.group_flagged.push_back(ref.flags[w]);
    for (const auto& p : parts) {
      out.tokens.push_back(p);
      out.group_of_token.push_back(group);
    }
  }
  return out;
}

std::vector<std::string> normalize_hyp(const Transcript& hyp,
                                       const AsrNormalize& norm) {
  std::vector<std::string> tokens;
  for (const auto& w : hyp.words) {
    for (auto& p : split_word(w, norm)) tokens.push_back(std::move(p));
  }
  return tokens;
}

}  // namespace

AsrReport asr_wer_aer(const std::vector<FlaggedTranscript>& refs,
                      const std::vector<Transcript>& hyps,
                      const AsrNormalize& normalize) {
  std::unordered_map<std::string, std::size_t> hyp_by_id;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (!hyp_by_id.emplace(hyps[i].id, i).second) {
      throw Error("duplicate hypothesis utterance id '" + hyps[i].id + "'");
    }
  }

  AsrReport report;
  std::unordered_set<std::string> ref_ids;
  for (const auto& ref : refs) {
    if (!ref_ids.insert(ref.id).second) {
      throw Error("duplicate reference utterance id '" + ref.id + "'");
    }
    const auto it = hyp_by_id.find(ref.id);
    if (it == hyp_by_id.end()) {
      throw Error("no hypothesis for utterance id '" + ref.id + "'");
    }

    const NormalizedRef nref = normalize_ref(ref, normalize);
    const auto hyp_tokens = normalize_hyp(hyps[it->second], normalize);
    const auto alignment = align_words(nref.tokens, hyp_tokens);

    UtteranceScore score;
    score.id = ref.id;
    score.ref_len = nref.tokens.size();

    std::vector<std::uint8_t> group_all_matched(nref.group_flagged.size(), 1);
    std::size_t ref_pos = 0;
    for (const auto& pair : alignment) {
      switch (pair.op) {
        case AlignOp::kMatch:
          ++ref_pos;
          break;
        case AlignOp::kSub:
          ++score.ops.substitutions;
          group_all_matched[nref.group_of_token[ref_pos]] = 0;
          ++ref_pos;
          break;
        case AlignOp::kDel:
          ++score.ops.deletions;
          group_all_matched[nref.group_of_token[ref_pos]] = 0;
          ++ref_pos;
          break;
        case AlignOp::kIns:
          ++score.ops.insertions;
          break;
      }
    }
    for (std::size_t g = 0; g < nref.group_flagged.size(); ++g) {
      if (!nref.group_flagged[g]) continue;
      ++score.flagged;
      if (group_all_matched[g]) ++score.recognized;
    }

    report.ops.substitutions += score.ops.substitutions;
    report.ops.deletions += score.ops.deletions;
    report.ops.insertions += score.ops.insertions;
    report.ref_len_total += score.ref_len;
    report.flagged_total += score.flagged;
    report.recognized_total += score.recognized;
    report.utterances.push_back(std::move(score));
  }

  for (const auto& hyp : hyps) {
    if (!ref_ids.count(hyp.id)) {
      throw Error("no reference for utterance id '" + hyp.id + "'");
    }
  }

  report.wer = report.ref_len_total == 0
                   ? 0.0
                   : 100.0 * static_cast<double>(report.ops.distance()) /
                         static_cast<double>(report.ref_len_total);
  report.aer = aer_from_counts(report.flagged_total, report.recognized_total);
  return report;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (ch == ' ' || ch == '\t') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

template <typename Fn>
void for_each_transcript_line(const std::string& path, Fn&& fn) {
  const std::string text = read_file(path);
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected `id<TAB>words...`");
    }
    std::string id(line.substr(0, tab));
    if (id.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty id");
    }
    fn(std::move(id), whitespace_tokens(line.substr(tab + 1)), line_no);
  }
}

}  // namespace

std::vector<FlaggedTranscript> parse_ref_transcripts(const std::string& path) {
  std::vector<FlaggedTranscript> out;
  for_each_transcript_line(
      path, [&](std::string id, std::vector<std::string> tokens,
                std::size_t line_no) {
        FlaggedTranscript t;
        t.id = std::move(id);
        for (auto& tok : tokens) {
          const bool flagged = tok.front() == '*';
          if (flagged) tok.erase(tok.begin());
          if (tok.empty()) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": bare '*' flag without a word");
          }
          t.words.push_back(std::move(tok));
          t.flags.push_back(flagged ? 1 : 0);
        }
        out.push_back(std::move(t));
      });
  return out;
}

std::vector<Transcript> parse_hyp_transcripts(const std::string& path) {
  std::vector<Transcript> out;
  for_each_transcript_line(path, [&](std::string id,
                                     std::vector<std::string> tokens,
                                     std::size_t) {
    out.push_back({std::move(id), std::move(tokens)});
  });
  return out;
}

}  // namespace mtlg2p::metrics
