// mtlg2p/decode/decoder.hpp

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

#ifndef MTLG2P_DECODE_DECODER_HPP
#define MTLG2P_DECODE_DECODER_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mtlg2p/lexicon/vocab.hpp"
#include "mtlg2p/model/network.hpp"

namespace mtlg2p::decode {

/// Inference settings. The output-length budget counts generation steps
/// including the end token, so a budget of n allows at most n-1 phonemes.
struct DecodeConfig {
  std::size_t beam_width = 8;
  std::size_t max_len_factor = 4;
  std::size_t max_len_floor = 8;
  double threshold = 0.5;

  void validate() const {
    if (beam_width == 0) throw ContractError("beam width must be >= 1");
    if (max_len_floor == 0 || max_len_factor == 0) {
      throw ContractError("output length budget must be >= 1");
    }
  }

  std::size_t max_steps_for(std::size_t grapheme_count) const {
    return std::max(max_len_floor, max_len_factor * grapheme_count);
  }
};

template <typename T>
struct DecodeResult {
  std::vector<std::string> phonemes;
  double log_prob = 0.0;
  double anglicism_prob = 0.0;
  bool truncated = false;  // no hypothesis finished within the step budget
};

namespace detail {

template <typename T>
using LayerStates = std::vector<std::pair<model::Tensor<T>, model::Tensor<T>>>;

/// Feeds one token through the decoder stack (batch of one, no tape) and
/// returns the new states plus the next-token log-probability row.
template <typename T>
std::pair<LayerStates<T>, std::vector<T>> decoder_advance(
    const model::ModelParams<T>& params, const LayerStates<T>& state,
    std::int32_t token) {
  using namespace numcore;
  const std::int32_t column[1] = {token};
  Tensor<T> x = embedding<T>(nullptr, params.phoneme_embed,
                             std::span<const std::int32_t>(column, 1));
  LayerStates<T> next;
  next.reserve(state.size());
  for (std::size_t l = 0; l < state.size(); ++l) {
    auto [h, c] = model::lstm_cell_step<T>(nullptr, x, state[l].first,
                                           state[l].second, params.decoder[l]);
    next.emplace_back(h, c);
    x = h;
  }
  auto logits = affine<T>(nullptr, x, params.out_w, params.out_b);
  auto log_probs = log_softmax<T>(nullptr, logits, 1);
  return {std::move(next),
          std::vector<T>(log_probs.values().begin(), log_probs.values().end())};
}

/// Candidate tokens for generation: every phoneme plus the end token; the
/// padding and output-start specials are never emitted.
inline std::vector<std::int32_t> candidate_tokens(
    const lexicon::Vocabulary& vocab) {
  std::vector<std::int32_t> out;
  out.reserve(vocab.phoneme_count() - 2);
  out.push_back(lexicon::Vocabulary::kOutputEndId);
  for (std::int32_t id = 3;
       id < static_cast<std::int32_t>(vocab.phoneme_count()); ++id) {
    out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename T>
struct Hypothesis {
  std::vector<std::int32_t> seq;
  T log_prob = T(0);
  LayerStates<T> state;
  std::vector<T> next_log_probs;
};

template <typename T>
struct Candidate {
  std::size_t parent = 0;
  std::int32_t token = 0;
  T log_prob = T(0);
  std::vector<std::int32_t> seq;  // parent sequence + token
};

/// Order used for beam pruning and all tie-breaking: higher score first,
/// then lexicographically smaller token sequence.
template <typename T>
bool candidate_before(const Candidate<T>& a, const Candidate<T>& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.seq < b.seq;
}

template <typename T>
std::vector<std::string> to_phonemes(const std::vector<std::int32_t>& seq,
                                     const lexicon::Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (std::int32_t id : seq) out.push_back(vocab.phoneme_symbol(id));
  return out;
}

}  // namespace detail

/// Length-synchronous beam search seeded with <os>. Each step expands every
/// live hypothesis over all candidate tokens and keeps the top beam_width by
/// cumulative log-probability; selected hypotheses ending in </os> retire to
/// the result pool. Scores are raw sums (no length normalization); ties
/// break toward the lexicographically smallest index sequence. If nothing
/// finishes within the step budget the best unfinished hypothesis is
/// returned with the truncated flag set.
template <typename T>
DecodeResult<T> beam_search(const std::string& word,
                            const model::ModelParams<T>& params,
                            const model::ModelConfig& model_config,
                            const lexicon::Vocabulary& vocab,
                            const DecodeConfig& config) {
  using lexicon::Vocabulary;
  config.validate();
  const auto encoder_input = lexicon::encode_word(word, vocab);
  const auto enc_state =
      model::encode<T>(nullptr, params, model_config, encoder_input,
                       model::RunMode::kEval);

  DecodeResult<T> result;
  result.anglicism_prob = static_cast<double>(
      model::classify<T>(nullptr, params, model_config, enc_state,
                         model::RunMode::kEval)
          .item());

  const auto candidates_for = detail::candidate_tokens(vocab);
  const std::size_t max_steps = config.max_steps_for(encoder_input.size() - 1);

  detail::Hypothesis<T> root;
  root.state = enc_state.layer_hc;
  {
    auto [state, row] = detail::decoder_advance<T>(params, root.state,
                                                   Vocabulary::kOutputStartId);
    root.state = std::move(state);
    root.next_log_probs = std::move(row);
  }
  std::vector<detail::Hypothesis<T>> live;
  live.push_back(std::move(root));

  bool have_best = false;
  T best_score = T(0);
  std::vector<std::int32_t> best_seq;

  for (std::size_t step = 0; step < max_steps && !live.empty(); ++step) {
    std::vector<detail::Candidate<T>> expansions;
    expansions.reserve(live.size() * candidates_for.size());
    for (std::size_t h = 0; h < live.size(); ++h) {
      for (std::int32_t tok : candidates_for) {
        detail::Candidate<T> cand;
        cand.parent = h;
        cand.token = tok;
        cand.log_prob =
            live[h].log_prob + live[h].next_log_probs[static_cast<std::size_t>(tok)];
        cand.seq = live[h].seq;
        cand.seq.push_back(tok);
        expansions.push_back(std::move(cand));
      }
    }
    std::sort(expansions.begin(), expansions.end(), detail::candidate_before<T>);
    if (expansions.size() > config.beam_width) {
      expansions.resize(config.beam_width);
    }

    std::vector<detail::Hypothesis<T>> next_live;
    const bool last_step = step + 1 == max_steps;
    for (auto& cand : expansions) {
      if (cand.token == Vocabulary::kOutputEndId) {
        std::vector<std::int32_t> finished(cand.seq.begin(), cand.seq.end() - 1);
        if (!have_best || cand.log_prob > best_score ||
            (cand.log_prob == best_score && finished < best_seq)) {
          have_best = true;
          best_score = cand.log_prob;
          best_seq = std::move(finished);
        }
      } else {
        detail::Hypothesis<T> hyp;
        hyp.seq = std::move(cand.seq);
        hyp.log_prob = cand.log_prob;
        if (!last_step) {
          auto [state, row] =
              detail::decoder_advance<T>(params, live[cand.parent].state,
                                         cand.token);
          hyp.state = std::move(state);
          hyp.next_log_probs = std::move(row);
        }
        next_live.push_back(std::move(hyp));
      }
    }
    live = std::move(next_live);
  }

  if (have_best) {
    result.phonemes = detail::to_phonemes<T>(best_seq, vocab);
    result.log_prob = static_cast<double>(best_score);
    result.truncated = false;
  } else {
    // live is non-empty here and sorted by the pruning order.
    result.phonemes = detail::to_phonemes<T>(live.front().seq, vocab);
    result.log_prob = static_cast<double>(live.front().log_prob);
    result.truncated = true;
  }
  return result;
}

/// Greedy baseline: the argmax candidate token per step until </os> or the
/// step budget. Implemented independently of beam_search; width-1 beam and
/// greedy must agree exactly, including tie handling (ties on the cumulative
/// score pick the smaller token index).
template <typename T>
DecodeResult<T> greedy_decode(const std::string& word,
                              const model::ModelParams<T>& params,
                              const model::ModelConfig& model_config,
                              const lexicon::Vocabulary& vocab,
                              const DecodeConfig& config) {
  using lexicon::Vocabulary;
  config.validate();
  const auto encoder_input = lexicon::encode_word(word, vocab);
  const auto enc_state =
      model::encode<T>(nullptr, params, model_config, encoder_input,
                       model::RunMode::kEval);

  DecodeResult<T> result;
  result.anglicism_prob = static_cast<double>(
      model::classify<T>(nullptr, params, model_config, enc_state,
                         model::RunMode::kEval)
          .item());

  const auto candidates_for = detail::candidate_tokens(vocab);
  const std::size_t max_steps = config.max_steps_for(encoder_input.size() - 1);

  detail::LayerStates<T> state = enc_state.layer_hc;
  auto [state0, row] =
      detail::decoder_advance<T>(params, state, Vocabulary::kOutputStartId);
  state = std::move(state0);

  std::vector<std::int32_t> seq;
  T score = T(0);
  result.truncated = true;
  for (std::size_t step = 0; step < max_steps; ++step) {
    std::int32_t best_tok = candidates_for.front();
    T best_cum = score + row[static_cast<std::size_t>(best_tok)];
    for (std::size_t c = 1; c < candidates_for.size(); ++c) {
      const std::int32_t tok = candidates_for[c];
      const T cum = score + row[static_cast<std::size_t>(tok)];
      if (cum > best_cum) {  // ties keep the smaller index (ascending scan)
        best_cum = cum;
        best_tok = tok;
      }
    }
    score = best_cum;
    if (best_tok == Vocabulary::kOutputEndId) {
      result.truncated = false;
      break;
    }
    seq.push_back(best_tok);
    if (step + 1 < max_steps) {
      auto [next_state, next_row] = detail::decoder_advance<T>(params, state,
                                                               best_tok);
      state = std::move(next_state);
      row = std::move(next_row);
    }
  }
  result.phonemes = detail::to_phonemes<T>(seq, vocab);
  result.log_prob = static_cast<double>(score);
  return result;
}

}  // namespace mtlg2p::decode

#endif  // MTLG2P_DECODE_DECODER_HPP
