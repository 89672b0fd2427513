// mtlg2p/train/trainer.hpp

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

#ifndef MTLG2P_TRAIN_TRAINER_HPP
#define MTLG2P_TRAIN_TRAINER_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mtlg2p/lexicon/batch.hpp"
#include "mtlg2p/log.hpp"
#include "mtlg2p/metrics/scoring.hpp"
#include "mtlg2p/model/checkpoint.hpp"
#include "mtlg2p/model/network.hpp"
#include "mtlg2p/numcore/optim.hpp"

namespace mtlg2p::train {

/// The training recipe: batches of 25, initial learning rate 0.007 halved
/// after five validation checks without improvement, early stop when the
/// rate falls below 1e-5. One validation check runs per epoch.
struct TrainConfig {
  std::size_t batch_size = 25;
  double lr_initial = 0.007;
  double lr_floor = 0.00001;
  std::size_t patience_checks = 5;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 1;
  std::optional<double> clip_max_norm = 5.0;

  void validate() const {
    if (batch_size == 0) throw ContractError("batch_size must be >= 1");
    if (patience_checks == 0) throw ContractError("patience must be >= 1");
    if (lr_initial <= 0.0 || lr_floor <= 0.0) {
      throw ContractError("learning rates must be positive");
    }
    // lr_initial <= lr_floor is allowed as the degenerate case: fit() stops
    // before the first epoch.
  }
};

struct ValidationResult {
  double decoder_loss = 0.0;
  double classifier_loss = 0.0;
  double total_loss = 0.0;
  metrics::ClassifierMetrics cls;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_decoder_loss = 0.0;
  double valid_classifier_loss = 0.0;
  double valid_total_loss = 0.0;
  double lr = 0.0;  // rate used during this epoch
  metrics::ClassifierMetrics cls;
};

struct TrainState {
  std::size_t epoch = 0;
  double lr = 0.0;
  double best_valid = std::numeric_limits<double>::infinity();
  std::size_t checks_since_best = 0;
  std::size_t halvings = 0;
  std::vector<EpochRecord> history;
};

/// One validation check: strict improvement resets the patience counter and
/// updates the best; otherwise the counter increments and, at patience, the
/// learning rate halves (the counter resets, the best persists). Returns
/// whether a halving happened.
inline bool lr_schedule_update(TrainState& state, double new_valid_total,
                               const TrainConfig& config) {
  if (new_valid_total < state.best_valid) {
    state.best_valid = new_valid_total;
    state.checks_since_best = 0;
    return false;
  }
  ++state.checks_since_best;
  if (state.checks_since_best >= config.patience_checks) {
    state.lr /= 2.0;
    ++state.halvings;
    state.checks_since_best = 0;
    return true;
  }
  return false;
}

/// Appends one epoch record as a JSON line. Lives in runlog.cpp; output is
/// timestamp-free so identical runs produce identical logs.
class RunLog {
 public:
  RunLog() = default;
  explicit RunLog(const std::string& path,
                  const std::vector<std::string>& header_lines = {});
  bool open() const { return !path_.empty(); }
  void append_epoch(const EpochRecord& record) const;
  void append_stop(const std::string& reason, std::size_t epochs,
                   double best_valid) const;

 private:
  std::string path_;
};

/// Scalar mirror of the tensor-level loss combination.
inline double combine_scalar(double decoder_loss, double classifier_loss,
                             const model::LossMode& mode) {
  if (!mode.weighted) return decoder_loss + classifier_loss;
  return mode.alpha * decoder_loss + (1.0 - mode.alpha) * classifier_loss;
}

/// One pass over the training data: forward, backward, optional global-norm
/// clip, SGD update per batch. Returns the mean per-batch total loss.
template <typename T>
double train_epoch(const model::ModelParams<T>& params,
                   const std::vector<lexicon::EncodedExample>& examples,
                   const model::ModelConfig& model_config,
                   const TrainConfig& config, std::size_t epoch, double lr) {
  using namespace numcore;
  const auto batches =
      lexicon::batch_examples(examples, config.batch_size, config.seed, epoch);
  Rng dropout_rng(derive_seed(derive_seed(config.seed, "dropout"),
                              static_cast<std::uint64_t>(epoch)));
  auto tensors = params.tensors();

  double loss_sum = 0.0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    Tape<T> tape;
    auto fwd = model::forward_batch(&tape, params, model_config, batches[b],
                                    model::RunMode::kTrain, &dropout_rng);
    const double loss_value = static_cast<double>(fwd.total_loss.item());
    if (!std::isfinite(loss_value)) {
      throw Error("non-finite training loss at epoch " + std::to_string(epoch) +
                  ", batch " + std::to_string(b));
    }
    loss_sum += loss_value;
    tape.backward(fwd.total_loss);
    if (config.clip_max_norm.has_value()) {
      clip_global_norm<T>(tensors, static_cast<T>(*config.clip_max_norm));
    }
    sgd_step<T>(tensors, static_cast<T>(lr));
  }
  return loss_sum / static_cast<double>(batches.size());
}

/// Deterministic evaluation pass: losses aggregated over all unmasked
/// tokens/items (not per-batch means), plus classifier metrics at 0.5.
template <typename T>
ValidationResult validate(const model::ModelParams<T>& params,
                          const std::vector<lexicon::EncodedExample>& examples,
                          const model::ModelConfig& model_config,
                          const TrainConfig& config) {
  if (examples.empty()) {
    throw ContractError("validation requires a non-empty example set");
  }
  const auto batches = lexicon::batch_in_order(examples, config.batch_size);

  double nll_sum = 0.0, bce_sum = 0.0;
  std::size_t tokens = 0, items = 0;
  std::vector<double> probs;
  std::vector<std::uint8_t> labels;
  probs.reserve(examples.size());
  labels.reserve(examples.size());

  for (const auto& batch : batches) {
    auto fwd = model::forward_batch<T>(nullptr, params, model_config, batch,
                                       model::RunMode::kEval, nullptr);
    nll_sum += static_cast<double>(fwd.decoder_loss.item()) *
               static_cast<double>(fwd.unmasked_tokens);
    tokens += fwd.unmasked_tokens;
    bce_sum += static_cast<double>(fwd.classifier_loss.item()) *
               static_cast<double>(batch.size);
    items += batch.size;
    for (std::size_t i = 0; i < batch.size; ++i) {
      probs.push_back(static_cast<double>(fwd.probabilities.values()[i]));
      labels.push_back(batch.labels[i]);
    }
  }

  ValidationResult result;
  result.decoder_loss = nll_sum / static_cast<double>(tokens);
  result.classifier_loss = bce_sum / static_cast<double>(items);
  result.total_loss = combine_scalar(result.decoder_loss,
                                     result.classifier_loss, model_config.loss);
  result.cls = metrics::classifier_metrics(probs, labels, 0.5);
  return result;
}

struct FitOutputs {
  std::string run_log_path;
  std::string best_checkpoint_path;
  std::string final_checkpoint_path;
  std::vector<std::string> run_log_header;
};

/// The full training loop: epochs of train_epoch + validate + the halving
/// schedule, stopping when the learning rate drops below the floor or the
/// epoch cap is reached. Saves the best-validation and final checkpoints
/// when paths are configured. Never updates parameters after lr < floor.
template <typename T>
TrainState fit(const model::ModelParams<T>& params,
               const std::vector<lexicon::EncodedExample>& train_examples,
               const std::vector<lexicon::EncodedExample>& valid_examples,
               const model::ModelConfig& model_config,
               const TrainConfig& config,
               const lexicon::Vocabulary& vocab,
               const FitOutputs& outputs = {}) {
  config.validate();
  model_config.validate();
  if (train_examples.empty()) {
    throw ContractError("fit requires a non-empty train set");
  }

  RunLog run_log(outputs.run_log_path, outputs.run_log_header);
  TrainState state;
  state.lr = config.lr_initial;

  std::string stop_reason = "max_epochs";
  if (state.lr < config.lr_floor) {
    stop_reason = "lr_below_floor";
  } else {
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
      const double epoch_lr = state.lr;
      const double train_loss = train_epoch(params, train_examples,
                                            model_config, config, epoch,
                                            epoch_lr);
      const ValidationResult v =
          validate(params, valid_examples, model_config, config);

      EpochRecord record;
      record.epoch = epoch;
      record.train_loss = train_loss;
      record.valid_decoder_loss = v.decoder_loss;
      record.valid_classifier_loss = v.classifier_loss;
      record.valid_total_loss = v.total_loss;
      record.lr = epoch_lr;
      record.cls = v.cls;
      state.history.push_back(record);
      state.epoch = epoch;
      run_log.append_epoch(record);
      MTLG2P_INFO("epoch " << epoch << " lr " << epoch_lr << " train "
                           << train_loss << " valid " << v.total_loss
                           << " (dec " << v.decoder_loss << ", cls "
                           << v.classifier_loss << ") acc " << v.cls.accuracy);

      const bool improved = v.total_loss < state.best_valid;
      if (improved && !outputs.best_checkpoint_path.empty()) {
        model::save_checkpoint(outputs.best_checkpoint_path, params,
                               model_config, vocab);
      }
      lr_schedule_update(state, v.total_loss, config);
      if (state.lr < config.lr_floor) {
        stop_reason = "lr_below_floor";
        break;
      }
    }
  }

  if (!outputs.final_checkpoint_path.empty()) {
    model::save_checkpoint(outputs.final_checkpoint_path, params, model_config,
                           vocab);
    // A run that stops before the first validation check still leaves a
    // usable best checkpoint.
    if (state.history.empty() && !outputs.best_checkpoint_path.empty()) {
      model::save_checkpoint(outputs.best_checkpoint_path, params,
                             model_config, vocab);
    }
  }
  run_log.append_stop(stop_reason, state.epoch, state.best_valid);
  MTLG2P_INFO("training stopped (" << stop_reason << ") after " << state.epoch
                                   << " epochs, best validation loss "
                                   << state.best_valid);
  return state;
}

}  // namespace mtlg2p::train

#endif  // MTLG2P_TRAIN_TRAINER_HPP
