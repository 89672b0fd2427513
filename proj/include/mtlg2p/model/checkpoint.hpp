// mtlg2p/model/checkpoint.hpp

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

#ifndef MTLG2P_MODEL_CHECKPOINT_HPP
#define MTLG2P_MODEL_CHECKPOINT_HPP

#include <optional>
#include <string>

#include "mtlg2p/lexicon/vocab.hpp"
#include "mtlg2p/model/params.hpp"

// Checkpoint file layout:
//   8-byte magic "MTLG2P01"
//   uint64 little-endian manifest byte length
//   UTF-8 JSON manifest: config, precision tag ("f32"/"f64"), ordered tensor
//     names + shapes, and both vocabularies
//   raw tensor payloads, little-endian IEEE-754, concatenated in manifest
//     order
// Writing is deterministic, so save -> load -> save is byte-identical.

namespace mtlg2p::model {

inline constexpr const char kCheckpointMagic[9] = "MTLG2P01";

template <typename T>
constexpr const char* precision_tag();
template <>
constexpr const char* precision_tag<float>() { return "f32"; }
template <>
constexpr const char* precision_tag<double>() { return "f64"; }

template <typename T>
void save_checkpoint(const std::string& path, const ModelParams<T>& params,
                     const ModelConfig& config,
                     const lexicon::Vocabulary& vocab);

/// A loaded model bundle; exactly one of the params members is set,
/// according to `precision`.
struct LoadedCheckpoint {
  std::string precision;
  ModelConfig config;
  lexicon::Vocabulary vocab;
  std::optional<ModelParams<float>> params_f32;
  std::optional<ModelParams<double>> params_f64;
};

/// Throws CheckpointError with a distinct message for a bad magic, an
/// unreadable manifest, a tensor list that does not match the config
/// (naming the tensor), or a truncated payload.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace mtlg2p::model

#endif  // MTLG2P_MODEL_CHECKPOINT_HPP
