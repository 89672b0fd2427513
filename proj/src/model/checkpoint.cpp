// mtlg2p/model/checkpoint.cpp

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

#include "mtlg2p/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtlg2p/error.hpp"

namespace mtlg2p::model {

namespace {

using nlohmann::json;

json config_to_json(const ModelConfig& config) {
  json j;
  j["embed_dim"] = config.embed_dim;
  j["hidden_dim"] = config.hidden_dim;
  j["layers"] = config.layers;
  j["grapheme_vocab"] = config.grapheme_vocab;
  j["phoneme_vocab"] = config.phoneme_vocab;
  j["cls_hidden1"] = config.cls_hidden1;
  j["cls_hidden2"] = config.cls_hidden2;
  j["dropout"] = config.dropout;
  j["prelu_alpha"] = config.prelu_alpha;
  j["loss_weighted"] = config.loss.weighted;
  j["loss_alpha"] = config.loss.alpha;
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig config;
  config.embed_dim = j.at("embed_dim").get<std::size_t>();
  config.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  config.layers = j.at("layers").get<std::size_t>();
  config.grapheme_vocab = j.at("grapheme_vocab").get<std::size_t>();
  config.phoneme_vocab = j.at("phoneme_vocab").get<std::size_t>();
  config.cls_hidden1 = j.at("cls_hidden1").get<std::size_t>();
  config.cls_hidden2 = j.at("cls_hidden2").get<std::size_t>();
  config.dropout = j.at("dropout").get<double>();
  config.prelu_alpha = j.at("prelu_alpha").get<double>();
  config.loss.weighted = j.at("loss_weighted").get<bool>();
  config.loss.alpha = j.at("loss_alpha").get<double>();
  return config;
}

void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

template <typename T>
void append_scalar_le(std::string& out, T value) {
  if constexpr (sizeof(T) == 4) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  } else {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    append_u64_le(out, bits);
  }
}

template <typename T>
T read_scalar_le(const unsigned char* p) {
  if constexpr (sizeof(T) == 4) {
    std::uint32_t bits = 0;
    for (int i = 3; i >= 0; --i) bits = (bits << 8) | p[i];
    return std::bit_cast<T>(bits);
  } else {
    return std::bit_cast<T>(read_u64_le(p));
  }
}

template <typename T>
json manifest_for(const ModelParams<T>& params, const ModelConfig& config,
                  const lexicon::Vocabulary& vocab) {
  json manifest;
  manifest["config"] = config_to_json(config);
  manifest["precision"] = precision_tag<T>();
  json tensors = json::array();
  for (const auto& [name, tensor] : params.named()) {
    json entry;
    entry["name"] = name;
    entry["shape"] = tensor.shape();
    tensors.push_back(std::move(entry));
  }
  manifest["tensors"] = std::move(tensors);
  manifest["vocab"] = {{"graphemes", vocab.grapheme_symbols},
                       {"phonemes", vocab.phoneme_symbols}};
  return manifest;
}

template <typename T>
ModelParams<T> read_params(const std::string& bytes, std::size_t offset,
                           const ModelConfig& config, const json& tensor_list,
                           const std::string& path) {
  const auto expected = expected_tensor_layout(config);
  if (tensor_list.size() != expected.size()) {
    throw CheckpointError(path + ": manifest lists " +
                          std::to_string(tensor_list.size()) +
                          " tensors, expected " +
                          std::to_string(expected.size()));
  }
  std::vector<numcore::Tensor<T>> tensors;
  tensors.reserve(expected.size());
  std::size_t pos = offset;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& entry = tensor_list.at(i);
    const std::string name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<numcore::Shape>();
    if (name != expected[i].first) {
      throw CheckpointError(path + ": tensor " + std::to_string(i) +
                            " is named '" + name + "', expected '" +
                            expected[i].first + "'");
    }
    if (shape != expected[i].second) {
      throw CheckpointError(path + ": tensor '" + name + "' has shape " +
                            numcore::shape_to_string(shape) + ", expected " +
                            numcore::shape_to_string(expected[i].second));
    }
    const std::size_t count = numcore::shape_numel(shape);
    const std::size_t bytes_needed = count * sizeof(T);
    if (pos + bytes_needed > bytes.size()) {
      throw CheckpointError(path + ": truncated payload while reading tensor '" +
                            name + "'");
    }
    std::vector<T> values(count);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
    for (std::size_t k = 0; k < count; ++k) {
      values[k] = read_scalar_le<T>(p + k * sizeof(T));
    }
    pos += bytes_needed;
    tensors.push_back(
        numcore::Tensor<T>::from_data(shape, std::move(values)));
  }
  if (pos != bytes.size()) {
    throw CheckpointError(path + ": " + std::to_string(bytes.size() - pos) +
                          " trailing bytes after the last tensor");
  }
  return ModelParams<T>::from_tensors(config, tensors);
}

}  // namespace

template <typename T>
void save_checkpoint(const std::string& path, const ModelParams<T>& params,
                     const ModelConfig& config,
                     const lexicon::Vocabulary& vocab) {
  const std::string manifest = manifest_for(params, config, vocab).dump();

  std::string out;
  out.reserve(manifest.size() + params.total_values() * sizeof(T) + 16);
  out.append(kCheckpointMagic, 8);
  append_u64_le(out, manifest.size());
  out += manifest;
  for (const auto& [name, tensor] : params.named()) {
    for (T v : tensor.values()) append_scalar_le(out, v);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open checkpoint for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing checkpoint: " + path);
}

template void save_checkpoint<float>(const std::string&,
                                     const ModelParams<float>&,
                                     const ModelConfig&,
                                     const lexicon::Vocabulary&);
template void save_checkpoint<double>(const std::string&,
                                      const ModelParams<double>&,
                                      const ModelConfig&,
                                      const lexicon::Vocabulary&);

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open checkpoint: " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  const std::string bytes = buffer.str();

  if (bytes.size() < 16 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw CheckpointError(path + ": bad magic (not a checkpoint file)");
  }
  const std::uint64_t manifest_len = read_u64_le(
      reinterpret_cast<const unsigned char*>(bytes.data()) + 8);
  if (16 + manifest_len > bytes.size()) {
    throw CheckpointError(path + ": truncated manifest");
  }

  json manifest;
  try {
    manifest = json::parse(bytes.substr(16, manifest_len));
  } catch (const json::exception& e) {
    throw CheckpointError(path + ": unreadable manifest: " + e.what());
  }

  LoadedCheckpoint bundle;
  try {
    bundle.precision = manifest.at("precision").get<std::string>();
    bundle.config = config_from_json(manifest.at("config"));
    bundle.vocab = lexicon::Vocabulary::from_symbols(
        manifest.at("vocab").at("graphemes").get<std::vector<std::string>>(),
        manifest.at("vocab").at("phonemes").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw CheckpointError(path + ": manifest missing fields: " + e.what());
  }
  bundle.config.validate();
  if (bundle.vocab.grapheme_count() != bundle.config.grapheme_vocab ||
      bundle.vocab.phoneme_count() != bundle.config.phoneme_vocab) {
    throw CheckpointError(path + ": vocabulary sizes disagree with the config");
  }

  const std::size_t payload_offset = 16 + manifest_len;
  if (bundle.precision == "f32") {
    bundle.params_f32 = read_params<float>(bytes, payload_offset, bundle.config,
                                           manifest.at("tensors"), path);
  } else if (bundle.precision == "f64") {
    bundle.params_f64 = read_params<double>(
        bytes, payload_offset, bundle.config, manifest.at("tensors"), path);
  } else {
    throw CheckpointError(path + ": unknown precision tag '" +
                          bundle.precision + "'");
  }
  return bundle;
}

}  // namespace mtlg2p::model
