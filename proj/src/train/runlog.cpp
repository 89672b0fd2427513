// mtlg2p/train/runlog.cpp

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

#include <fstream>

#include <json.hpp>

#include "mtlg2p/error.hpp"
#include "mtlg2p/train/trainer.hpp"

namespace mtlg2p::train {

namespace {

void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open run log for appending: " + path);
  out << line << '\n';
  if (!out) throw IoError("failed writing run log: " + path);
}

}  // namespace

RunLog::RunLog(const std::string& path,
               const std::vector<std::string>& header_lines)
    : path_(path) {
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open run log for writing: " + path_);
  for (const auto& line : header_lines) out << line << '\n';
  if (!out) throw IoError("failed writing run log: " + path_);
}

void RunLog::append_epoch(const EpochRecord& r) const {
  if (!open()) return;
  nlohmann::json j;
  j["event"] = "epoch";
  j["epoch"] = r.epoch;
  j["train_loss"] = r.train_loss;
  j["valid_decoder_loss"] = r.valid_decoder_loss;
  j["valid_classifier_loss"] = r.valid_classifier_loss;
  j["valid_total_loss"] = r.valid_total_loss;
  j["lr"] = r.lr;
  j["accuracy"] = r.cls.accuracy;
  j["precision"] = r.cls.precision;
  j["recall"] = r.cls.recall;
  j["f1"] = r.cls.f1;
  append_line(path_, j.dump());
}

void RunLog::append_stop(const std::string& reason, std::size_t epochs,
                         double best_valid) const {
  if (!open()) return;
  nlohmann::json j;
  j["event"] = "stop";
  j["reason"] = reason;
  j["epochs"] = epochs;
  if (std::isfinite(best_valid)) j["best_valid_total_loss"] = best_valid;
  append_line(path_, j.dump());
}

}  // namespace mtlg2p::train
