// mtlg2p/decode/dictionary.cpp

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

#include "mtlg2p/decode/dictionary.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "mtlg2p/error.hpp"

namespace mtlg2p::decode {

namespace {

std::string format_probability(double p) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", p);
  return buffer;
}

}  // namespace

void write_dictionary_tsv(const std::string& path,
                          const DictionaryResult& result, bool emit_flags,
                          const std::string& metadata_header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open dictionary for writing: " + path);
  if (!metadata_header.empty()) out << "# " << metadata_header << '\n';
  for (const auto& row : result.rows) {
    if (!row.ok) continue;
    out << row.word << '\t';
    for (std::size_t i = 0; i < row.phonemes.size(); ++i) {
      if (i) out << ' ';
      out << row.phonemes[i];
    }
    if (emit_flags) {
      out << '\t' << format_probability(row.anglicism_prob) << '\t'
          << (row.flag ? '1' : '0');
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing dictionary: " + path);
}

void write_skip_report(const std::string& path,
                       const DictionaryResult& result) {
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& row : result.rows) {
    if (row.ok) continue;
    skipped.push_back({{"word", row.word}, {"reason", row.skip_reason}});
  }
  nlohmann::json report;
  report["emitted"] = result.emitted;
  report["skipped"] = result.skipped;
  report["words"] = std::move(skipped);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open skip report for writing: " + path);
  out << report.dump(2) << '\n';
  if (!out) throw IoError("failed writing skip report: " + path);
}

}  // namespace mtlg2p::decode
