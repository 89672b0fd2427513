// mtlg2p/log.hpp

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

#ifndef MTLG2P_LOG_HPP
#define MTLG2P_LOG_HPP

#include <sstream>
#include <string>

namespace mtlg2p::logging {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

/// Active threshold, read once from the MTLG2P_LOG environment variable
/// (error|warn|info|debug or 0..3; default info).
Level threshold();

void set_threshold(Level level);

bool enabled(Level level);

/// Writes one line to stderr. Log output never goes to files the toolkit
/// produces, so run artifacts stay byte-deterministic.
void write(Level level, const std::string& message);

}  // namespace mtlg2p::logging

#define MTLG2P_LOG_AT(level, expr)                                  \
  do {                                                              \
    if (::mtlg2p::logging::enabled(level)) {                        \
      std::ostringstream mtlg2p_log_os_;                            \
      mtlg2p_log_os_ << expr;                                       \
      ::mtlg2p::logging::write(level, mtlg2p_log_os_.str());        \
    }                                                               \
  } while (0)

#define MTLG2P_ERROR(expr) MTLG2P_LOG_AT(::mtlg2p::logging::Level::kError, expr)
#define MTLG2P_WARN(expr) MTLG2P_LOG_AT(::mtlg2p::logging::Level::kWarn, expr)
#define MTLG2P_INFO(expr) MTLG2P_LOG_AT(::mtlg2p::logging::Level::kInfo, expr)
#define MTLG2P_DEBUG(expr) MTLG2P_LOG_AT(::mtlg2p::logging::Level::kDebug, expr)

#endif  // MTLG2P_LOG_HPP
