// mtlg2p/hash.hpp

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

#ifndef MTLG2P_HASH_HPP
#define MTLG2P_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace mtlg2p {

/// 64-bit FNV-1a over a byte string. Used for input-file content hashes in
/// run logs and for deriving named RNG sub-streams.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Content hash of a file, formatted as "fnv1a64:<hex>". Throws IoError if
/// the file cannot be read.
std::string hash_file(const std::string& path);

/// Hex rendering of a 64-bit hash.
std::string to_hex(std::uint64_t value);

}  // namespace mtlg2p

#endif  // MTLG2P_HASH_HPP
