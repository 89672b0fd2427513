// mtlg2p/error.hpp

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

#ifndef MTLG2P_ERROR_HPP
#define MTLG2P_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mtlg2p {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor dimension mismatches; the message names the offending shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An index (token id, tensor coordinate) is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file contents; carries file and line context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failures (open/read/write).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint decoding failures (magic, manifest, shapes, truncation).
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtlg2p

#endif  // MTLG2P_ERROR_HPP
