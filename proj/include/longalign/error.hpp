// include/longalign/error.hpp

// Copyright 2026  The longalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LONGALIGN_ERROR_HPP_
#define LONGALIGN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace longalign {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated input files (emission matrices, token tables,
/// romanization tables, manifests).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// No CTC path collapses to the target within the available frames, or every
/// such path has probability zero.
class UnalignableError : public Error {
 public:
  using Error::Error;
};

/// Alignment whose frames were all absorbed by the star token, leaving nothing
/// to score.
class DegenerateAlignmentError : public Error {
 public:
  using Error::Error;
};

/// Raised by the pipeline driver; carries the failing stage and record.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string record_id, const std::string& what)
      : Error("[" + stage + "] " + (record_id.empty() ? "" : record_id + ": ") + what),
        stage_(std::move(stage)),
        record_id_(std::move(record_id)) {}

  const std::string& stage() const { return stage_; }
  const std::string& record_id() const { return record_id_; }

 private:
  std::string stage_;
  std::string record_id_;
};

}  // namespace longalign

#endif  // LONGALIGN_ERROR_HPP_
