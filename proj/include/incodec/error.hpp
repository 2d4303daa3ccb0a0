// Copyright 2026 The incodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace incodec {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (shape mismatch, bad argument).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A computation produced NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Bitstream is malformed or truncated.
class CorruptStream : public Error {
 public:
  using Error::Error;
};

// A model bank or predictor required by the stream or config is not loaded.
class MissingModel : public Error {
 public:
  MissingModel(int bank_id, const std::string& what)
      : Error(what), bank_id_(bank_id) {}
  int bank_id() const { return bank_id_; }

 private:
  int bank_id_;
};

// Training loss became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(long step, const std::string& what)
      : Error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace incodec
