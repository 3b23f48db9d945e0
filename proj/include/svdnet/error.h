// Copyright 2026-present the svdnet authors
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

namespace svdnet {

//! Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Malformed input: shape mismatch, out-of-range label, non-finite entry.
class ValidationError : public Error {
 public:
  using Error::Error;
};

//! An iterative routine failed to converge or produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

//! The input is mathematically degenerate for the requested operation.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace svdnet
