// Copyright 2026 The CBE Authors.
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

namespace cbe {

// Precondition violated by the caller (bad shape, bad size, bad flag value).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Problems with input data: unreadable files, malformed formats.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// File ends before the header or the declared payload is complete.
class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Header-declared payload size disagrees with the bytes present.
class SizeMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Nonzero pad bits in a packed code row.
class PaddingError : public FormatError {
 public:
  using FormatError::FormatError;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A per-frequency subproblem has no finite minimizer (e.g. lambda = 0 with a
// non-positive effective quadratic coefficient).
class UnboundedObjectiveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace cbe
