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

// Binary file formats. All integers and floats are little-endian.
//
//   matrix  "CBEM" u32 version=1, u64 n, u64 d, n*d f32 row-major
//   codes   "CBEC" u32 version=1, u64 n, u64 k, n*ceil(k/8) bytes, LSB-first,
//           zero pad bits
//   params  "CBEP" u32 version=1, u32 method, u64 d, u64 k, u64 seed, then a
//           method-specific payload (see io.cpp)
//
// Readers throw BadMagicError, VersionError, TruncatedError (file ends before
// the header or declared payload is complete), SizeMismatchError (bytes left
// over after the declared payload, or an impossible declared size) or
// PaddingError. Nothing is returned on failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "cbe/binary_codes.hpp"
#include "cbe/data_matrix.hpp"
#include "cbe/encoders.hpp"
#include "cbe/optimizer.hpp"

namespace cbe {

inline constexpr std::uint32_t kFormatVersion = 1;

DataMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const DataMatrix& m);

BinaryCodes read_codes(const std::filesystem::path& path);
void write_codes(const std::filesystem::path& path, const BinaryCodes& codes);

struct ParamsFile {
  Method method = Method::kCbeRand;
  std::uint64_t seed = 0;
  EncoderParams params;

  std::size_t dim() const;
  std::size_t bits() const;
  friend bool operator==(const ParamsFile&, const ParamsFile&) = default;
};

ParamsFile read_params(const std::filesystem::path& path);
void write_params(const std::filesystem::path& path, const ParamsFile& file);

// Text format:
//   [similar]
//   0 5
//   [dissimilar]
//   3 9
// Blank lines and lines starting with '#' are ignored.
PairConstraints parse_constraints(std::istream& in, const std::string& source);
PairConstraints read_constraints(const std::filesystem::path& path);

}  // namespace cbe
