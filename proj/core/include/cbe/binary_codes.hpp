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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbe {

constexpr std::size_t bytes_for_bits(std::size_t k) { return (k + 7) / 8; }

// Bit j of a row lives in byte j/8 at position j%8 (LSB first). Bit 1 encodes
// +1, bit 0 encodes -1. Pad bits past k are always zero, so the Hamming
// distance is the popcount of the byte-wise XOR.
void pack_signs(std::span<const double> projections, std::span<std::uint8_t> row);

std::size_t hamming_distance(std::span<const std::uint8_t> a,
                             std::span<const std::uint8_t> b);

// n packed k-bit codes, row-major.
class BinaryCodes {
 public:
  BinaryCodes() = default;
  BinaryCodes(std::size_t n, std::size_t k);
  // Takes ownership of packed bytes; throws PaddingError if any pad bit is set.
  BinaryCodes(std::size_t n, std::size_t k, std::vector<std::uint8_t> packed);

  std::size_t size() const { return n_; }
  std::size_t bits() const { return k_; }
  std::size_t bytes_per_code() const { return stride_; }

  std::span<std::uint8_t> row(std::size_t i);
  std::span<const std::uint8_t> row(std::size_t i) const;
  const std::vector<std::uint8_t>& bytes() const { return data_; }

  bool bit(std::size_t i, std::size_t j) const;
  std::size_t hamming(std::size_t i, std::size_t j) const;

  friend bool operator==(const BinaryCodes&, const BinaryCodes&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace cbe
