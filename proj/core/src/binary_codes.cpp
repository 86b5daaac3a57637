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

#include "cbe/binary_codes.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "cbe/errors.hpp"

namespace cbe {

void pack_signs(std::span<const double> projections,
                std::span<std::uint8_t> row) {
  if (row.size() != bytes_for_bits(projections.size())) {
    throw InvalidArgument("pack_signs: row has " + std::to_string(row.size()) +
                          " bytes, need " +
                          std::to_string(bytes_for_bits(projections.size())));
  }
  std::fill(row.begin(), row.end(), std::uint8_t{0});
  for (std::size_t j = 0; j < projections.size(); ++j) {
    // sign(0) = +1
    if (projections[j] >= 0.0) {
      row[j >> 3] |= static_cast<std::uint8_t>(1u << (j & 7));
    }
  }
}

std::size_t hamming_distance(std::span<const std::uint8_t> a,
                             std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("hamming_distance: code lengths differ");
  }
  std::size_t total = 0;
  std::size_t i = 0;
  for (; i + 8 <= a.size(); i += 8) {
    std::uint64_t wa;
    std::uint64_t wb;
    std::memcpy(&wa, a.data() + i, 8);
    std::memcpy(&wb, b.data() + i, 8);
    total += static_cast<std::size_t>(std::popcount(wa ^ wb));
  }
  for (; i < a.size(); ++i) {
    total += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
  }
  return total;
}

BinaryCodes::BinaryCodes(std::size_t n, std::size_t k)
    : n_(n), k_(k), stride_(bytes_for_bits(k)), data_(n * stride_, 0) {
  if (k == 0) throw InvalidArgument("BinaryCodes: k must be positive");
}

BinaryCodes::BinaryCodes(std::size_t n, std::size_t k,
                         std::vector<std::uint8_t> packed)
    : n_(n), k_(k), stride_(bytes_for_bits(k)), data_(std::move(packed)) {
  if (k == 0) throw InvalidArgument("BinaryCodes: k must be positive");
  if (data_.size() != n * stride_) {
    throw SizeMismatchError("BinaryCodes: expected " +
                            std::to_string(n * stride_) + " bytes, got " +
                            std::to_string(data_.size()));
  }
  if (k % 8 != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xFFu << (k % 8));
    for (std::size_t i = 0; i < n; ++i) {
      if (data_[i * stride_ + stride_ - 1] & pad_mask) {
        throw PaddingError("BinaryCodes: nonzero pad bits in row " +
                           std::to_string(i));
      }
    }
  }
}

std::span<std::uint8_t> BinaryCodes::row(std::size_t i) {
  if (i >= n_) {
    throw InvalidArgument("BinaryCodes: row " + std::to_string(i) +
                          " out of range (n=" + std::to_string(n_) + ")");
  }
  return {data_.data() + i * stride_, stride_};
}

std::span<const std::uint8_t> BinaryCodes::row(std::size_t i) const {
  if (i >= n_) {
    throw InvalidArgument("BinaryCodes: row " + std::to_string(i) +
                          " out of range (n=" + std::to_string(n_) + ")");
  }
  return {data_.data() + i * stride_, stride_};
}

bool BinaryCodes::bit(std::size_t i, std::size_t j) const {
  if (j >= k_) throw InvalidArgument("BinaryCodes: bit index out of range");
  return (row(i)[j >> 3] >> (j & 7)) & 1u;
}

std::size_t BinaryCodes::hamming(std::size_t i, std::size_t j) const {
  return hamming_distance(row(i), row(j));
}

}  // namespace cbe
