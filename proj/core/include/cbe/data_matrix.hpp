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

// n x d row-major matrix of 32-bit floats.
class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(std::size_t rows, std::size_t cols);
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<float> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  float& operator()(std::size_t i, std::size_t j) {
    return values_[i * cols_ + j];
  }
  float operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  const std::vector<float>& values() const { return values_; }

  // Largest | ||row||_2 - 1 | over all rows.
  double max_norm_deviation() const;
  bool is_unit_normalized(double tol = 1e-5) const {
    return max_norm_deviation() <= tol;
  }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

// Scales every row to unit l2 norm (in double, rounded back to float). Throws
// InvalidArgument listing the indices of all-zero rows.
DataMatrix normalize_rows(const DataMatrix& m);

// i.i.d. standard normal rows, then row-normalized.
DataMatrix synth_gaussian(std::size_t n, std::size_t d, std::uint64_t seed);

// Row i belongs to cluster i mod n_clusters: a unit-sphere center plus
// Gaussian noise of total norm ~spread, then row-normalized.
DataMatrix synth_clustered(std::size_t n, std::size_t d,
                           std::size_t n_clusters, double spread,
                           std::uint64_t seed);

// Widens one row to double.
std::vector<double> to_double(std::span<const float> row);

}  // namespace cbe
