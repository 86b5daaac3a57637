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

#include "cbe/data_matrix.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "cbe/errors.hpp"
#include "cbe/rng.hpp"

namespace cbe {

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0f) {}

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols,
                       std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw InvalidArgument("DataMatrix: " + std::to_string(values_.size()) +
                          " values for shape " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
}

double DataMatrix::max_norm_deviation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double sq = 0.0;
    for (float v : row(i)) sq += static_cast<double>(v) * v;
    worst = std::max(worst, std::abs(std::sqrt(sq) - 1.0));
  }
  return worst;
}

DataMatrix normalize_rows(const DataMatrix& m) {
  DataMatrix out = m;
  std::vector<std::size_t> zero_rows;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sq = 0.0;
    for (float v : m.row(i)) sq += static_cast<double>(v) * v;
    if (sq == 0.0) {
      zero_rows.push_back(i);
      continue;
    }
    const double inv = 1.0 / std::sqrt(sq);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) {
      dst[j] = static_cast<float>(static_cast<double>(dst[j]) * inv);
    }
  }
  if (!zero_rows.empty()) {
    std::ostringstream msg;
    msg << "normalize_rows: zero rows at indices";
    for (std::size_t i = 0; i < zero_rows.size() && i < 20; ++i) {
      msg << ' ' << zero_rows[i];
    }
    if (zero_rows.size() > 20) msg << " ... (" << zero_rows.size() << " total)";
    throw InvalidArgument(msg.str());
  }
  return out;
}

DataMatrix synth_gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) {
    throw InvalidArgument("synth_gaussian: n and d must be positive");
  }
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> normal;
  DataMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : m.row(i)) v = static_cast<float>(normal(rng));
  }
  return normalize_rows(m);
}

DataMatrix synth_clustered(std::size_t n, std::size_t d,
                           std::size_t n_clusters, double spread,
                           std::uint64_t seed) {
  if (n == 0 || d == 0 || n_clusters == 0) {
    throw InvalidArgument("synth_clustered: n, d, n_clusters must be positive");
  }
  if (n_clusters > n) {
    throw InvalidArgument("synth_clustered: n_clusters (" +
                          std::to_string(n_clusters) + ") > n (" +
                          std::to_string(n) + ")");
  }
  if (!(spread >= 0.0) || !std::isfinite(spread)) {
    throw InvalidArgument("synth_clustered: spread must be finite and >= 0");
  }
  Rng rng = make_rng(seed, 1);
  std::normal_distribution<double> normal;

  std::vector<double> centers(n_clusters * d);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    double sq = 0.0;
    do {
      sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double v = normal(rng);
        centers[c * d + j] = v;
        sq += v * v;
      }
    } while (sq == 0.0);
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < d; ++j) centers[c * d + j] *= inv;
  }

  const double noise_scale = spread / std::sqrt(static_cast<double>(d));
  DataMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % n_clusters;
    auto dst = m.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double noise = spread > 0.0 ? noise_scale * normal(rng) : 0.0;
      dst[j] = static_cast<float>(centers[c * d + j] + noise);
    }
  }
  return normalize_rows(m);
}

std::vector<double> to_double(std::span<const float> row) {
  return {row.begin(), row.end()};
}

}  // namespace cbe
