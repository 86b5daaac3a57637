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

// Slow, direct reference implementations used to check the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = std::vector<std::vector<double>>;

// X[l] = sum_m x[m] exp(-2 pi i l m / d); the inverse carries 1/d.
inline std::vector<Complex> dft(const std::vector<Complex>& x, bool inverse = false) {
  const std::size_t d = x.size();
  std::vector<Complex> out(d);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t l = 0; l < d; ++l) {
    Complex acc = 0.0;
    for (std::size_t m = 0; m < d; ++m) {
      const double angle =
          sign * 2.0 * std::numbers::pi * static_cast<double>((l * m) % d) /
          static_cast<double>(d);
      acc += x[m] * Complex(std::cos(angle), std::sin(angle));
    }
    out[l] = inverse ? acc / static_cast<double>(d) : acc;
  }
  return out;
}

inline std::vector<Complex> dft_real(const std::vector<double>& x) {
  return dft(std::vector<Complex>(x.begin(), x.end()));
}

// C[i][j] = r[(i - j) mod d].
inline Matrix circulant(const std::vector<double>& r) {
  const std::size_t d = r.size();
  Matrix c(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) c[i][j] = r[(i + d - j) % d];
  }
  return c;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

// Sylvester construction, H[i][j] = (-1)^popcount(i & j).
inline Matrix hadamard(std::size_t d) {
  Matrix h{{1.0}};
  while (h.size() < d) {
    const std::size_t s = h.size();
    Matrix next(2 * s, std::vector<double>(2 * s));
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        next[i][j] = h[i][j];
        next[i][j + s] = h[i][j];
        next[i + s][j] = h[i][j];
        next[i + s][j + s] = -h[i][j];
      }
    }
    h = std::move(next);
  }
  return h;
}

// Bit j of a code row, LSB-first.
inline bool bit(const std::vector<std::uint8_t>& code, std::size_t j) {
  return (code[j / 8] >> (j % 8)) & 1u;
}

// sign(C D x) computed with dense matrices; ambiguous[j] marks
// |projection| <= tol.
struct DenseCodes {
  std::vector<bool> bits;
  std::vector<bool> ambiguous;
};
inline DenseCodes dense_cbe(const std::vector<double>& r,
                            const std::vector<std::int8_t>& signs,
                            const std::vector<double>& x, std::size_t k,
                            double tol = 1e-9) {
  std::vector<double> dx(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) dx[j] = signs[j] * x[j];
  const auto proj = matvec(circulant(r), dx);
  DenseCodes out;
  for (std::size_t j = 0; j < k; ++j) {
    out.bits.push_back(proj[j] >= 0.0);
    out.ambiguous.push_back(std::abs(proj[j]) <= tol);
  }
  return out;
}

// Minimizes a 1-D function on [lo, hi]: dense grid, then repeated zooming
// around every grid local minimum.
inline double grid_min_1d(const std::function<double(double)>& f, double lo,
                          double hi, int points = 2001, int zooms = 60) {
  std::vector<double> values(points);
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) values[i] = f(lo + step * i);
  double best = values[0];
  for (double v : values) best = std::min(best, v);
  for (int i = 0; i < points; ++i) {
    const bool left = i == 0 || values[i] <= values[i - 1];
    const bool right = i == points - 1 || values[i] <= values[i + 1];
    if (!(left && right)) continue;
    double center = lo + step * i;
    double width = step;
    for (int z = 0; z < zooms; ++z) {
      double arg = center;
      double val = f(center);
      for (int s = -10; s <= 10; ++s) {
        const double t = center + width * s / 10.0;
        const double v = f(t);
        if (v < val) {
          val = v;
          arg = t;
        }
      }
      best = std::min(best, val);
      center = arg;
      width *= 0.5;
    }
  }
  return best;
}

// 2-D analogue over the square [-half, half]^2.
inline double grid_min_2d(const std::function<double(double, double)>& f, double half,
                          int points = 241, int zooms = 60) {
  const double step = 2.0 * half / (points - 1);
  std::vector<double> values(static_cast<std::size_t>(points) * points);
  auto at = [&](int i, int j) -> double& {
    return values[static_cast<std::size_t>(i) * points + j];
  };
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) at(i, j) = f(-half + step * i, -half + step * j);
  }
  std::vector<std::pair<double, std::pair<int, int>>> minima;
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) {
      bool local = true;
      for (int di = -1; di <= 1 && local; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di;
          const int b = j + dj;
          if (a < 0 || b < 0 || a >= points || b >= points) continue;
          if (at(a, b) < at(i, j)) {
            local = false;
            break;
          }
        }
      }
      if (local) minima.push_back({at(i, j), {i, j}});
    }
  }
  std::sort(minima.begin(), minima.end());
  if (minima.size() > 16) minima.resize(16);
  double best = minima.front().first;
  for (const auto& [value, ij] : minima) {
    double cx = -half + step * ij.first;
    double cy = -half + step * ij.second;
    double width = step;
    double val = value;
    for (int z = 0; z < zooms; ++z) {
      double bx = cx;
      double by = cy;
      for (int s = -6; s <= 6; ++s) {
        for (int t = -6; t <= 6; ++t) {
          const double x = cx + width * s / 6.0;
          const double y = cy + width * t / 6.0;
          const double v = f(x, y);
          if (v < val) {
            val = v;
            bx = x;
            by = y;
          }
        }
      }
      cx = bx;
      cy = by;
      width *= 0.5;
    }
    best = std::min(best, val);
  }
  return best;
}

// Exact g nearest rows by squared Euclidean distance, ties to the lower index.
inline std::vector<std::vector<std::uint32_t>> knn(const Matrix& db, const Matrix& queries,
                                                   std::size_t g) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& q : queries) {
    std::vector<std::pair<double, std::uint32_t>> dist;
    for (std::size_t i = 0; i < db.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) s += (db[i][j] - q[j]) * (db[i][j] - q[j]);
      dist.push_back({s, static_cast<std::uint32_t>(i)});
    }
    std::sort(dist.begin(), dist.end());
    std::vector<std::uint32_t> ids;
    for (std::size_t i = 0; i < g; ++i) ids.push_back(dist[i].second);
    out.push_back(ids);
  }
  return out;
}

// Recall@m where rows tied at a distance are ordered uniformly at random:
// a true neighbor with L strictly closer rows and E rows at its own distance
// is in the top m with probability clamp((m - L) / E, 0, 1).
inline double recall(const std::vector<std::vector<bool>>& db_bits,
                     const std::vector<std::vector<bool>>& q_bits,
                     const std::vector<std::vector<std::uint32_t>>& truth,
                     std::size_t m) {
  double total = 0.0;
  for (std::size_t q = 0; q < q_bits.size(); ++q) {
    std::vector<std::size_t> dist;
    for (const auto& row : db_bits) {
      std::size_t h = 0;
      for (std::size_t j = 0; j < row.size(); ++j) h += row[j] != q_bits[q][j];
      dist.push_back(h);
    }
    double hits = 0.0;
    for (auto t : truth[q]) {
      const auto closer = std::count_if(dist.begin(), dist.end(),
                                        [&](std::size_t v) { return v < dist[t]; });
      const auto tied = std::count(dist.begin(), dist.end(), dist[t]);
      const double p = (static_cast<double>(m) - closer) / static_cast<double>(tied);
      hits += std::clamp(p, 0.0, 1.0);
    }
    total += hits / static_cast<double>(truth[q].size());
  }
  return total / static_cast<double>(q_bits.size());
}

// ||B - X R^T||_F^2 + lambda ||R R^T - I||_F^2 with R = circ(r) built densely.
struct DenseObjective {
  double distortion = 0.0;
  double orthogonality = 0.0;
};
inline DenseObjective dense_objective(const std::vector<double>& r, const Matrix& x,
                                      const Matrix& b) {
  const auto c = circulant(r);
  const std::size_t d = r.size();
  DenseObjective out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto proj = matvec(c, x[i]);
    for (std::size_t j = 0; j < d; ++j) {
      out.distortion += (b[i][j] - proj[j]) * (b[i][j] - proj[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double dot = 0.0;
      for (std::size_t l = 0; l < d; ++l) dot += c[i][l] * c[j][l];
      const double e = dot - (i == j ? 1.0 : 0.0);
      out.orthogonality += e * e;
    }
  }
  return out;
}

}  // namespace oracle
