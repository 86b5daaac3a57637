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

// Empirical harnesses: exact l2 ground truth, Hamming-ranking recall, the
// angle-estimator experiment for randomized circulant codes, and encode-time
// scaling.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbe/binary_codes.hpp"
#include "cbe/data_matrix.hpp"
#include "cbe/encoders.hpp"

namespace cbe {

using NeighborLists = std::vector<std::vector<std::uint32_t>>;

// The g nearest database rows per query by Euclidean distance, nearest first,
// ties broken by lower index.
NeighborLists ground_truth_knn(const DataMatrix& db, const DataMatrix& queries,
                               std::size_t g, unsigned threads = 1);

struct RecallCurve {
  std::string method;
  std::size_t bits = 0;
  std::vector<std::size_t> m_values;  // 1..m_max
  std::vector<double> recall_at_m;
  double encode_time_ns_per_point = std::numeric_limits<double>::quiet_NaN();

  // Recall at cutoff m (1-based).
  double at(std::size_t m) const { return recall_at_m.at(m - 1); }
};

// Ranks the database by Hamming distance to each query and averages
// |top-m ∩ truth| / |truth| over queries for m = 1..m_max. Rows tied at one
// distance count in expectation over a uniformly random order among them,
// which makes the curve independent of database row order.
RecallCurve recall_at_m(const BinaryCodes& codes_db, const BinaryCodes& codes_q,
                        const NeighborLists& truth, std::size_t m_max,
                        unsigned threads = 1);

// Unit vectors x = 1/sqrt(d) and y = cos(theta) x + sin(theta) a with a the
// normalized alternating-sign vector. Requires even d.
struct AnglePair {
  std::vector<double> x;
  std::vector<double> y;
  double rho = 0.0;  // max(||x||_inf, ||y||_inf)
};
AnglePair well_spread_pair(double theta, std::size_t d);

// (1/k)(theta/pi)(1 - theta/pi) + 32 rho.
double variance_bound(double theta, std::size_t k, double rho);

struct AngleStats {
  double theta = 0.0;
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  double mean_normalized_hamming = 0.0;
  double empirical_variance = 0.0;  // unbiased, over trials
  double rho = 0.0;

  double bound() const { return variance_bound(theta, k, rho); }
};

// Each trial draws fresh (r, D) from the trial's derived seed and records the
// fraction of differing bits between the codes of the well-spread pair.
AngleStats angle_experiment(double theta, std::size_t d, std::size_t k,
                            std::size_t trials, std::uint64_t seed,
                            unsigned threads = 1);

struct TimingRecord {
  std::string method;
  std::size_t d = 0;
  std::size_t k = 0;
  std::string metric;
  double value = 0.0;
};

struct TimingOptions {
  std::size_t reps = 5;
  std::size_t warmup = 3;
  // Dense projections larger than this are either timed with a resident
  // block of rows reused cyclically (same arithmetic, bounded memory) or
  // reported as an "oom" cell.
  std::size_t memory_budget_bytes = std::size_t{512} << 20;
  bool allow_cycled_rows = true;
  // Each timed rep encodes enough points to last at least this long.
  double min_rep_ns = 2e5;
  std::uint64_t seed = 0;
};

// Median single-threaded per-point encode time, warmup excluded.
double measure_encode_ns(const Encoder& encoder, const TimingOptions& options);

// Records per (method, d) with k = d: metric "ns_per_point" (median), plus
// "rows_resident" when the dense projection was cycled, or "oom" (value =
// bytes required) when it could not be timed.
std::vector<TimingRecord> timing_bench(std::span<const std::size_t> d_values,
                                       std::span<const Method> methods,
                                       const TimingOptions& options);

// Timing encoder for (method, d, k); nullptr when a dense projection does not
// fit the budget and cycling is disabled.
std::unique_ptr<Encoder> make_timing_encoder(Method method, std::size_t d,
                                             std::size_t k,
                                             const TimingOptions& options,
                                             std::size_t* rows_resident = nullptr);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
// Least squares fit of log(y) against log(x).
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct CalibrationPoint {
  std::size_t k = 0;
  double ns_per_point = 0.0;
};

// Measures encode time at each k (ascending). Stops after the first k whose
// time exceeds stop_above_ns, if given.
std::vector<CalibrationPoint> calibrate_bits(
    Method method, std::size_t d, std::span<const std::size_t> k_values,
    const TimingOptions& options,
    std::optional<double> stop_above_ns = std::nullopt);

inline constexpr std::size_t kMinCalibratedBits = 8;

// Largest calibrated k whose time fits the budget. Throws InvalidArgument if
// no calibrated k fits.
std::size_t fixed_time_bits(std::span<const CalibrationPoint> calibration,
                            double budget_ns);

// Measures k = 8, 16, 32, ... up to max_k until a time exceeds the budget,
// bisects over multiples of 8 between the last fitting and first failing k,
// then applies the table overload to all measurements.
std::size_t fixed_time_bits(Method method, double budget_ns, std::size_t d,
                            std::size_t max_k, const TimingOptions& options);

}  // namespace cbe
