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

#include "cbe/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cbe/errors.hpp"
#include "cbe/parallel.hpp"
#include "cbe/rng.hpp"

namespace cbe {

NeighborLists ground_truth_knn(const DataMatrix& db, const DataMatrix& queries,
                               std::size_t g, unsigned threads) {
  if (db.cols() != queries.cols()) {
    throw InvalidArgument("ground_truth_knn: database has " +
                          std::to_string(db.cols()) + " columns, queries " +
                          std::to_string(queries.cols()));
  }
  if (g == 0 || g > db.rows()) {
    throw InvalidArgument("ground_truth_knn: g=" + std::to_string(g) +
                          " must lie in [1, n=" + std::to_string(db.rows()) + "]");
  }
  NeighborLists out(queries.rows());
  parallel_for(queries.rows(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, std::uint32_t>> dist(db.rows());
    for (std::size_t q = begin; q < end; ++q) {
      const auto query = queries.row(q);
      for (std::size_t i = 0; i < db.rows(); ++i) {
        const auto row = db.row(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
          const double diff = static_cast<double>(row[j]) - query[j];
          sq += diff * diff;
        }
        dist[i] = {sq, static_cast<std::uint32_t>(i)};
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(g),
                        dist.end());
      out[q].resize(g);
      for (std::size_t i = 0; i < g; ++i) out[q][i] = dist[i].second;
    }
  });
  return out;
}

RecallCurve recall_at_m(const BinaryCodes& codes_db, const BinaryCodes& codes_q,
                        const NeighborLists& truth, std::size_t m_max,
                        unsigned threads) {
  if (codes_db.bits() != codes_q.bits()) {
    throw InvalidArgument("recall_at_m: database and query code lengths differ");
  }
  if (truth.size() != codes_q.size()) {
    throw InvalidArgument("recall_at_m: one truth list per query required");
  }
  if (m_max == 0 || m_max > codes_db.size()) {
    throw InvalidArgument("recall_at_m: m_max=" + std::to_string(m_max) +
                          " must lie in [1, n=" + std::to_string(codes_db.size()) + "]");
  }
  const std::size_t n = codes_db.size();
  const std::size_t k = codes_db.bits();
  // per_query[q][m-1] = expected fraction of q's truth items in the top m
  std::vector<std::vector<double>> per_query(codes_q.size());
  parallel_for(codes_q.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> dist(n);
    std::vector<std::size_t> histogram(k + 2);
    for (std::size_t q = begin; q < end; ++q) {
      const auto& wanted = truth[q];
      if (wanted.empty()) throw InvalidArgument("recall_at_m: empty truth list");
      const auto code = codes_q.row(q);
      std::fill(histogram.begin(), histogram.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        dist[i] = static_cast<std::uint32_t>(hamming_distance(codes_db.row(i), code));
        ++histogram[dist[i] + 1];
      }
      // histogram[t] = number of rows with distance < t after prefix sum
      std::partial_sum(histogram.begin(), histogram.end(), histogram.begin());
      std::vector<double> hits(m_max, 0.0);
      for (auto t : wanted) {
        if (t >= n) throw InvalidArgument("recall_at_m: truth index out of range");
        // Rows tied with t at its distance are ranked in uniformly random
        // order; t counts with the probability it lands in the top m.
        const std::size_t closer = histogram[dist[t]];
        const std::size_t tied = histogram[dist[t] + 1] - closer;
        for (std::size_t m = closer + 1; m <= m_max; ++m) {
          hits[m - 1] += std::min(1.0, static_cast<double>(m - closer) /
                                           static_cast<double>(tied));
        }
      }
      for (auto& h : hits) h /= static_cast<double>(wanted.size());
      per_query[q] = std::move(hits);
    }
  });
  RecallCurve curve;
  curve.bits = k;
  curve.m_values.resize(m_max);
  std::iota(curve.m_values.begin(), curve.m_values.end(), std::size_t{1});
  curve.recall_at_m.assign(m_max, 0.0);
  for (const auto& hits : per_query) {
    for (std::size_t m = 0; m < m_max; ++m) curve.recall_at_m[m] += hits[m];
  }
  for (auto& r : curve.recall_at_m) r /= static_cast<double>(codes_q.size());
  return curve;
}

AnglePair well_spread_pair(double theta, std::size_t d) {
  if (d < 2 || d % 2 != 0) {
    throw InvalidArgument("well_spread_pair: d must be even and >= 2");
  }
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  AnglePair pair;
  pair.x.assign(d, inv);
  pair.y.resize(d);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (std::size_t j = 0; j < d; ++j) {
    const double alt = (j % 2 == 0 ? 1.0 : -1.0) * inv;
    pair.y[j] = c * inv + s * alt;
  }
  double inf = inv;
  for (double v : pair.y) inf = std::max(inf, std::abs(v));
  pair.rho = inf;
  return pair;
}

double variance_bound(double theta, std::size_t k, double rho) {
  const double p = theta / std::numbers::pi;
  return p * (1.0 - p) / static_cast<double>(k) + 32.0 * rho;
}

AngleStats angle_experiment(double theta, std::size_t d, std::size_t k,
                            std::size_t trials, std::uint64_t seed,
                            unsigned threads) {
  if (trials < 2) throw InvalidArgument("angle_experiment: trials must be >= 2");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw InvalidArgument("angle_experiment: theta must lie in [0, pi]");
  }
  if (k == 0) throw InvalidArgument("angle_experiment: k must be positive");
  const AnglePair pair = well_spread_pair(theta, d);
  std::vector<double> fractions(trials);
  parallel_for(trials, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const CirculantEncoder encoder(cbe_random(d, k, mix_seed(seed, t)));
      const auto cx = encoder.encode(pair.x);
      const auto cy = encoder.encode(pair.y);
      fractions[t] = static_cast<double>(hamming_distance(cx, cy)) /
                     static_cast<double>(k);
    }
  });
  AngleStats stats;
  stats.theta = theta;
  stats.d = d;
  stats.k = k;
  stats.trials = trials;
  stats.rho = pair.rho;
  double sum = 0.0;
  for (double f : fractions) sum += f;
  stats.mean_normalized_hamming = sum / static_cast<double>(trials);
  double sq = 0.0;
  for (double f : fractions) {
    const double diff = f - stats.mean_normalized_hamming;
    sq += diff * diff;
  }
  stats.empirical_variance = sq / static_cast<double>(trials - 1);
  return stats;
}

namespace {

// Dense Gaussian projection that keeps only `resident` rows in memory and
// reuses them cyclically for all k outputs.
class CycledDenseEncoder final : public Encoder {
 public:
  CycledDenseEncoder(std::size_t d, std::size_t k, std::size_t resident,
                     std::uint64_t seed)
      : params_(lsh_random(d, resident, seed)), k_(k) {}

  std::size_t input_dim() const override { return params_.d; }
  std::size_t bits() const override { return k_; }
  void project(std::span<const double> x, std::span<double> out) const override {
    check_input(x, out);
    const std::size_t d = params_.d;
    for (std::size_t i = 0; i < k_; ++i) {
      const float* row = params_.a.data() + (i % params_.k) * d;
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += static_cast<double>(row[j]) * x[j];
      out[i] = acc;
    }
  }
  using Encoder::project;

 private:
  LshParams params_;
  std::size_t k_;
};

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point start) {
  return std::chrono::duration<double, std::nano>(Clock::now() - start).count();
}

}  // namespace

std::unique_ptr<Encoder> make_timing_encoder(Method method, std::size_t d,
                                             std::size_t k,
                                             const TimingOptions& options,
                                             std::size_t* rows_resident) {
  if (rows_resident) *rows_resident = 0;
  switch (method) {
    case Method::kCbeRand:
    case Method::kCbeOpt:
      return std::make_unique<CirculantEncoder>(cbe_random(d, k, options.seed));
    case Method::kBilinear:
      return std::make_unique<BilinearEncoder>(bilinear_random(d, k, options.seed));
    case Method::kFjlt:
      return std::make_unique<FjltEncoder>(
          fjlt_random(d, k, kDefaultFjltDensity, options.seed));
    case Method::kLsh: {
      const std::size_t row_bytes = d * sizeof(float);
      if (k * row_bytes <= options.memory_budget_bytes) {
        return std::make_unique<LshEncoder>(lsh_random(d, k, options.seed));
      }
      const std::size_t resident = options.memory_budget_bytes / row_bytes;
      if (!options.allow_cycled_rows || resident == 0) return nullptr;
      if (rows_resident) *rows_resident = resident;
      return std::make_unique<CycledDenseEncoder>(d, k, resident, options.seed);
    }
  }
  throw InvalidArgument("make_timing_encoder: unknown method");
}

namespace {

// One encoder under measurement: a fixed random input, a batch size long
// enough to reach min_rep_ns, and the per-point sample of every timed rep.
class TimingCell {
 public:
  TimingCell(std::unique_ptr<Encoder> owned, const TimingOptions& options)
      : TimingCell(*owned, options) {
    owned_ = std::move(owned);
  }

  TimingCell(const Encoder& encoder, const TimingOptions& options)
      : encoder_(&encoder),
        x_(encoder.input_dim()),
        code_(bytes_for_bits(encoder.bits())) {
    Rng rng = make_rng(options.seed, 0x71u);
    std::normal_distribution<double> normal;
    for (auto& v : x_) v = normal(rng);
    double single = 0.0;
    for (std::size_t w = 0; w < std::max<std::size_t>(options.warmup, 1); ++w) {
      const auto start = Clock::now();
      encoder_->encode(x_, code_);
      single = elapsed_ns(start);
    }
    batch_ = static_cast<std::size_t>(
        std::max(1.0, std::ceil(options.min_rep_ns / std::max(single, 1.0))));
    samples_.reserve(options.reps);
  }

  void rep() {
    const auto start = Clock::now();
    for (std::size_t b = 0; b < batch_; ++b) encoder_->encode(x_, code_);
    samples_.push_back(elapsed_ns(start) / static_cast<double>(batch_));
  }

  double median() {
    std::sort(samples_.begin(), samples_.end());
    const std::size_t mid = samples_.size() / 2;
    return samples_.size() % 2 ? samples_[mid]
                               : 0.5 * (samples_[mid - 1] + samples_[mid]);
  }

 private:
  std::unique_ptr<Encoder> owned_;
  const Encoder* encoder_;
  std::vector<double> x_;
  std::vector<std::uint8_t> code_;
  std::size_t batch_ = 1;
  std::vector<double> samples_;
};

// Approximate parameter memory of a timing encoder.
std::size_t parameter_bytes(Method method, std::size_t d, std::size_t rows_resident) {
  switch (method) {
    case Method::kLsh:
      return (rows_resident ? rows_resident : d) * d * sizeof(float);
    case Method::kFjlt:
      return static_cast<std::size_t>(kDefaultFjltDensity * static_cast<double>(d) *
                                      static_cast<double>(d)) * 16 + d;
    default:
      return d * 16;
  }
}

}  // namespace

double measure_encode_ns(const Encoder& encoder, const TimingOptions& options) {
  if (options.reps == 0) throw InvalidArgument("timing: reps must be positive");
  TimingCell cell(encoder, options);
  for (std::size_t r = 0; r < options.reps; ++r) cell.rep();
  return cell.median();
}

std::vector<TimingRecord> timing_bench(std::span<const std::size_t> d_values,
                                       std::span<const Method> methods,
                                       const TimingOptions& options) {
  if (options.reps == 0) throw InvalidArgument("timing: reps must be positive");
  for (std::size_t d : d_values) {
    if (!is_power_of_two(d)) {
      throw InvalidArgument("timing_bench: d=" + std::to_string(d) +
                            " is not a power of two");
    }
  }
  std::vector<TimingRecord> records;
  // Reps run round-robin over a group of cells so slow drift in machine
  // speed hits every d alike. A group is flushed before its parameters
  // would exceed the memory budget.
  struct Pending {
    TimingCell cell;
    std::size_t record;
  };
  std::vector<Pending> group;
  std::size_t group_bytes = 0;
  auto flush = [&] {
    for (std::size_t r = 0; r < options.reps; ++r) {
      for (auto& p : group) p.cell.rep();
    }
    for (auto& p : group) records[p.record].value = p.cell.median();
    group.clear();
    group_bytes = 0;
  };

  for (Method method : methods) {
    const std::string name(method_name(method));
    for (std::size_t d : d_values) {
      std::size_t resident = 0;
      std::unique_ptr<Encoder> encoder;
      try {
        encoder = make_timing_encoder(method, d, d, options, &resident);
      } catch (const std::bad_alloc&) {
        encoder = nullptr;
      }
      if (!encoder) {
        records.push_back({name, d, d, "oom",
                           static_cast<double>(d) * d * sizeof(float)});
        continue;
      }
      const std::size_t bytes = parameter_bytes(method, d, resident);
      if (!group.empty() && group_bytes + bytes > options.memory_budget_bytes) {
        // Drop the new encoder while the group runs so peak memory stays
        // near the budget.
        encoder.reset();
        flush();
        encoder = make_timing_encoder(method, d, d, options, &resident);
      }
      records.push_back({name, d, d, "ns_per_point", 0.0});
      group.push_back({TimingCell(std::move(encoder), options), records.size() - 1});
      group_bytes += bytes;
      if (resident) {
        records.push_back({name, d, d, "rows_resident", static_cast<double>(resident)});
      }
    }
  }
  flush();
  return records;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("fit_loglog: need at least two matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw InvalidArgument("fit_loglog: values must be positive");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidArgument("fit_loglog: x values are all equal");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::vector<CalibrationPoint> calibrate_bits(
    Method method, std::size_t d, std::span<const std::size_t> k_values,
    const TimingOptions& options, std::optional<double> stop_above_ns) {
  std::vector<CalibrationPoint> points;
  for (std::size_t k : k_values) {
    auto encoder = make_timing_encoder(method, d, k, options);
    if (!encoder) break;
    const double ns = measure_encode_ns(*encoder, options);
    points.push_back({k, ns});
    if (stop_above_ns && ns > *stop_above_ns) break;
  }
  return points;
}

std::size_t fixed_time_bits(std::span<const CalibrationPoint> calibration,
                            double budget_ns) {
  if (calibration.empty()) throw InvalidArgument("fixed_time_bits: no calibration");
  std::size_t best = 0;
  for (const auto& p : calibration) {
    if (p.ns_per_point <= budget_ns) best = std::max(best, p.k);
  }
  if (best == 0) {
    const auto smallest = std::min_element(
        calibration.begin(), calibration.end(),
        [](const auto& a, const auto& b) { return a.k < b.k; });
    throw InvalidArgument("fixed_time_bits: budget " + std::to_string(budget_ns) +
                          " ns is below the measured time for k=" +
                          std::to_string(smallest->k));
  }
  return best;
}

std::size_t fixed_time_bits(Method method, double budget_ns, std::size_t d,
                            std::size_t max_k, const TimingOptions& options) {
  if (max_k < kMinCalibratedBits) {
    throw InvalidArgument("fixed_time_bits: max_k below the minimum of 8 bits");
  }
  std::vector<CalibrationPoint> points;
  auto measure = [&](std::size_t k) {
    auto encoder = make_timing_encoder(method, d, k, options);
    if (!encoder) throw InvalidArgument("fixed_time_bits: encoder does not fit memory");
    const double ns = measure_encode_ns(*encoder, options);
    points.push_back({k, ns});
    return ns;
  };
  // Doubling phase, then bisection over multiples of 8.
  std::size_t good = 0;
  std::size_t bad = 0;
  for (std::size_t k = kMinCalibratedBits;; k = std::min(max_k, 2 * k)) {
    if (measure(k) <= budget_ns) {
      good = k;
    } else {
      bad = k;
      break;
    }
    if (k == max_k) break;
  }
  if (good == 0) return fixed_time_bits(points, budget_ns);  // throws
  while (bad != 0 && bad - good > 8) {
    const std::size_t mid = (good + bad) / 2 / 8 * 8;
    if (mid <= good || mid >= bad) break;
    if (measure(mid) <= budget_ns) good = mid;
    else bad = mid;
  }
  return fixed_time_bits(points, budget_ns);
}

}  // namespace cbe
