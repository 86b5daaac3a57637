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

#include <gtest/gtest.h>

#include "cbe/errors.hpp"
#include "cbe/optimizer.hpp"
#include "test_util.hpp"

namespace {

struct Quartic {
  double m, h, c;
};

Quartic random_quartic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> m(-3.0, 6.0), h(-6.0, 6.0), c(0.05, 5.0);
  return {m(rng), h(rng), c(rng)};
}

double dc_bound(const Quartic& q) {
  return 2.0 + std::sqrt(std::abs(q.m) / q.c) + std::cbrt(std::abs(q.h) / q.c);
}

TEST(SolveDc, MatchesGridOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto q = random_quartic(rng);
    const double t = cbe::solve_dc(q.m, q.h, q.c);
    const double got = cbe::dc_objective(q.m, q.h, q.c, t);
    const double T = dc_bound(q);
    const double want = oracle::grid_min_1d(
        [&](double s) { return cbe::dc_objective(q.m, q.h, q.c, s); }, -T, T);
    EXPECT_LE(got, want + 1e-9) << q.m << ' ' << q.h << ' ' << q.c;
  }
}

TEST(SolveDc, KnownSolutions) {
  // f = (t^2 - 1)^2: minimizers +-1, ties go to the larger.
  EXPECT_DOUBLE_EQ(cbe::solve_dc(0.0, 0.0, 1.0), 1.0);
  // m >= 2c: single minimum at 0.
  EXPECT_NEAR(cbe::solve_dc(4.0, 0.0, 1.0), 0.0, 1e-15);
  // Quadratic case.
  EXPECT_DOUBLE_EQ(cbe::solve_dc(2.0, -4.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(cbe::solve_dc(0.0, 0.0, 0.0), 0.0);
  // Large negative h pushes the minimizer to the positive side.
  EXPECT_GT(cbe::solve_dc(0.5, -10.0, 1.0), 1.0);
}

TEST(SolveDc, ErrorCases) {
  EXPECT_THROW(cbe::solve_dc(-1.0, 0.0, 0.0), cbe::UnboundedObjectiveError);
  EXPECT_THROW(cbe::solve_dc(0.0, 1.0, 0.0), cbe::UnboundedObjectiveError);
  EXPECT_THROW(cbe::solve_dc(1.0, 0.0, -1.0), cbe::InvalidArgument);
  EXPECT_THROW(cbe::solve_dc(std::nan(""), 0.0, 1.0), cbe::InvalidArgument);
}

TEST(SolvePair, BothModesMatchGridOracle) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> warm(-2.0, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto q = random_quartic(rng);
    const double g = std::uniform_real_distribution<double>(-6.0, 6.0)(rng);
    const cbe::PairPoint start{warm(rng), warm(rng)};
    auto f = [&](cbe::PairPoint p) { return cbe::pair_objective(q.m, q.h, g, q.c, p); };
    const auto radial =
        cbe::solve_pair(q.m, q.h, g, q.c, cbe::SolverMode::kRadialExact, start);
    const auto descent =
        cbe::solve_pair(q.m, q.h, g, q.c, cbe::SolverMode::kGradientDescent, start);
    const double T = dc_bound({q.m, std::hypot(q.h, g), q.c});
    const double want =
        oracle::grid_min_2d([&](double a, double b) { return f({a, b}); }, T);
    EXPECT_LE(f(radial), want + 1e-9);
    EXPECT_LE(f(descent), want + 1e-6);
    EXPECT_NEAR(f(radial), f(descent), 1e-6);
  }
}

TEST(SolvePair, ZeroLinearTermKeepsWarmDirection) {
  // Ring of minimizers at radius sqrt(1 - m/(2c)).
  const auto p = cbe::solve_pair(1.0, 0.0, 0.0, 1.0, cbe::SolverMode::kRadialExact,
                                 {0.0, -3.0});
  EXPECT_NEAR(p.re, 0.0, 1e-15);
  EXPECT_NEAR(p.im, -std::sqrt(0.5), 1e-12);
  const auto q = cbe::solve_pair(1.0, 0.0, 0.0, 1.0, cbe::SolverMode::kRadialExact,
                                 {0.0, 0.0});
  EXPECT_NEAR(q.re, std::sqrt(0.5), 1e-12);
}

class OptimizerData : public ::testing::Test {
 protected:
  static constexpr std::size_t n = 40;
  static constexpr std::size_t d = 16;
  void SetUp() override {
    x = cbe::synth_gaussian(n, d, 5);
    std::mt19937_64 rng(6);
    r = testutil::normal_vector(d, rng);
  }
  cbe::DataMatrix x;
  std::vector<double> r;
};

TEST_F(OptimizerData, UpdateBIsSignOfProjection) {
  const auto b = cbe::update_B(r, x, 10);
  const auto c = oracle::circulant(r);
  const auto rows = testutil::to_rows(x);
  for (std::size_t i = 0; i < n; ++i) {
    const auto proj = oracle::matvec(c, rows[i]);
    for (std::size_t j = 0; j < d; ++j) {
      if (j >= 10) {
        EXPECT_EQ(b.sign(i, j), 0);
      } else if (std::abs(proj[j]) > 1e-9) {
        EXPECT_EQ(b.sign(i, j), proj[j] >= 0 ? 1 : -1);
      }
    }
  }
  EXPECT_DOUBLE_EQ(b.squared_norm(), 10.0 * n);
}

TEST_F(OptimizerData, StatsMatchDirectSpectra) {
  const auto b = cbe::update_B(r, x, d);
  const auto stats = cbe::accumulate_stats(x, b, {}, 0.0);
  std::vector<double> m(d, 0.0), h(d, 0.0), g(d, 0.0);
  const auto rows = testutil::to_rows(x);
  for (std::size_t i = 0; i < n; ++i) {
    const auto fx = oracle::dft_real(rows[i]);
    std::vector<double> brow(d);
    for (std::size_t j = 0; j < d; ++j) brow[j] = b.value(i, j);
    const auto fb = oracle::dft_real(brow);
    for (std::size_t l = 0; l < d; ++l) {
      m[l] += std::norm(fx[l]);
      h[l] += -2.0 * (fx[l].real() * fb[l].real() + fx[l].imag() * fb[l].imag());
      g[l] += 2.0 * (fx[l].imag() * fb[l].real() - fx[l].real() * fb[l].imag());
    }
  }
  for (std::size_t l = 0; l < d; ++l) {
    EXPECT_NEAR(stats.m_diag[l], m[l], 1e-9);
    EXPECT_NEAR(stats.h[l], h[l], 1e-9);
    EXPECT_NEAR(stats.g[l], g[l], 1e-9);
  }
}

TEST_F(OptimizerData, StatsBitIdenticalAcrossThreads) {
  const auto big = cbe::synth_gaussian(1000, 32, 8);
  std::mt19937_64 rng(9);
  const auto r32 = testutil::normal_vector(32, rng);
  const auto b = cbe::update_B(r32, big, 32);
  cbe::PairConstraints pc{{{0, 1}, {5, 9}}, {{2, 3}}};
  const auto one = cbe::accumulate_stats(big, b, pc, 0.5, 1);
  for (unsigned t : {2u, 3u, 8u}) {
    const auto many = cbe::accumulate_stats(big, b, pc, 0.5, t);
    EXPECT_EQ(one.m_diag, many.m_diag);
    EXPECT_EQ(one.h, many.h);
    EXPECT_EQ(one.g, many.g);
    EXPECT_EQ(one.a_diag, many.a_diag);
  }
}

TEST_F(OptimizerData, FrequencyObjectiveMatchesDenseEvaluation) {
  const auto b = cbe::update_B(r, x, 12);
  cbe::PairConstraints pc{{{0, 1}, {2, 7}}, {{3, 4}, {10, 30}}};
  const auto freq = cbe::objective_terms(r, x, b, pc, cbe::ObjectiveRoute::kFrequencyDomain);
  const auto time = cbe::objective_terms(r, x, b, pc, cbe::ObjectiveRoute::kTimeDomain);

  oracle::Matrix bm(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) bm[i][j] = b.value(i, j);
  }
  const auto rows = testutil::to_rows(x);
  const auto dense = oracle::dense_objective(r, rows, bm);
  const auto c = oracle::circulant(r);
  double j_term = 0.0;
  auto add_pairs = [&](const auto& pairs, double sign) {
    for (auto [i, k] : pairs) {
      std::vector<double> diff(d);
      for (std::size_t l = 0; l < d; ++l) diff[l] = rows[i][l] - rows[k][l];
      for (double v : oracle::matvec(c, diff)) j_term += sign * v * v;
    }
  };
  add_pairs(pc.similar, 1.0);
  add_pairs(pc.dissimilar, -1.0);

  for (const auto& terms : {freq, time}) {
    EXPECT_NEAR(terms.distortion, dense.distortion, 1e-9 * dense.distortion);
    EXPECT_NEAR(terms.orthogonality, dense.orthogonality, 1e-9 * dense.orthogonality);
    EXPECT_NEAR(terms.semi_supervised, j_term, 1e-9 * std::abs(j_term));
  }
}

TEST_F(OptimizerData, SpectrumUpdateIsSymmetricAndDescends) {
  cbe::OptConfig config;
  const auto b = cbe::update_B(r, x, d);
  const auto stats = cbe::accumulate_stats(x, b, {}, 0.0);
  cbe::OptState state;
  state.r_spectrum = cbe::fft_real(r);
  state.b = b;
  state.m_diag = stats.m_diag;
  state.h = stats.h;
  state.g = stats.g;
  const auto next = cbe::update_spectrum(state, config);
  ASSERT_TRUE(cbe::is_conjugate_symmetric(next, 0.0));
  const auto before = cbe::frequency_objective_terms(state.r_spectrum, stats, b.squared_norm());
  const auto after = cbe::frequency_objective_terms(next, stats, b.squared_norm());
  EXPECT_LE(after.total(1.0, 0.0), before.total(1.0, 0.0));
  // A second update from the optimum changes nothing.
  state.r_spectrum = next;
  EXPECT_EQ(cbe::update_spectrum(state, config), next);
}

TEST(Train, MonotoneTraceAndThreadIndependent) {
  const auto x = cbe::synth_clustered(300, 32, 8, 0.5, 4);
  cbe::OptConfig config;
  config.objective_rel_tol = 0.0;
  config.max_outer_iters = 6;
  const auto one = cbe::train(x, config, {}, 11);
  ASSERT_EQ(one.objective_trace.size(), 12u);
  for (std::size_t i = 1; i < one.objective_trace.size(); ++i) {
    EXPECT_LE(one.objective_trace[i], one.objective_trace[i - 1] + 1e-9);
  }
  config.threads = 5;
  const auto many = cbe::train(x, config, {}, 11);
  EXPECT_EQ(one.objective_trace, many.objective_trace);
  EXPECT_EQ(one.params, many.params);
}

TEST(Train, GradientDescentModeAlsoDescends) {
  const auto x = cbe::synth_gaussian(100, 16, 3);
  cbe::OptConfig config;
  config.solver_mode = cbe::SolverMode::kGradientDescent;
  config.objective_rel_tol = 0.0;
  config.max_outer_iters = 4;
  const auto result = cbe::train(x, config, {}, 2);
  for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
    EXPECT_LE(result.objective_trace[i], result.objective_trace[i - 1] + 1e-9);
  }
}

TEST(Train, ZeroIterationsReturnsRandomInit) {
  const auto x = cbe::synth_gaussian(10, 8, 1);
  cbe::OptConfig config;
  config.max_outer_iters = 0;
  config.k = 5;
  const auto result = cbe::train(x, config, {}, 3);
  auto want = cbe::cbe_random(8, 8, 3);
  want.k = 5;
  EXPECT_EQ(result.params, want);
  EXPECT_TRUE(result.objective_trace.empty());
}

TEST(Train, SemiSupervisedUnboundedWithoutOrthogonality) {
  const auto x = cbe::synth_gaussian(20, 8, 1);
  cbe::OptConfig config;
  config.lambda = 0.0;
  config.mu = 100.0;
  cbe::PairConstraints pc;
  for (std::size_t i = 0; i + 1 < 20; ++i) pc.dissimilar.push_back({i, i + 1});
  EXPECT_THROW(cbe::train(x, config, pc, 1), cbe::UnboundedObjectiveError);
  config.lambda = 1.0;
  EXPECT_NO_THROW(cbe::train(x, config, pc, 1));
}

TEST(Train, RejectsBadConfig) {
  const auto x = cbe::synth_gaussian(10, 8, 1);
  cbe::OptConfig config;
  config.k = 9;
  EXPECT_THROW(cbe::train(x, config, {}, 1), cbe::InvalidArgument);
  const auto odd = cbe::synth_gaussian(10, 12, 1);
  EXPECT_THROW(cbe::train(odd, {}, {}, 1), cbe::InvalidArgument);
}

}  // namespace
