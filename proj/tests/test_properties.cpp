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

// Randomized invariants checked over many generated instances.
#include <gtest/gtest.h>

#include <numeric>

#include "cbe/encoders.hpp"
#include "cbe/evaluation.hpp"
#include "cbe/transforms.hpp"
#include "test_util.hpp"

namespace {

std::vector<cbe::EncoderParams> all_params(std::size_t d, std::size_t k, std::uint64_t seed) {
  return {cbe::cbe_random(d, k, seed), cbe::lsh_random(d, k, seed),
          cbe::bilinear_random(d, k, seed), cbe::fjlt_random(d, k, 0.3, seed)};
}

TEST(Property, CodesInvariantToPositiveScaleAndFlipUnderNegation) {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = std::size_t{1} << (2 + trial % 6);
    for (const auto& params : all_params(d, d, rng())) {
      const auto enc = cbe::make_encoder(params);
      auto x = testutil::normal_vector(d, rng);
      const auto proj = enc->project(x);
      const auto code = enc->encode(x);
      auto scaled = x;
      for (auto& v : scaled) v *= 3.75;
      EXPECT_EQ(enc->encode(scaled), code);
      auto negated = x;
      for (auto& v : negated) v = -v;
      const auto flipped = enc->encode(negated);
      for (std::size_t j = 0; j < d; ++j) {
        if (std::abs(proj[j]) > 1e-9) {
          EXPECT_NE(oracle::bit(flipped, j), oracle::bit(code, j));
        }
      }
    }
  }
}

TEST(Property, EncodeIsPackedSignOfProjection) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    for (const auto& params : all_params(32, 20, rng())) {
      const auto enc = cbe::make_encoder(params);
      const auto x = testutil::normal_vector(32, rng);
      std::vector<std::uint8_t> want(cbe::bytes_for_bits(20));
      cbe::pack_signs(enc->project(x), want);
      EXPECT_EQ(enc->encode(x), want);
    }
  }
}

TEST(Property, HammingIsAMetric) {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> a(13), b(13), c(13);
    for (auto* v : {&a, &b, &c}) {
      for (auto& byte : *v) byte = static_cast<std::uint8_t>(rng());
    }
    EXPECT_EQ(cbe::hamming_distance(a, a), 0u);
    EXPECT_EQ(cbe::hamming_distance(a, b), cbe::hamming_distance(b, a));
    EXPECT_LE(cbe::hamming_distance(a, c),
              cbe::hamming_distance(a, b) + cbe::hamming_distance(b, c));
  }
}

TEST(Property, CirculantCommutesWithShiftsAndArguments) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = std::size_t{1} << (1 + trial % 9);
    const auto r = testutil::normal_vector(d, rng);
    const auto x = testutil::normal_vector(d, rng);
    const long long t = static_cast<long long>(rng() % (3 * d)) - static_cast<long long>(d);
    const auto lhs = cbe::circulant_multiply(r, cbe::circular_shift(x, t));
    const auto rhs = cbe::circular_shift(cbe::circulant_multiply(r, x), t);
    const auto swapped = cbe::circulant_multiply(x, r);
    const auto direct = cbe::circulant_multiply(r, x);
    for (std::size_t j = 0; j < d; ++j) {
      EXPECT_NEAR(lhs[j], rhs[j], 1e-10 * d);
      EXPECT_NEAR(swapped[j], direct[j], 1e-10 * d);
    }
  }
}

TEST(Property, CirculantCodesArePrefixes) {
  std::mt19937_64 rng(104);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 64;
    const std::size_t k = 1 + rng() % d;
    auto full = cbe::cbe_random(d, d, rng());
    auto part = full;
    part.k = k;
    const auto x = testutil::normal_vector(d, rng);
    const auto a = cbe::cbe_encode(full, x);
    const auto b = cbe::cbe_encode(part, x);
    for (std::size_t j = 0; j < k; ++j) EXPECT_EQ(oracle::bit(a, j), oracle::bit(b, j));
  }
}

TEST(Property, RecallInvariantToDatabasePermutation) {
  std::mt19937_64 rng(105);
  const auto db = cbe::synth_clustered(200, 32, 10, 0.4, 1);
  const auto queries = cbe::synth_clustered(20, 32, 10, 0.4, 2);
  const auto enc = cbe::make_encoder(cbe::cbe_random(32, 32, 3));
  std::vector<std::uint32_t> perm(200);
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<float> values(200 * 32);
  for (std::size_t i = 0; i < 200; ++i) {
    std::copy(db.row(perm[i]).begin(), db.row(perm[i]).end(), values.begin() + i * 32);
  }
  const cbe::DataMatrix permuted(200, 32, values);
  std::vector<std::uint32_t> inverse(200);
  for (std::uint32_t i = 0; i < 200; ++i) inverse[perm[i]] = i;

  const auto truth = cbe::ground_truth_knn(db, queries, 10);
  auto permuted_truth = truth;
  for (auto& list : permuted_truth) {
    for (auto& id : list) id = inverse[id];
  }
  const auto cq = cbe::encode_matrix(*enc, queries);
  const auto a = cbe::recall_at_m(cbe::encode_matrix(*enc, db), cq, truth, 200);
  const auto b = cbe::recall_at_m(cbe::encode_matrix(*enc, permuted), cq, permuted_truth, 200);
  for (std::size_t m = 1; m <= 200; ++m) EXPECT_EQ(a.at(m), b.at(m)) << "m=" << m;
}

TEST(Property, RecallMonotoneInM) {
  std::mt19937_64 rng(106);
  for (int trial = 0; trial < 10; ++trial) {
    const auto db = cbe::synth_gaussian(120, 16, rng());
    const auto q = cbe::synth_gaussian(10, 16, rng());
    const auto enc = cbe::make_encoder(cbe::lsh_random(16, 12, rng()));
    const auto curve = cbe::recall_at_m(cbe::encode_matrix(*enc, db),
                                        cbe::encode_matrix(*enc, q),
                                        cbe::ground_truth_knn(db, q, 5), 120);
    for (std::size_t m = 1; m < 120; ++m) EXPECT_LE(curve.at(m), curve.at(m + 1));
  }
}

TEST(Property, NormalizationKeepsDirection) {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<float> u(-5.0f, 5.0f);
  std::vector<float> v(50 * 6);
  for (auto& x : v) x = u(rng);
  const cbe::DataMatrix m(50, 6, v);
  const auto n = cbe::normalize_rows(m);
  EXPECT_LE(n.max_norm_deviation(), 1e-6);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ(std::signbit(n(i, j)), std::signbit(m(i, j)));
    }
  }
}

}  // namespace
