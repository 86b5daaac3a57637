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

#include <benchmark/benchmark.h>

#include <random>

#include "cbe/encoders.hpp"
#include "cbe/transforms.hpp"

namespace {

std::vector<double> random_vector(std::size_t d) {
  std::mt19937_64 rng(d);
  std::normal_distribution<double> normal;
  std::vector<double> x(d);
  for (auto& v : x) v = normal(rng);
  return x;
}

void BM_Fft(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(d);
  for (auto _ : state) benchmark::DoNotOptimize(cbe::fft_real(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_Fwht(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  auto x = random_vector(d);
  for (auto _ : state) {
    cbe::fwht_inplace(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fwht)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity(benchmark::oNLogN);

template <typename MakeParams>
void encode_loop(benchmark::State& state, MakeParams make_params) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto encoder = cbe::make_encoder(make_params(d));
  const auto x = random_vector(d);
  std::vector<std::uint8_t> code(cbe::bytes_for_bits(d));
  for (auto _ : state) {
    encoder->encode(x, code);
    benchmark::DoNotOptimize(code.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_EncodeCirculant(benchmark::State& state) {
  encode_loop(state, [](std::size_t d) { return cbe::cbe_random(d, d, 1); });
}
BENCHMARK(BM_EncodeCirculant)->RangeMultiplier(2)->Range(1 << 10, 1 << 15);

void BM_EncodeBilinear(benchmark::State& state) {
  encode_loop(state, [](std::size_t d) { return cbe::bilinear_random(d, d, 1); });
}
BENCHMARK(BM_EncodeBilinear)->RangeMultiplier(2)->Range(1 << 10, 1 << 15);

void BM_EncodeDense(benchmark::State& state) {
  encode_loop(state, [](std::size_t d) { return cbe::lsh_random(d, d, 1); });
}
BENCHMARK(BM_EncodeDense)->RangeMultiplier(2)->Range(1 << 10, 1 << 13);

}  // namespace

BENCHMARK_MAIN();
