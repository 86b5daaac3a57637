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

#include "cbe/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ranges>

#include "cbe/errors.hpp"
#include "cbe/parallel.hpp"
#include "cbe/rng.hpp"

namespace cbe {

namespace {

// Per-thread buffers reused across calls so large d does not hit the
// allocator on every encode.
struct Workspace {
  std::vector<double> projections;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<Complex> scratch;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

std::vector<std::int8_t> rademacher(std::size_t d, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::int8_t> signs(d);
  for (auto& s : signs) s = coin(rng) ? 1 : -1;
  return signs;
}

void check_signs(std::span<const std::int8_t> signs, const char* what) {
  for (auto s : signs) {
    if (s != 1 && s != -1) {
      throw InvalidArgument(std::string(what) + ": sign entries must be +-1");
    }
  }
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string(what) + ": non-finite parameter");
    }
  }
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kCbeRand: return "cbe-rand";
    case Method::kCbeOpt: return "cbe-opt";
    case Method::kLsh: return "lsh";
    case Method::kBilinear: return "bilinear";
    case Method::kFjlt: return "fjlt";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kCbeRand, Method::kCbeOpt, Method::kLsh,
                   Method::kBilinear, Method::kFjlt}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

void CirculantParams::validate() const {
  const std::size_t d = r.size();
  if (d == 0) throw InvalidArgument("CirculantParams: empty generator");
  if (signs.size() != d) {
    throw InvalidArgument("CirculantParams: signs length " +
                          std::to_string(signs.size()) + " != d " +
                          std::to_string(d));
  }
  if (k == 0) throw InvalidArgument("CirculantParams: k must be positive");
  if (k > d * generator_count()) {
    throw InvalidArgument("CirculantParams: k=" + std::to_string(k) +
                          " exceeds d * generators = " +
                          std::to_string(d * generator_count()));
  }
  check_finite(r, "CirculantParams");
  check_signs(signs, "CirculantParams");
  for (const auto& g : extra_generators) {
    if (g.r.size() != d || g.signs.size() != d) {
      throw InvalidArgument("CirculantParams: extra generator size mismatch");
    }
    check_finite(g.r, "CirculantParams");
    check_signs(g.signs, "CirculantParams");
  }
}

void LshParams::validate() const {
  if (d == 0 || k == 0) throw InvalidArgument("LshParams: empty shape");
  if (a.size() != d * k) {
    throw InvalidArgument("LshParams: matrix has " + std::to_string(a.size()) +
                          " entries, expected k*d");
  }
}

void BilinearParams::validate() const {
  if (d1 == 0 || d2 == 0 || k1 == 0 || k2 == 0) {
    throw InvalidArgument("BilinearParams: empty shape");
  }
  if (r1.size() != d1 * k1 || r2.size() != d2 * k2) {
    throw InvalidArgument("BilinearParams: factor sizes inconsistent");
  }
  check_finite(r1, "BilinearParams");
  check_finite(r2, "BilinearParams");
}

double FjltParams::density() const {
  return static_cast<double>(entries.size()) /
         (static_cast<double>(d) * static_cast<double>(k));
}

void FjltParams::validate() const {
  if (k == 0 || !is_power_of_two(d)) {
    throw InvalidArgument("FjltParams: d must be a power of two and k > 0");
  }
  if (signs.size() != d) throw InvalidArgument("FjltParams: signs length");
  check_signs(signs, "FjltParams");
  for (const auto& e : entries) {
    if (e.row >= k || e.col >= d || !std::isfinite(e.value)) {
      throw InvalidArgument("FjltParams: sparse entry out of range");
    }
  }
}

std::pair<std::size_t, std::size_t> near_square_factors(std::size_t n) {
  if (n == 0) throw InvalidArgument("near_square_factors: n must be positive");
  std::size_t f1 = 1;
  while (f1 * f1 < n) ++f1;
  while (n % f1 != 0) ++f1;
  return {f1, n / f1};
}

CirculantParams cbe_random(std::size_t d, std::size_t k, std::uint64_t seed) {
  if (d == 0 || k == 0) {
    throw InvalidArgument("cbe_random: d and k must be positive");
  }
  if (!is_power_of_two(d)) {
    throw InvalidArgument("cbe_random: d=" + std::to_string(d) +
                          " is not a power of two");
  }
  const std::size_t generators = (k + d - 1) / d;
  CirculantParams params;
  params.k = k;
  std::normal_distribution<double> normal;
  for (std::size_t g = 0; g < generators; ++g) {
    Rng rng = make_rng(seed, g);
    CirculantGenerator gen;
    gen.r.resize(d);
    for (auto& v : gen.r) v = normal(rng);
    gen.signs = rademacher(d, rng);
    if (g == 0) {
      params.r = std::move(gen.r);
      params.signs = std::move(gen.signs);
    } else {
      params.extra_generators.push_back(std::move(gen));
    }
  }
  return params;
}

LshParams lsh_random(std::size_t d, std::size_t k, std::uint64_t seed) {
  if (d == 0 || k == 0) {
    throw InvalidArgument("lsh_random: d and k must be positive");
  }
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<float> normal;
  LshParams params{d, k, std::vector<float>(d * k)};
  for (auto& v : params.a) v = normal(rng);
  return params;
}

BilinearParams bilinear_random(std::size_t d, std::size_t k,
                               std::uint64_t seed) {
  if (d == 0 || k == 0) {
    throw InvalidArgument("bilinear_random: d and k must be positive");
  }
  BilinearParams p;
  std::tie(p.d1, p.d2) = near_square_factors(d);
  std::tie(p.k1, p.k2) = near_square_factors(k);
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> normal;
  p.r1.resize(p.d1 * p.k1);
  p.r2.resize(p.d2 * p.k2);
  for (auto& v : p.r1) v = normal(rng);
  for (auto& v : p.r2) v = normal(rng);
  return p;
}

FjltParams fjlt_random(std::size_t d, std::size_t k, double density,
                       std::uint64_t seed) {
  if (k == 0 || !is_power_of_two(d)) {
    throw InvalidArgument("fjlt_random: d must be a power of two and k > 0");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw InvalidArgument("fjlt_random: density must lie in (0, 1]");
  }
  Rng rng = make_rng(seed, 0);
  FjltParams p;
  p.d = d;
  p.k = k;
  p.signs = rademacher(d, rng);
  const std::uint64_t cells = static_cast<std::uint64_t>(d) * k;
  const auto nnz = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::llround(density * static_cast<double>(cells))));
  std::vector<std::uint64_t> positions;
  positions.reserve(nnz);
  // Selection sampling: each cell is kept with probability
  // (still needed) / (still available), yielding ascending positions.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t pos = 0; pos < cells && positions.size() < nnz; ++pos) {
    const double needed = static_cast<double>(nnz - positions.size());
    if (static_cast<double>(cells - pos) * unit(rng) < needed) positions.push_back(pos);
  }
  std::normal_distribution<double> normal;
  p.entries.reserve(positions.size());
  for (auto pos : positions) {
    p.entries.push_back({static_cast<std::uint32_t>(pos / d),
                         static_cast<std::uint32_t>(pos % d), normal(rng)});
  }
  return p;
}

std::vector<double> Encoder::project(std::span<const double> x) const {
  std::vector<double> out(bits());
  project(x, out);
  return out;
}

void Encoder::encode(std::span<const double> x,
                     std::span<std::uint8_t> code) const {
  auto& projections = workspace().projections;
  projections.resize(bits());
  project(x, projections);
  pack_signs(projections, code);
}

std::vector<std::uint8_t> Encoder::encode(std::span<const double> x) const {
  std::vector<std::uint8_t> code(bytes_for_bits(bits()));
  encode(x, code);
  return code;
}

void Encoder::check_input(std::span<const double> x,
                          std::span<double> out) const {
  if (x.size() != input_dim()) {
    throw InvalidArgument("encoder expects input of length " +
                          std::to_string(input_dim()) + ", got " +
                          std::to_string(x.size()));
  }
  if (out.size() != bits()) {
    throw InvalidArgument("encoder output buffer must hold " +
                          std::to_string(bits()) + " values");
  }
}

CirculantEncoder::CirculantEncoder(CirculantParams params)
    : params_(std::move(params)) {
  params_.validate();
  if (!is_power_of_two(params_.dim())) {
    throw InvalidArgument("CirculantEncoder: d must be a power of two");
  }
  auto add_stage = [this](const std::vector<double>& r,
                          const std::vector<std::int8_t>& signs) {
    stages_.push_back({CirculantOperator(r),
                       std::vector<double>(signs.begin(), signs.end())});
  };
  add_stage(params_.r, params_.signs);
  for (const auto& g : params_.extra_generators) add_stage(g.r, g.signs);
}

void CirculantEncoder::project(std::span<const double> x,
                               std::span<double> out) const {
  check_input(x, out);
  const std::size_t d = params_.dim();
  auto& ws = workspace();
  auto& flipped = ws.a;
  auto& y = ws.b;
  auto& scratch = ws.scratch;
  flipped.resize(d);
  y.resize(d);
  std::size_t written = 0;
  for (const auto& stage : stages_) {
    if (written >= params_.k) break;
    for (std::size_t j = 0; j < d; ++j) flipped[j] = stage.signs[j] * x[j];
    stage.op.apply(flipped, y, scratch);
    const std::size_t take = std::min(d, params_.k - written);
    std::copy_n(y.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(written));
    written += take;
  }
}

LshEncoder::LshEncoder(LshParams params) : params_(std::move(params)) {
  params_.validate();
}

void LshEncoder::project(std::span<const double> x,
                         std::span<double> out) const {
  check_input(x, out);
  const std::size_t d = params_.d;
  for (std::size_t i = 0; i < params_.k; ++i) {
    const float* row = params_.a.data() + i * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += static_cast<double>(row[j]) * x[j];
    out[i] = acc;
  }
}

BilinearEncoder::BilinearEncoder(BilinearParams params)
    : params_(std::move(params)) {
  params_.validate();
}

void BilinearEncoder::project(std::span<const double> x,
                              std::span<double> out) const {
  check_input(x, out);
  const auto& p = params_;
  // t = R1^T Z, k1 x d2
  auto& t = workspace().a;
  t.assign(p.k1 * p.d2, 0.0);
  for (std::size_t b = 0; b < p.d1; ++b) {
    const double* z_row = x.data() + b * p.d2;
    for (std::size_t a = 0; a < p.k1; ++a) {
      const double w = p.r1[b * p.k1 + a];
      double* t_row = t.data() + a * p.d2;
      for (std::size_t c = 0; c < p.d2; ++c) t_row[c] += w * z_row[c];
    }
  }
  // out = t R2, k1 x k2
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t a = 0; a < p.k1; ++a) {
    double* o_row = out.data() + a * p.k2;
    for (std::size_t c = 0; c < p.d2; ++c) {
      const double w = t[a * p.d2 + c];
      const double* r2_row = p.r2.data() + c * p.k2;
      for (std::size_t e = 0; e < p.k2; ++e) o_row[e] += w * r2_row[e];
    }
  }
}

FjltEncoder::FjltEncoder(FjltParams params) : params_(std::move(params)) {
  params_.validate();
}

void FjltEncoder::project(std::span<const double> x,
                          std::span<double> out) const {
  check_input(x, out);
  auto& y = workspace().a;
  y.resize(params_.d);
  for (std::size_t j = 0; j < params_.d; ++j) y[j] = params_.signs[j] * x[j];
  fwht_inplace(y);
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : params_.entries) out[e.row] += e.value * y[e.col];
}

void Preconditioner::validate() const {
  const std::size_t d = signs.size();
  if (!is_power_of_two(block) || !is_power_of_two(d) || block > d ||
      d % block != 0) {
    throw InvalidArgument("precondition: block " + std::to_string(block) +
                          " must be a power of two dividing d=" +
                          std::to_string(d));
  }
  check_signs(signs, "precondition");
}

std::vector<double> Preconditioner::apply(std::span<const double> x) const {
  return precondition(x, signs, block);
}

Preconditioner make_preconditioner(std::size_t d, std::size_t block,
                                   std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x5052ECULL);
  Preconditioner p{rademacher(d, rng), block};
  p.validate();
  return p;
}

std::vector<double> precondition(std::span<const double> x,
                                 std::span<const std::int8_t> signs,
                                 std::size_t block) {
  if (x.size() != signs.size()) {
    throw InvalidArgument("precondition: signs length != input length");
  }
  Preconditioner{std::vector<std::int8_t>(signs.begin(), signs.end()), block}
      .validate();
  std::vector<double> y(x.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(block));
  for (std::size_t start = 0; start < x.size(); start += block) {
    std::span<double> chunk(y.data() + start, block);
    for (std::size_t j = 0; j < block; ++j) {
      chunk[j] = signs[start + j] * x[start + j];
    }
    fwht_inplace(chunk);
    for (auto& v : chunk) v *= scale;
  }
  return y;
}

PreconditionedEncoder::PreconditionedEncoder(std::unique_ptr<Encoder> inner,
                                             Preconditioner preconditioner)
    : inner_(std::move(inner)), preconditioner_(std::move(preconditioner)) {
  if (!inner_) throw InvalidArgument("PreconditionedEncoder: null encoder");
  preconditioner_.validate();
  if (preconditioner_.signs.size() != inner_->input_dim()) {
    throw InvalidArgument("PreconditionedEncoder: dimension mismatch");
  }
}

void PreconditionedEncoder::project(std::span<const double> x,
                                    std::span<double> out) const {
  check_input(x, out);
  inner_->project(preconditioner_.apply(x), out);
}

std::unique_ptr<Encoder> make_encoder(const EncoderParams& params) {
  return std::visit(
      [](const auto& p) -> std::unique_ptr<Encoder> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CirculantParams>) {
          return std::make_unique<CirculantEncoder>(p);
        } else if constexpr (std::is_same_v<T, LshParams>) {
          return std::make_unique<LshEncoder>(p);
        } else if constexpr (std::is_same_v<T, BilinearParams>) {
          return std::make_unique<BilinearEncoder>(p);
        } else {
          return std::make_unique<FjltEncoder>(p);
        }
      },
      params);
}

std::vector<std::uint8_t> cbe_encode(const CirculantParams& params,
                                     std::span<const double> x) {
  return CirculantEncoder(params).encode(x);
}

std::vector<std::uint8_t> lsh_encode(const LshParams& params,
                                     std::span<const double> x) {
  return LshEncoder(params).encode(x);
}

std::vector<std::uint8_t> bilinear_encode(const BilinearParams& params,
                                          std::span<const double> x) {
  return BilinearEncoder(params).encode(x);
}

std::vector<std::uint8_t> fjlt_encode(const FjltParams& params,
                                      std::span<const double> x) {
  return FjltEncoder(params).encode(x);
}

BinaryCodes encode_matrix(const Encoder& encoder, const DataMatrix& x,
                          unsigned threads) {
  if (x.cols() != encoder.input_dim()) {
    throw InvalidArgument("encode_matrix: data has " +
                          std::to_string(x.cols()) +
                          " columns, encoder expects " +
                          std::to_string(encoder.input_dim()));
  }
  BinaryCodes codes(x.rows(), encoder.bits());
  parallel_for(x.rows(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(x.cols());
    std::vector<double> proj(encoder.bits());
    for (std::size_t i = begin; i < end; ++i) {
      const auto src = x.row(i);
      std::copy(src.begin(), src.end(), row.begin());
      encoder.project(row, proj);
      pack_signs(proj, codes.row(i));
    }
  });
  return codes;
}

}  // namespace cbe
