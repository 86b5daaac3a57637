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

// Binary encoders: circulant (CBE), dense Gaussian (LSH), bilinear and FJLT.
// Every encoder maps a d-vector to k real projections and then to k bits with
// sign(t) = +1 iff t >= 0.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cbe/binary_codes.hpp"
#include "cbe/data_matrix.hpp"
#include "cbe/transforms.hpp"

namespace cbe {

enum class Method : std::uint32_t {
  kCbeRand = 1,
  kCbeOpt = 2,
  kLsh = 3,
  kBilinear = 4,
  kFjlt = 5,
};

std::string_view method_name(Method method);
// Accepts the names returned by method_name ("cbe-rand", "lsh", ...).
Method parse_method(std::string_view name);

struct CirculantGenerator {
  std::vector<double> r;
  std::vector<std::int8_t> signs;

  friend bool operator==(const CirculantGenerator&,
                         const CirculantGenerator&) = default;
};

// h(x) = sign(circ(r) D x), truncated to the first k outputs. For k > d the
// outputs of extra generators are concatenated. Storage is O(d) per generator
// regardless of k.
struct CirculantParams {
  std::vector<double> r;
  std::vector<std::int8_t> signs;
  std::size_t k = 0;
  std::vector<CirculantGenerator> extra_generators;

  std::size_t dim() const { return r.size(); }
  std::size_t generator_count() const { return 1 + extra_generators.size(); }
  // Throws InvalidArgument on any broken invariant.
  void validate() const;

  friend bool operator==(const CirculantParams&,
                         const CirculantParams&) = default;
};

// Dense k x d Gaussian matrix, row-major.
struct LshParams {
  std::size_t d = 0;
  std::size_t k = 0;
  std::vector<float> a;

  void validate() const;
  friend bool operator==(const LshParams&, const LshParams&) = default;
};

// sign(R1^T Z R2) with Z = x reshaped row-major to d1 x d2; R1 is d1 x k1 and
// R2 is d2 x k2, both row-major. Output is the k1 x k2 result flattened
// row-major.
struct BilinearParams {
  std::size_t d1 = 0, d2 = 0, k1 = 0, k2 = 0;
  std::vector<double> r1;
  std::vector<double> r2;

  std::size_t dim() const { return d1 * d2; }
  std::size_t bits() const { return k1 * k2; }
  void validate() const;
  friend bool operator==(const BilinearParams&,
                         const BilinearParams&) = default;
};

struct SparseEntry {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// sign(P H D x): random signs, unnormalized Hadamard transform, then a sparse
// k x d Gaussian matrix P stored as (row, col, value) triples sorted by
// (row, col).
struct FjltParams {
  std::size_t d = 0;
  std::size_t k = 0;
  std::vector<std::int8_t> signs;
  std::vector<SparseEntry> entries;

  double density() const;
  void validate() const;
  friend bool operator==(const FjltParams&, const FjltParams&) = default;
};

using EncoderParams =
    std::variant<CirculantParams, LshParams, BilinearParams, FjltParams>;

// Splits n into f1 * f2 with f1 the smallest divisor of n that is >= sqrt(n).
// For powers of two this is f1 = 2^ceil(log2(sqrt(n))).
std::pair<std::size_t, std::size_t> near_square_factors(std::size_t n);

// r ~ N(0,1)^d and Rademacher signs per generator; ceil(k/d) generators.
CirculantParams cbe_random(std::size_t d, std::size_t k, std::uint64_t seed);
LshParams lsh_random(std::size_t d, std::size_t k, std::uint64_t seed);
BilinearParams bilinear_random(std::size_t d, std::size_t k,
                               std::uint64_t seed);
// Exactly max(1, round(density * k * d)) nonzeros at uniformly sampled
// positions.
FjltParams fjlt_random(std::size_t d, std::size_t k, double density,
                       std::uint64_t seed);

constexpr double kDefaultFjltDensity = 0.1;

class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t bits() const = 0;
  // Writes the bits() real projections of x (before binarization).
  virtual void project(std::span<const double> x,
                       std::span<double> out) const = 0;

  std::vector<double> project(std::span<const double> x) const;
  // code.size() must be bytes_for_bits(bits()).
  void encode(std::span<const double> x, std::span<std::uint8_t> code) const;
  std::vector<std::uint8_t> encode(std::span<const double> x) const;

 protected:
  void check_input(std::span<const double> x, std::span<double> out) const;
};

class CirculantEncoder final : public Encoder {
 public:
  explicit CirculantEncoder(CirculantParams params);

  std::size_t input_dim() const override { return params_.dim(); }
  std::size_t bits() const override { return params_.k; }
  void project(std::span<const double> x,
               std::span<double> out) const override;
  using Encoder::project;

  const CirculantParams& params() const { return params_; }

 private:
  struct Stage {
    CirculantOperator op;
    std::vector<double> signs;
  };
  CirculantParams params_;
  std::vector<Stage> stages_;
};

class LshEncoder final : public Encoder {
 public:
  explicit LshEncoder(LshParams params);
  std::size_t input_dim() const override { return params_.d; }
  std::size_t bits() const override { return params_.k; }
  void project(std::span<const double> x,
               std::span<double> out) const override;
  using Encoder::project;

 private:
  LshParams params_;
};

class BilinearEncoder final : public Encoder {
 public:
  explicit BilinearEncoder(BilinearParams params);
  std::size_t input_dim() const override { return params_.dim(); }
  std::size_t bits() const override { return params_.bits(); }
  void project(std::span<const double> x,
               std::span<double> out) const override;
  using Encoder::project;

 private:
  BilinearParams params_;
};

class FjltEncoder final : public Encoder {
 public:
  explicit FjltEncoder(FjltParams params);
  std::size_t input_dim() const override { return params_.d; }
  std::size_t bits() const override { return params_.k; }
  void project(std::span<const double> x,
               std::span<double> out) const override;
  using Encoder::project;

 private:
  FjltParams params_;
};

// Blockwise randomly signed Hadamard rotation:
// y_b = fwht(signs_b * x_b) / sqrt(block). Orthogonal, so l2 norms are kept
// while mass is spread across coordinates.
struct Preconditioner {
  std::vector<std::int8_t> signs;
  std::size_t block = 0;

  void validate() const;
  std::vector<double> apply(std::span<const double> x) const;
};

Preconditioner make_preconditioner(std::size_t d, std::size_t block,
                                   std::uint64_t seed);
std::vector<double> precondition(std::span<const double> x,
                                 std::span<const std::int8_t> signs,
                                 std::size_t block);

// Applies a preconditioner before delegating to an inner encoder.
class PreconditionedEncoder final : public Encoder {
 public:
  PreconditionedEncoder(std::unique_ptr<Encoder> inner,
                        Preconditioner preconditioner);
  std::size_t input_dim() const override { return inner_->input_dim(); }
  std::size_t bits() const override { return inner_->bits(); }
  void project(std::span<const double> x,
               std::span<double> out) const override;
  using Encoder::project;

 private:
  std::unique_ptr<Encoder> inner_;
  Preconditioner preconditioner_;
};

std::unique_ptr<Encoder> make_encoder(const EncoderParams& params);

std::vector<std::uint8_t> cbe_encode(const CirculantParams& params,
                                     std::span<const double> x);
std::vector<std::uint8_t> lsh_encode(const LshParams& params,
                                     std::span<const double> x);
std::vector<std::uint8_t> bilinear_encode(const BilinearParams& params,
                                          std::span<const double> x);
std::vector<std::uint8_t> fjlt_encode(const FjltParams& params,
                                      std::span<const double> x);

// Encodes every row of x. Rows are split across threads disjointly, so the
// output bytes do not depend on the thread count.
BinaryCodes encode_matrix(const Encoder& encoder, const DataMatrix& x,
                          unsigned threads = 1);

}  // namespace cbe
