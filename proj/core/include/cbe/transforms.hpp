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

// Transform kernels: radix-2 complex FFT, fast Walsh-Hadamard transform,
// circulant multiplication and circular shifts.
//
// DFT convention: X[l] = sum_m x[m] * exp(-2*pi*i*l*m/d); the 1/d factor lives
// entirely on the inverse. The optimizer's frequency-domain statistics assume
// exactly this convention.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cbe {

using Complex = std::complex<double>;
using ComplexSpectrum = std::vector<Complex>;

constexpr bool is_power_of_two(std::size_t n) {
  return n != 0 && (n & (n - 1)) == 0;
}

// Precomputed bit-reversal permutation and twiddle factors for one
// power-of-two size. Immutable after construction; share freely across threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);

  std::size_t size() const { return size_; }

  // In-place transforms; data.size() must equal size().
  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;

  // Process-wide cache keyed by size.
  static std::shared_ptr<const FftPlan> get(std::size_t size);

 private:
  void transform(std::span<Complex> data, bool inverse) const;

  std::size_t size_;
  std::vector<std::size_t> bit_reverse_;
  std::vector<Complex> forward_twiddles_;
  std::vector<Complex> inverse_twiddles_;
};

// Transforms of real signals of length `size` through a complex FFT of half
// the length. Only bins 0..size/2 are produced or read; the rest follow from
// conjugate symmetry.
class RealFftPlan {
 public:
  explicit RealFftPlan(std::size_t size);

  std::size_t size() const { return size_; }

  // half_spectrum.size() == size/2 + 1; work holds at least size/2 values.
  void forward(std::span<const double> x, std::span<Complex> half_spectrum,
               std::span<Complex> work) const;
  void inverse(std::span<const Complex> half_spectrum, std::span<double> out,
               std::span<Complex> work) const;

  static std::shared_ptr<const RealFftPlan> get(std::size_t size);

 private:
  std::size_t size_;
  std::shared_ptr<const FftPlan> half_;
  std::vector<Complex> twiddles_;  // exp(-2*pi*i*k/size), k < size/2
};

ComplexSpectrum fft(std::span<const Complex> signal);
ComplexSpectrum fft_real(std::span<const double> signal);
std::vector<Complex> ifft(std::span<const Complex> spectrum);

// Real part of ifft(spectrum). Throws NumericalError if any imaginary
// residual exceeds 1e-7 * max(1, max |real part|).
std::vector<double> ifft_real(std::span<const Complex> spectrum);

// values[0] real and values[d-i] == conj(values[i]) within tol.
bool is_conjugate_symmetric(std::span<const Complex> spectrum,
                            double tol = 1e-9);

// circ(r) * x where circ(r)(i, j) = r[(i - j) mod d], i.e. r is the first
// column. Never forms the dense matrix.
std::vector<double> circulant_multiply(std::span<const double> r,
                                       std::span<const double> x);

// Multiplication by a fixed circulant matrix with its generator spectrum
// cached, for repeated application. A spectrum passed directly must be
// conjugate symmetric (a real generator).
class CirculantOperator {
 public:
  explicit CirculantOperator(std::span<const double> r);
  explicit CirculantOperator(ComplexSpectrum spectrum);

  std::size_t size() const { return spectrum_.size(); }
  const ComplexSpectrum& spectrum() const { return spectrum_; }

  // out = circ(r) * x; scratch is resized as needed.
  void apply(std::span<const double> x, std::span<double> out,
             std::vector<Complex>& scratch) const;
  std::vector<double> apply(std::span<const double> x) const;

 private:
  ComplexSpectrum spectrum_;
  std::shared_ptr<const RealFftPlan> plan_;
};

// Unnormalized Walsh-Hadamard transform (Sylvester ordering), in place.
void fwht_inplace(std::span<double> data);
std::vector<double> fwht(std::span<const double> signal);

// result[j] = x[(j - t) mod d]; negative t allowed.
std::vector<double> circular_shift(std::span<const double> x, long long t);

}  // namespace cbe
