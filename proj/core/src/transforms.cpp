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

#include "cbe/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "cbe/errors.hpp"

namespace cbe {

namespace {

void require_power_of_two(std::size_t n, const char* what) {
  if (n == 0) {
    throw InvalidArgument(std::string(what) + ": dimension must be positive");
  }
  if (!is_power_of_two(n)) {
    throw InvalidArgument(std::string(what) + ": dimension " +
                          std::to_string(n) + " is not a power of two");
  }
}

// Plain product; std::complex operator* adds NaN/Inf recovery that costs
// a library call per multiply.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

FftPlan::FftPlan(std::size_t size) : size_(size) {
  require_power_of_two(size, "FftPlan");
  bit_reverse_.resize(size);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < size) ++bits;
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t rev = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) rev |= std::size_t{1} << (bits - 1 - b);
    }
    bit_reverse_[i] = rev;
  }
  // Stage with half-length h uses exp(-2 pi i j / (2h)), j < h, stored at
  // offset h - 1 so every stage reads its factors contiguously.
  forward_twiddles_.resize(size > 1 ? size - 1 : 0);
  inverse_twiddles_.resize(forward_twiddles_.size());
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t j = 0; j < half; ++j) {
      const double angle = -std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(half);
      const Complex w(std::cos(angle), std::sin(angle));
      forward_twiddles_[half - 1 + j] = w;
      inverse_twiddles_[half - 1 + j] = std::conj(w);
    }
  }
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t size) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[size];
  if (!slot) slot = std::make_shared<const FftPlan>(size);
  return slot;
}

void FftPlan::forward(std::span<Complex> data) const { transform(data, false); }

void FftPlan::inverse(std::span<Complex> data) const {
  transform(data, true);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : data) v *= scale;
}

// Iterative radix-2 decimation in time.
void FftPlan::transform(std::span<Complex> data, bool inverse) const {
  if (data.size() != size_) {
    throw InvalidArgument("FftPlan: expected " + std::to_string(size_) +
                          " values, got " + std::to_string(data.size()));
  }
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  const Complex* table = inverse ? inverse_twiddles_.data() : forward_twiddles_.data();
  Complex* a = data.data();
  for (std::size_t start = 0; start + 1 < size_; start += 2) {
    const Complex u = a[start];
    const Complex v = a[start + 1];
    a[start] = u + v;
    a[start + 1] = u - v;
  }
  for (std::size_t half = 2; half < size_; half <<= 1) {
    const Complex* w = table + half - 1;
    for (std::size_t start = 0; start < size_; start += 2 * half) {
      Complex* lo = a + start;
      Complex* hi = lo + half;
      for (std::size_t j = 0; j < half; ++j) {
        const Complex u = lo[j];
        const Complex v = mul(hi[j], w[j]);
        lo[j] = u + v;
        hi[j] = u - v;
      }
    }
  }
}

RealFftPlan::RealFftPlan(std::size_t size) : size_(size) {
  require_power_of_two(size, "RealFftPlan");
  if (size == 1) return;
  half_ = FftPlan::get(size / 2);
  twiddles_.resize(size / 2);
  for (std::size_t k = 0; k < size / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(size);
    twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
  }
}

std::shared_ptr<const RealFftPlan> RealFftPlan::get(std::size_t size) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const RealFftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[size];
  if (!slot) slot = std::make_shared<const RealFftPlan>(size);
  return slot;
}

// Packs z[m] = x[2m] + i x[2m+1], transforms at length N = size/2 and splits
// Z into the even/odd spectra: X[k] = E[k] + W^k O[k].
void RealFftPlan::forward(std::span<const double> x, std::span<Complex> half_spectrum,
                          std::span<Complex> work) const {
  if (x.size() != size_ || half_spectrum.size() != size_ / 2 + 1 ||
      work.size() < size_ / 2) {
    throw InvalidArgument("RealFftPlan: buffer sizes do not match length " +
                          std::to_string(size_));
  }
  if (size_ == 1) {
    half_spectrum[0] = Complex(x[0], 0.0);
    return;
  }
  const std::size_t n = size_ / 2;
  auto z = work.first(n);
  for (std::size_t m = 0; m < n; ++m) z[m] = Complex(x[2 * m], x[2 * m + 1]);
  half_->forward(z);
  half_spectrum[0] = Complex(z[0].real() + z[0].imag(), 0.0);
  half_spectrum[n] = Complex(z[0].real() - z[0].imag(), 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const Complex a = z[k];
    const Complex b = std::conj(z[n - k]);
    const Complex even = 0.5 * (a + b);
    const Complex diff = 0.5 * (a - b);
    const Complex odd(diff.imag(), -diff.real());  // diff / i
    half_spectrum[k] = even + mul(twiddles_[k], odd);
  }
}

void RealFftPlan::inverse(std::span<const Complex> half_spectrum, std::span<double> out,
                          std::span<Complex> work) const {
  if (out.size() != size_ || half_spectrum.size() != size_ / 2 + 1 ||
      work.size() < size_ / 2) {
    throw InvalidArgument("RealFftPlan: buffer sizes do not match length " +
                          std::to_string(size_));
  }
  if (size_ == 1) {
    out[0] = half_spectrum[0].real();
    return;
  }
  const std::size_t n = size_ / 2;
  auto z = work.first(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex a = half_spectrum[k];
    const Complex b = std::conj(half_spectrum[n - k]);
    const Complex even = 0.5 * (a + b);
    const Complex odd = mul(0.5 * (a - b), std::conj(twiddles_[k]));
    z[k] = Complex(even.real() - odd.imag(), even.imag() + odd.real());  // even + i odd
  }
  half_->inverse(z);
  for (std::size_t m = 0; m < n; ++m) {
    out[2 * m] = z[m].real();
    out[2 * m + 1] = z[m].imag();
  }
}

ComplexSpectrum fft(std::span<const Complex> signal) {
  require_power_of_two(signal.size(), "fft");
  ComplexSpectrum out(signal.begin(), signal.end());
  FftPlan::get(out.size())->forward(out);
  return out;
}

ComplexSpectrum fft_real(std::span<const double> signal) {
  require_power_of_two(signal.size(), "fft");
  const std::size_t d = signal.size();
  ComplexSpectrum out(d + d / 2);
  std::span<Complex> all(out);
  RealFftPlan::get(d)->forward(signal, all.first(d / 2 + 1), all.subspan(d));
  out.resize(d);
  for (std::size_t l = d / 2 + 1; l < d; ++l) out[l] = std::conj(out[d - l]);
  return out;
}

std::vector<Complex> ifft(std::span<const Complex> spectrum) {
  require_power_of_two(spectrum.size(), "ifft");
  std::vector<Complex> out(spectrum.begin(), spectrum.end());
  FftPlan::get(out.size())->inverse(out);
  return out;
}

namespace {

void take_real_part(std::span<const Complex> values, std::span<double> out) {
  double max_real = 1.0;
  double max_imag = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    max_real = std::max(max_real, std::abs(values[i].real()));
    max_imag = std::max(max_imag, std::abs(values[i].imag()));
    out[i] = values[i].real();
  }
  if (!(max_imag < 1e-7 * max_real)) {
    throw NumericalError("imaginary residual " + std::to_string(max_imag) +
                         " after inverse transform of a real signal");
  }
}

}  // namespace

std::vector<double> ifft_real(std::span<const Complex> spectrum) {
  const auto values = ifft(spectrum);
  std::vector<double> out(values.size());
  take_real_part(values, out);
  return out;
}

bool is_conjugate_symmetric(std::span<const Complex> spectrum, double tol) {
  const std::size_t d = spectrum.size();
  if (d == 0) return false;
  if (std::abs(spectrum[0].imag()) > tol) return false;
  for (std::size_t i = 1; i <= d / 2; ++i) {
    if (std::abs(spectrum[d - i] - std::conj(spectrum[i])) > tol) return false;
  }
  return true;
}

CirculantOperator::CirculantOperator(std::span<const double> r)
    : CirculantOperator(fft_real(r)) {}

CirculantOperator::CirculantOperator(ComplexSpectrum spectrum)
    : spectrum_(std::move(spectrum)) {
  require_power_of_two(spectrum_.size(), "CirculantOperator");
  double scale = 1.0;
  for (const auto& v : spectrum_) scale = std::max(scale, std::abs(v));
  if (!is_conjugate_symmetric(spectrum_, 1e-9 * scale)) {
    throw InvalidArgument("CirculantOperator: spectrum is not conjugate symmetric");
  }
  plan_ = RealFftPlan::get(spectrum_.size());
}

void CirculantOperator::apply(std::span<const double> x, std::span<double> out,
                              std::vector<Complex>& scratch) const {
  const std::size_t d = spectrum_.size();
  if (x.size() != d || out.size() != d) {
    throw InvalidArgument("circulant multiply: expected length " +
                          std::to_string(d) + ", got " +
                          std::to_string(x.size()));
  }
  const std::size_t bins = d / 2 + 1;
  scratch.resize(bins + d / 2);
  std::span<Complex> all(scratch);
  auto half = all.first(bins);
  auto work = all.subspan(bins);
  plan_->forward(x, half, work);
  for (std::size_t l = 0; l < bins; ++l) half[l] = mul(half[l], spectrum_[l]);
  plan_->inverse(half, out, work);
}

std::vector<double> CirculantOperator::apply(std::span<const double> x) const {
  std::vector<double> out(spectrum_.size());
  std::vector<Complex> scratch;
  apply(x, out, scratch);
  return out;
}

std::vector<double> circulant_multiply(std::span<const double> r,
                                       std::span<const double> x) {
  if (r.size() != x.size()) {
    throw InvalidArgument("circulant_multiply: generator length " +
                          std::to_string(r.size()) + " != input length " +
                          std::to_string(x.size()));
  }
  return CirculantOperator(r).apply(x);
}

void fwht_inplace(std::span<double> data) {
  require_power_of_two(data.size(), "fwht");
  const std::size_t d = data.size();
  for (std::size_t half = 1; half < d; half <<= 1) {
    for (std::size_t start = 0; start < d; start += 2 * half) {
      for (std::size_t j = start; j < start + half; ++j) {
        const double a = data[j];
        const double b = data[j + half];
        data[j] = a + b;
        data[j + half] = a - b;
      }
    }
  }
}

std::vector<double> fwht(std::span<const double> signal) {
  std::vector<double> out(signal.begin(), signal.end());
  fwht_inplace(out);
  return out;
}

std::vector<double> circular_shift(std::span<const double> x, long long t) {
  const auto d = static_cast<long long>(x.size());
  std::vector<double> out(x.size());
  if (d == 0) return out;
  const long long shift = ((t % d) + d) % d;
  for (long long j = 0; j < d; ++j) {
    out[static_cast<std::size_t>(j)] =
        x[static_cast<std::size_t>((j - shift + d) % d)];
  }
  return out;
}

}  // namespace cbe
