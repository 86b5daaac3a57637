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

#include "cbe/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "cbe/errors.hpp"
#include "cbe/parallel.hpp"

namespace cbe {

namespace {

// Rows per partial sum in accumulate_stats. Fixed so the reduction order does
// not depend on the thread count.
constexpr std::size_t kReductionBlock = 64;

void require_finite(std::initializer_list<double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string(what) + ": non-finite input");
    }
  }
}

// Spectra of all rows, n x d row-major.
std::vector<Complex> row_spectra(const DataMatrix& x, unsigned threads) {
  const std::size_t d = x.cols();
  const auto plan = FftPlan::get(d);
  std::vector<Complex> out(x.rows() * d);
  parallel_for(x.rows(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::span<Complex> dst(out.data() + i * d, d);
      const auto src = x.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] = Complex(src[j], 0.0);
      plan->forward(dst);
    }
  });
  return out;
}

// Sums per-block partial vectors with a fixed pairwise tree.
std::vector<double> tree_reduce(std::vector<std::vector<double>> partials) {
  if (partials.empty()) return {};
  for (std::size_t stride = 1; stride < partials.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < partials.size(); i += 2 * stride) {
      auto& dst = partials[i];
      const auto& src = partials[i + stride];
      for (std::size_t l = 0; l < dst.size(); ++l) dst[l] += src[l];
    }
  }
  return std::move(partials.front());
}

struct Moments {
  std::vector<double> m;
  std::vector<double> h;
  std::vector<double> g;
};

// M, h, g from precomputed row spectra; M only when want_m is set.
Moments accumulate_moments(std::span<const Complex> spectra, std::size_t n,
                           std::size_t d, const TargetMatrix* b, bool want_m,
                           unsigned threads) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::vector<double>> pm(want_m ? blocks : 0);
  std::vector<std::vector<double>> ph(b ? blocks : 0);
  std::vector<std::vector<double>> pg(b ? blocks : 0);
  const auto plan = FftPlan::get(d);
  parallel_for(blocks, threads, [&](std::size_t first, std::size_t last) {
    std::vector<Complex> fb(d);
    for (std::size_t blk = first; blk < last; ++blk) {
      const std::size_t begin = blk * kReductionBlock;
      const std::size_t end = std::min(n, begin + kReductionBlock);
      if (want_m) pm[blk].assign(d, 0.0);
      if (b) {
        ph[blk].assign(d, 0.0);
        pg[blk].assign(d, 0.0);
      }
      for (std::size_t i = begin; i < end; ++i) {
        const Complex* fx = spectra.data() + i * d;
        if (want_m) {
          for (std::size_t l = 0; l < d; ++l) {
            pm[blk][l] += fx[l].real() * fx[l].real() + fx[l].imag() * fx[l].imag();
          }
        }
        if (b) {
          for (std::size_t j = 0; j < d; ++j) fb[j] = Complex(b->value(i, j), 0.0);
          plan->forward(fb);
          for (std::size_t l = 0; l < d; ++l) {
            ph[blk][l] += -2.0 * (fx[l].real() * fb[l].real() +
                                  fx[l].imag() * fb[l].imag());
            pg[blk][l] += 2.0 * (fx[l].imag() * fb[l].real() -
                                 fx[l].real() * fb[l].imag());
          }
        }
      }
    }
  });
  Moments out;
  if (want_m) out.m = tree_reduce(std::move(pm));
  if (b) {
    out.h = tree_reduce(std::move(ph));
    out.g = tree_reduce(std::move(pg));
  }
  if (want_m && out.m.empty()) out.m.assign(d, 0.0);
  if (b && out.h.empty()) {
    out.h.assign(d, 0.0);
    out.g.assign(d, 0.0);
  }
  return out;
}

// A = sum_similar |F(x_i - x_j)|^2 - sum_dissimilar |F(x_i - x_j)|^2.
std::vector<double> pair_diagonal(std::span<const Complex> spectra,
                                  std::size_t d,
                                  const PairConstraints& constraints) {
  std::vector<double> a(d, 0.0);
  auto add = [&](std::size_t i, std::size_t j, double sign) {
    const Complex* fi = spectra.data() + i * d;
    const Complex* fj = spectra.data() + j * d;
    for (std::size_t l = 0; l < d; ++l) a[l] += sign * std::norm(fi[l] - fj[l]);
  };
  for (auto [i, j] : constraints.similar) add(i, j, 1.0);
  for (auto [i, j] : constraints.dissimilar) add(i, j, -1.0);
  return a;
}

// Real roots of t^3 + p t + q = 0, each polished by Newton steps.
int depressed_cubic_roots(double p, double q, std::array<double, 3>& roots) {
  int count = 0;
  if (p == 0.0) {
    roots[0] = std::cbrt(-q);
    count = 1;
  } else {
    const double half_q = 0.5 * q;
    const double third_p = p / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;
    if (disc > 0.0) {
      // Cardano with the cube root of larger magnitude to limit cancellation.
      const double a = -std::copysign(std::cbrt(std::abs(half_q) + std::sqrt(disc)), q);
      roots[0] = a - third_p / a;
      count = 1;
    } else {
      // Three real roots (p < 0): trigonometric form.
      const double radius = 2.0 * std::sqrt(-third_p);
      const double arg = std::clamp((3.0 * q / (2.0 * p)) * std::sqrt(-3.0 / p), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int j = 0; j < 3; ++j) {
        roots[j] = radius * std::cos(phi - 2.0 * std::numbers::pi * j / 3.0);
      }
      count = 3;
    }
  }
  for (int j = 0; j < count; ++j) {
    double t = roots[j];
    double residual = std::abs(t * t * t + p * t + q);
    for (int it = 0; it < 4 && residual > 0.0; ++it) {
      const double slope = 3.0 * t * t + p;
      if (slope == 0.0) break;
      const double next = t - (t * t * t + p * t + q) / slope;
      const double next_residual = std::abs(next * next * next + p * next + q);
      if (!(next_residual < residual)) break;
      t = next;
      residual = next_residual;
    }
    roots[j] = t;
  }
  return count;
}

PairPoint radial_pair(double m_sum, double h_sum, double g_diff, double c,
                      PairPoint warm) {
  const double n = std::hypot(h_sum, g_diff);
  const double s = solve_dc(m_sum, -n, c);
  if (n > 0.0) return {-s * h_sum / n, -s * g_diff / n};
  const double w = std::hypot(warm.re, warm.im);
  if (w > 0.0) return {s * warm.re / w, s * warm.im / w};
  return {s, 0.0};
}

PairPoint descent_pair(double m_sum, double h_sum, double g_diff, double c,
                       PairPoint warm, const GradientDescentOptions& gd) {
  auto f = [&](PairPoint p) {
    return pair_objective(m_sum, h_sum, g_diff, c, p);
  };
  auto grad = [&](PairPoint p) {
    const double radial = 2.0 * m_sum + 4.0 * c * (p.re * p.re + p.im * p.im - 1.0);
    return PairPoint{radial * p.re + h_sum, radial * p.im + g_diff};
  };
  PairPoint x = warm;
  double fx = f(x);
  PairPoint gx = grad(x);
  double step = gd.step_init;
  for (int it = 0; it < gd.max_steps; ++it) {
    const double gnorm2 = gx.re * gx.re + gx.im * gx.im;
    if (std::sqrt(gnorm2) < 1e-8) break;
    double t = step;
    PairPoint candidate;
    double fc = 0.0;
    bool accepted = false;
    while (t > 1e-18) {
      candidate = {x.re - t * gx.re, x.im - t * gx.im};
      fc = f(candidate);
      if (fc <= fx - 1e-4 * t * gnorm2) {
        accepted = true;
        break;
      }
      t *= gd.backtrack;
    }
    if (!accepted) break;
    const PairPoint gc = grad(candidate);
    // Barzilai-Borwein step for the next trial.
    const double sx = candidate.re - x.re;
    const double sy = candidate.im - x.im;
    const double yx = gc.re - gx.re;
    const double yy = gc.im - gx.im;
    const double curvature = sx * yx + sy * yy;
    step = curvature > 0.0 ? (sx * sx + sy * sy) / curvature : 2.0 * t;
    x = candidate;
    fx = fc;
    gx = gc;
  }
  return x;
}

}  // namespace

void OptConfig::validate(std::size_t d) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be finite and >= 0");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw InvalidArgument("mu must be finite and >= 0");
  }
  if (k > d) {
    throw InvalidArgument("k=" + std::to_string(k) + " exceeds d=" +
                          std::to_string(d));
  }
  if (max_outer_iters < 0) throw InvalidArgument("max_outer_iters must be >= 0");
  if (!(objective_rel_tol >= 0.0)) {
    throw InvalidArgument("objective_rel_tol must be >= 0");
  }
  if (inner_gd.max_steps < 0 || !(inner_gd.step_init > 0.0) ||
      !(inner_gd.backtrack > 0.0 && inner_gd.backtrack < 1.0)) {
    throw InvalidArgument("invalid gradient-descent options");
  }
}

void PairConstraints::validate(std::size_t n) const {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  auto key = [](std::pair<std::size_t, std::size_t> p) {
    return std::pair{std::min(p.first, p.second), std::max(p.first, p.second)};
  };
  for (auto p : similar) {
    if (p.first >= n || p.second >= n) {
      throw InvalidArgument("similar pair (" + std::to_string(p.first) + ", " +
                            std::to_string(p.second) + ") out of range");
    }
    seen.insert(key(p));
  }
  for (auto p : dissimilar) {
    if (p.first >= n || p.second >= n) {
      throw InvalidArgument("dissimilar pair (" + std::to_string(p.first) +
                            ", " + std::to_string(p.second) + ") out of range");
    }
    if (seen.contains(key(p))) {
      throw InvalidArgument("pair (" + std::to_string(p.first) + ", " +
                            std::to_string(p.second) +
                            ") is both similar and dissimilar");
    }
  }
}

TargetMatrix::TargetMatrix(std::size_t rows, std::size_t cols, double scale)
    : rows_(rows), cols_(cols), scale_(scale), signs_(rows * cols, 0) {}

double TargetMatrix::squared_norm() const {
  std::size_t nonzero = 0;
  for (auto s : signs_) nonzero += s != 0;
  return static_cast<double>(nonzero) * scale_ * scale_;
}

TargetMatrix update_B(std::span<const double> r, const DataMatrix& x,
                      std::size_t k, double code_scale, unsigned threads) {
  const std::size_t d = r.size();
  if (x.cols() != d) {
    throw InvalidArgument("update_B: data has " + std::to_string(x.cols()) +
                          " columns, generator has " + std::to_string(d));
  }
  if (k == 0 || k > d) throw InvalidArgument("update_B: k must lie in [1, d]");
  const CirculantOperator op(r);
  TargetMatrix b(x.rows(), d, code_scale);
  parallel_for(x.rows(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(d);
    std::vector<double> proj(d);
    std::vector<Complex> scratch;
    for (std::size_t i = begin; i < end; ++i) {
      const auto src = x.row(i);
      std::copy(src.begin(), src.end(), row.begin());
      op.apply(row, proj, scratch);
      for (std::size_t j = 0; j < k; ++j) b.set_sign(i, j, proj[j] >= 0.0 ? 1 : -1);
    }
  });
  return b;
}

FrequencyStats accumulate_stats(const DataMatrix& x, const TargetMatrix& b,
                                const PairConstraints& constraints, double mu,
                                unsigned threads) {
  const std::size_t d = x.cols();
  if (b.rows() != x.rows() || b.cols() != d) {
    throw InvalidArgument("accumulate_stats: targets shape does not match data");
  }
  constraints.validate(x.rows());
  const auto spectra = row_spectra(x, threads);
  auto moments = accumulate_moments(spectra, x.rows(), d, &b, true, threads);
  FrequencyStats stats;
  stats.m_diag = std::move(moments.m);
  stats.h = std::move(moments.h);
  stats.g = std::move(moments.g);
  stats.a_diag = pair_diagonal(spectra, d, constraints);
  stats.mu = mu;
  return stats;
}

double dc_objective(double m, double h, double c, double t) {
  const double u = t * t - 1.0;
  return m * t * t + h * t + c * u * u;
}

double solve_dc(double m, double h, double c) {
  require_finite({m, h, c}, "solve_dc");
  if (c < 0.0) throw InvalidArgument("solve_dc: c must be >= 0");
  if (c == 0.0) {
    if (m > 0.0) return -h / (2.0 * m);
    if (m == 0.0 && h == 0.0) return 0.0;
    throw UnboundedObjectiveError(
        "subproblem unbounded below: quadratic coefficient " +
        std::to_string(m) + " with zero quartic weight");
  }
  std::array<double, 3> roots{};
  const int count = depressed_cubic_roots(m / (2.0 * c) - 1.0, h / (4.0 * c), roots);
  double best = roots[0];
  double best_value = dc_objective(m, h, c, best);
  for (int j = 1; j < count; ++j) {
    const double value = dc_objective(m, h, c, roots[j]);
    const double tie = 1e-12 * (1.0 + std::abs(value) + std::abs(best_value));
    if (value < best_value - tie ||
        (std::abs(value - best_value) <= tie && roots[j] > best)) {
      best = roots[j];
      best_value = value;
    }
  }
  return best;
}

double pair_objective(double m_sum, double h_sum, double g_diff, double c,
                      PairPoint p) {
  const double s2 = p.re * p.re + p.im * p.im;
  const double u = s2 - 1.0;
  return m_sum * s2 + c * u * u + h_sum * p.re + g_diff * p.im;
}

PairPoint solve_pair(double m_sum, double h_sum, double g_diff, double c,
                     SolverMode mode, PairPoint warm,
                     const GradientDescentOptions& gd) {
  require_finite({m_sum, h_sum, g_diff, c, warm.re, warm.im}, "solve_pair");
  if (c < 0.0) throw InvalidArgument("solve_pair: c must be >= 0");
  if (mode == SolverMode::kRadialExact || c == 0.0) {
    return radial_pair(m_sum, h_sum, g_diff, c, warm);
  }
  return descent_pair(m_sum, h_sum, g_diff, c, warm, gd);
}

ComplexSpectrum update_spectrum(const OptState& state, const OptConfig& config) {
  const std::size_t d = state.m_diag.size();
  if (d == 0 || state.h.size() != d || state.g.size() != d ||
      state.r_spectrum.size() != d) {
    throw InvalidArgument("update_spectrum: inconsistent state sizes");
  }
  const bool has_a = !state.a_diag.empty();
  if (has_a && state.a_diag.size() != d) {
    throw InvalidArgument("update_spectrum: a_diag size mismatch");
  }
  auto meff = [&](std::size_t l) {
    return state.m_diag[l] + (has_a ? config.mu * state.a_diag[l] : 0.0);
  };
  const double c = config.lambda * static_cast<double>(d);
  const auto& current = state.r_spectrum;
  ComplexSpectrum next(d);

  auto solve_real = [&](std::size_t l) {
    const double incumbent = current[l].real();
    const double t = solve_dc(meff(l), state.h[l], c);
    const bool better = dc_objective(meff(l), state.h[l], c, t) <=
                        dc_objective(meff(l), state.h[l], c, incumbent);
    next[l] = Complex(better ? t : incumbent, 0.0);
  };

  solve_real(0);
  if (d % 2 == 0 && d >= 2) solve_real(d / 2);

  const std::size_t pairs = (d - 1) / 2;  // i = 1 .. ceil(d/2) - 1
  parallel_for(pairs, config.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t i = p + 1;
      const double m_sum = meff(i) + meff(d - i);
      const double h_sum = state.h[i] + state.h[d - i];
      const double g_diff = state.g[i] - state.g[d - i];
      const PairPoint incumbent{current[i].real(), current[i].imag()};
      PairPoint best = solve_pair(m_sum, h_sum, g_diff, 2.0 * c,
                                  config.solver_mode, incumbent, config.inner_gd);
      if (pair_objective(m_sum, h_sum, g_diff, 2.0 * c, best) >
          pair_objective(m_sum, h_sum, g_diff, 2.0 * c, incumbent)) {
        best = incumbent;
      }
      next[i] = Complex(best.re, best.im);
      next[d - i] = Complex(best.re, -best.im);
    }
  });
  return next;
}

ObjectiveTerms frequency_objective_terms(std::span<const Complex> r_spectrum,
                                         const FrequencyStats& stats,
                                         double b_squared_norm) {
  const std::size_t d = r_spectrum.size();
  if (stats.size() != d || stats.h.size() != d || stats.g.size() != d) {
    throw InvalidArgument("frequency_objective_terms: size mismatch");
  }
  const bool has_a = stats.a_diag.size() == d;
  ObjectiveTerms terms;
  double quad = 0.0;
  double pair = 0.0;
  for (std::size_t l = 0; l < d; ++l) {
    const double re = r_spectrum[l].real();
    const double im = r_spectrum[l].imag();
    const double power = re * re + im * im;
    quad += stats.m_diag[l] * power + stats.h[l] * re + stats.g[l] * im;
    const double u = power - 1.0;
    terms.orthogonality += u * u;
    if (has_a) pair += stats.a_diag[l] * power;
  }
  const double inv_d = 1.0 / static_cast<double>(d);
  terms.distortion = quad * inv_d + b_squared_norm;
  terms.semi_supervised = pair * inv_d;
  return terms;
}

ObjectiveTerms objective_terms(std::span<const double> r, const DataMatrix& x,
                               const TargetMatrix& b,
                               const PairConstraints& constraints,
                               ObjectiveRoute route, unsigned threads) {
  const std::size_t d = r.size();
  if (x.cols() != d || b.rows() != x.rows() || b.cols() != d) {
    throw InvalidArgument("objective: inconsistent shapes");
  }
  constraints.validate(x.rows());
  if (route == ObjectiveRoute::kFrequencyDomain) {
    const auto stats = accumulate_stats(x, b, constraints, 0.0, threads);
    return frequency_objective_terms(fft_real(r), stats, b.squared_norm());
  }

  // Dense circulant, R(i, j) = r[(i - j) mod d].
  std::vector<double> dense(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) dense[i * d + j] = r[(i + d - j) % d];
  }
  auto apply = [&](std::span<const double> v, std::vector<double>& out) {
    out.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += dense[i * d + j] * v[j];
      out[i] = acc;
    }
  };
  ObjectiveTerms terms;
  std::vector<double> v(d);
  std::vector<double> y;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) v[j] = x(i, j);
    apply(v, y);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = b.value(i, j) - y[j];
      terms.distortion += diff * diff;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < d; ++m) acc += dense[i * d + m] * dense[j * d + m];
      const double diff = acc - (i == j ? 1.0 : 0.0);
      terms.orthogonality += diff * diff;
    }
  }
  auto pair_term = [&](std::size_t a, std::size_t c) {
    for (std::size_t j = 0; j < d; ++j) {
      v[j] = static_cast<double>(x(a, j)) - static_cast<double>(x(c, j));
    }
    apply(v, y);
    double sq = 0.0;
    for (double t : y) sq += t * t;
    return sq;
  };
  for (auto [a, c] : constraints.similar) terms.semi_supervised += pair_term(a, c);
  for (auto [a, c] : constraints.dissimilar) terms.semi_supervised -= pair_term(a, c);
  return terms;
}

double objective(std::span<const double> r, const DataMatrix& x,
                 const TargetMatrix& b, double lambda, double mu,
                 const PairConstraints& constraints, ObjectiveRoute route) {
  return objective_terms(r, x, b, constraints, route).total(lambda, mu);
}

namespace {

// Training-loop state around a fixed, sign-flipped data matrix.
class AlternatingSolver {
 public:
  AlternatingSolver(const DataMatrix& flipped, const OptConfig& config,
                    const PairConstraints& constraints)
      : n_(flipped.rows()),
        d_(flipped.cols()),
        k_(config.k == 0 ? flipped.cols() : config.k),
        config_(config),
        code_scale_(config.normalized_codes ? 1.0 / std::sqrt(static_cast<double>(d_)) : 1.0),
        spectra_(row_spectra(flipped, config.threads)),
        plan_(FftPlan::get(d_)) {
    state_.m_diag = accumulate_moments(spectra_, n_, d_, nullptr, true, config.threads).m;
    state_.a_diag = pair_diagonal(spectra_, d_, constraints);
    state_.b = TargetMatrix(n_, d_, code_scale_);
  }

  void set_spectrum(ComplexSpectrum spectrum) {
    state_.r_spectrum = std::move(spectrum);
    projections_ = project(state_.r_spectrum);
  }

  // Exact coordinate minimizer over B with columns >= k pinned to zero.
  double update_targets() {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < k_; ++j) {
        state_.b.set_sign(i, j, projections_[i * d_ + j] >= 0.0 ? 1 : -1);
      }
    }
    return evaluate(state_.r_spectrum, projections_);
  }

  // Spectrum step. Falls back to the incumbent if the evaluated objective
  // would increase.
  double update_spectrum_step(double incumbent_value) {
    const auto moments =
        accumulate_moments(spectra_, n_, d_, &state_.b, false, config_.threads);
    state_.h = moments.h;
    state_.g = moments.g;
    auto candidate = update_spectrum(state_, config_);
    auto candidate_proj = project(candidate);
    const double value = evaluate(candidate, candidate_proj);
    if (value > incumbent_value) return incumbent_value;
    state_.r_spectrum = std::move(candidate);
    projections_ = std::move(candidate_proj);
    return value;
  }

  const ComplexSpectrum& spectrum() const { return state_.r_spectrum; }

 private:
  std::vector<double> project(const ComplexSpectrum& spectrum) const {
    std::vector<double> out(n_ * d_);
    parallel_for(n_, config_.threads, [&](std::size_t begin, std::size_t end) {
      std::vector<Complex> buf(d_);
      for (std::size_t i = begin; i < end; ++i) {
        const Complex* fx = spectra_.data() + i * d_;
        for (std::size_t l = 0; l < d_; ++l) buf[l] = fx[l] * spectrum[l];
        plan_->inverse(buf);
        for (std::size_t j = 0; j < d_; ++j) out[i * d_ + j] = buf[j].real();
      }
    });
    return out;
  }

  double evaluate(const ComplexSpectrum& spectrum,
                  const std::vector<double>& proj) const {
    double distortion = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < d_; ++j) {
        const double diff = state_.b.value(i, j) - proj[i * d_ + j];
        row += diff * diff;
      }
      distortion += row;
    }
    double orthogonality = 0.0;
    double pair = 0.0;
    for (std::size_t l = 0; l < d_; ++l) {
      const double power = std::norm(spectrum[l]);
      const double u = power - 1.0;
      orthogonality += u * u;
      pair += state_.a_diag[l] * power;
    }
    return distortion + config_.lambda * orthogonality +
           config_.mu * pair / static_cast<double>(d_);
  }

  std::size_t n_;
  std::size_t d_;
  std::size_t k_;
  OptConfig config_;
  double code_scale_;
  std::vector<Complex> spectra_;
  std::shared_ptr<const FftPlan> plan_;
  OptState state_;
  std::vector<double> projections_;
};

}  // namespace

TrainResult train(const DataMatrix& x, const OptConfig& config,
                  const PairConstraints& constraints, std::uint64_t seed) {
  if (x.empty() || x.cols() == 0) throw InvalidArgument("train: empty data");
  const std::size_t d = x.cols();
  if (!is_power_of_two(d)) {
    throw InvalidArgument("train: d=" + std::to_string(d) +
                          " is not a power of two");
  }
  config.validate(d);
  constraints.validate(x.rows());
  const std::size_t k = config.k == 0 ? d : config.k;

  TrainResult result;
  result.params = cbe_random(d, d, seed);
  result.params.k = k;
  if (config.max_outer_iters == 0) return result;

  DataMatrix flipped = x;
  for (std::size_t i = 0; i < flipped.rows(); ++i) {
    auto row = flipped.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      if (result.params.signs[j] < 0) row[j] = -row[j];
    }
  }

  AlternatingSolver solver(flipped, config, constraints);
  ComplexSpectrum spectrum = fft_real(result.params.r);
  spectrum[0] = Complex(spectrum[0].real(), 0.0);
  for (std::size_t i = 1; i <= d / 2; ++i) spectrum[d - i] = std::conj(spectrum[i]);
  if (d % 2 == 0) spectrum[d / 2] = Complex(spectrum[d / 2].real(), 0.0);
  solver.set_spectrum(std::move(spectrum));

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 0; iter < config.max_outer_iters; ++iter) {
    const double after_b = solver.update_targets();
    result.objective_trace.push_back(after_b);
    if (std::isnan(previous)) previous = after_b;
    const double after_r = solver.update_spectrum_step(after_b);
    result.objective_trace.push_back(after_r);
    result.iterations = iter + 1;
    const double decrease = (previous - after_r) / std::max(std::abs(previous), 1e-300);
    previous = after_r;
    if (decrease < config.objective_rel_tol) {
      result.converged = true;
      break;
    }
  }
  result.params.r = ifft_real(solver.spectrum());
  return result;
}

}  // namespace cbe
