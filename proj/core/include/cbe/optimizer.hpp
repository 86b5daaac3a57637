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

// Data-dependent circulant embedding. Minimizes
//
//   ||B - X R^T||_F^2 + lambda ||R R^T - I||_F^2 + mu J(R),   R = circ(r)
//
// by alternating an exact sign update of the binary targets B (signal domain)
// with an update of the spectrum r~ = F(r) (frequency domain). In the
// frequency domain the objective splits into independent quartics: one real
// scalar for the DC term, one for the Nyquist term when d is even, and one
// two-variable quartic per conjugate pair (r~_i, r~_{d-i}).
//
// For k < d the targets B[:, j >= k] are pinned to zero, so the same
// decomposition applies.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cbe/data_matrix.hpp"
#include "cbe/encoders.hpp"
#include "cbe/transforms.hpp"

namespace cbe {

enum class SolverMode {
  kRadialExact,
  kGradientDescent,
};

struct GradientDescentOptions {
  int max_steps = 200;
  double step_init = 0.1;
  double backtrack = 0.5;
};

struct OptConfig {
  double lambda = 1.0;
  double mu = 0.0;
  std::size_t k = 0;  // 0 means k = d
  int max_outer_iters = 10;
  double objective_rel_tol = 1e-4;
  GradientDescentOptions inner_gd;
  SolverMode solver_mode = SolverMode::kRadialExact;
  // Targets in {-1/sqrt(d), +1/sqrt(d)} instead of {-1, +1}.
  bool normalized_codes = false;
  unsigned threads = 1;

  void validate(std::size_t d) const;
};

// Similar / dissimilar index pairs for the semi-supervised term
// J(R) = sum_similar ||R(x_i - x_j)||^2 - sum_dissimilar ||R(x_i - x_j)||^2.
struct PairConstraints {
  std::vector<std::pair<std::size_t, std::size_t>> similar;
  std::vector<std::pair<std::size_t, std::size_t>> dissimilar;

  bool empty() const { return similar.empty() && dissimilar.empty(); }
  // Indices < n and no unordered pair in both sets.
  void validate(std::size_t n) const;
};

// Binary targets: entries in {-1, 0, +1}, each multiplied by scale.
class TargetMatrix {
 public:
  TargetMatrix() = default;
  TargetMatrix(std::size_t rows, std::size_t cols, double scale = 1.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double scale() const { return scale_; }

  std::int8_t sign(std::size_t i, std::size_t j) const {
    return signs_[i * cols_ + j];
  }
  void set_sign(std::size_t i, std::size_t j, std::int8_t s) {
    signs_[i * cols_ + j] = s;
  }
  double value(std::size_t i, std::size_t j) const {
    return scale_ * signs_[i * cols_ + j];
  }
  std::span<const std::int8_t> row(std::size_t i) const {
    return {signs_.data() + i * cols_, cols_};
  }
  double squared_norm() const;

  friend bool operator==(const TargetMatrix&, const TargetMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double scale_ = 1.0;
  std::vector<std::int8_t> signs_;
};

// Diagonal quadratic statistics of the distortion term in the frequency
// domain, plus the semi-supervised diagonal. The r~ subproblems use
// m_diag + mu * a_diag as their quadratic coefficient.
struct FrequencyStats {
  std::vector<double> m_diag;
  std::vector<double> h;
  std::vector<double> g;
  std::vector<double> a_diag;
  double mu = 0.0;

  std::size_t size() const { return m_diag.size(); }
  double effective_m(std::size_t l) const { return m_diag[l] + mu * a_diag[l]; }
};

struct OptState {
  ComplexSpectrum r_spectrum;
  TargetMatrix b;
  std::vector<double> m_diag;
  std::vector<double> h;
  std::vector<double> g;
  std::vector<double> a_diag;
  std::vector<double> objective_trace;

  FrequencyStats stats(double mu) const { return {m_diag, h, g, a_diag, mu}; }
};

// B[i][j] = +1 if (circ(r) x_i)[j] >= 0 else -1 for j < k; 0 for j >= k.
TargetMatrix update_B(std::span<const double> r, const DataMatrix& x,
                      std::size_t k, double code_scale = 1.0,
                      unsigned threads = 1);

// Frequency-domain statistics. Rows are reduced in fixed-size blocks combined
// by a fixed pairwise tree, so the result is bit-identical for any thread
// count.
FrequencyStats accumulate_stats(const DataMatrix& x, const TargetMatrix& b,
                                const PairConstraints& constraints, double mu,
                                unsigned threads = 1);

// f(t) = m t^2 + h t + c (t^2 - 1)^2.
double dc_objective(double m, double h, double c, double t);

// Global minimizer of dc_objective via the closed-form roots of
// f'(t) = 4c t^3 + (2m - 4c) t + h. Ties go to the larger t. With c == 0 the
// problem is quadratic; it is unbounded (UnboundedObjectiveError) if m < 0, or
// m == 0 with h != 0.
double solve_dc(double m, double h, double c);

struct PairPoint {
  double re = 0.0;
  double im = 0.0;
};

// f(a, b) = m (a^2 + b^2) + c (a^2 + b^2 - 1)^2 + h a + g b.
double pair_objective(double m_sum, double h_sum, double g_diff, double c,
                      PairPoint p);

// Minimizes pair_objective. kRadialExact reduces to a scalar quartic in the
// radius along the direction -(h, g) (warm direction if (h, g) = 0, else
// (1, 0)). kGradientDescent runs backtracking descent from warm.
PairPoint solve_pair(double m_sum, double h_sum, double g_diff, double c,
                     SolverMode mode, PairPoint warm,
                     const GradientDescentOptions& gd = {});

// New spectrum for fixed targets. Each per-frequency subproblem keeps the
// incumbent from state.r_spectrum when the solver result is not better, and
// the output is exactly conjugate symmetric.
ComplexSpectrum update_spectrum(const OptState& state, const OptConfig& config);

struct ObjectiveTerms {
  double distortion = 0.0;      // ||B - X R^T||_F^2
  double orthogonality = 0.0;   // ||R R^T - I||_F^2
  double semi_supervised = 0.0; // J(R)

  double total(double lambda, double mu) const {
    return distortion + lambda * orthogonality + mu * semi_supervised;
  }
};

enum class ObjectiveRoute {
  kTimeDomain,       // dense d x d circulant; O(n d^2), for tests
  kFrequencyDomain,  // from the spectrum and FrequencyStats
};

ObjectiveTerms objective_terms(std::span<const double> r, const DataMatrix& x,
                               const TargetMatrix& b,
                               const PairConstraints& constraints,
                               ObjectiveRoute route, unsigned threads = 1);

// (1/d)[Re^T M Re + Im^T M Im + Re^T h + Im^T g] + ||B||^2 for the distortion,
// ||Re^2 + Im^2 - 1||^2 for orthogonality, (1/d)(Re^T A Re + Im^T A Im) for J.
ObjectiveTerms frequency_objective_terms(std::span<const Complex> r_spectrum,
                                         const FrequencyStats& stats,
                                         double b_squared_norm);

double objective(std::span<const double> r, const DataMatrix& x,
                 const TargetMatrix& b, double lambda, double mu,
                 const PairConstraints& constraints,
                 ObjectiveRoute route = ObjectiveRoute::kFrequencyDomain);

struct TrainResult {
  CirculantParams params;
  // Objective after every half step (B update, then spectrum update),
  // starting with the B update of the random initialization.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

// Alternating optimization from a cbe_random(d, d, seed) initialization. The
// random sign diagonal D is drawn once and applied to X up front; only r is
// optimized. The returned params carry that D and k = config.k.
TrainResult train(const DataMatrix& x, const OptConfig& config,
                  const PairConstraints& constraints, std::uint64_t seed);

}  // namespace cbe
