// Copyright 2026 The heatleak Authors.
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

#ifndef HEATLEAK_PASSIVITY_HPP
#define HEATLEAK_PASSIVITY_HPP

// Passivity-based inequalities evaluated on computational-basis outcome
// distributions of the measured qubits. All operators here are diagonal in
// that basis, so an operator is represented by its value on each outcome.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace heatleak {

inline constexpr double kDefaultEpsilon = 1e-3;
inline constexpr double kCrossingTol = 1e-9;

/// B = sum_j beta_j H_j - d with d chosen so that min(basis_values) = epsilon.
struct GlobalPassivityOperator {
  std::vector<double> betas;  // one per measured qubit, register order
  double epsilon = kDefaultEpsilon;
  double d = 0.0;
  std::vector<double> basis_values;
};

GlobalPassivityOperator build_B(std::span<const double> betas,
                                double epsilon = kDefaultEpsilon);

/// sgn(alpha) b_k^alpha for every outcome.
std::vector<double> b_alpha_values(const GlobalPassivityOperator& B, double alpha);

/// <B^alpha>_final - <B^alpha>_initial. Negative values certify a heat leak.
double delta_B_alpha(std::span<const double> initial, std::span<const double> final_dist,
                     const GlobalPassivityOperator& B, double alpha);

/// beta_c d<H_c> + beta_h d<H_h> (generalized to any number of measured qubits).
double second_law_delta(std::span<const double> initial, std::span<const double> final_dist,
                        std::span<const double> betas);

/// tr[F(rho_0)(rho_f - rho_0)] for a diagonal F. F must be anti-ordered with
/// respect to `initial`: p_i > p_j requires F_i <= F_j.
double generic_F_delta(std::span<const double> initial, std::span<const double> final_dist,
                       std::span<const double> f_values);

/// True iff b_i < b_j implies b_i + xi a_i <= b_j + xi a_j for all pairs.
bool check_ordering_inherited(std::span<const double> b_values,
                              std::span<const double> a_values, double xi);

struct OutcomePair {
  std::size_t lower;  // outcome with the smaller b value
  std::size_t upper;
  bool operator==(const OutcomePair&) const = default;
};

struct DeformationBounds {
  double xi_min = 0.0;  // may be -infinity
  double xi_max = 0.0;  // may be +infinity
  std::vector<OutcomePair> min_binding;
  std::vector<OutcomePair> max_binding;
};

DeformationBounds deformation_bounds(std::span<const double> b_values,
                                     std::span<const double> a_values);

struct Crossing {
  double value;
  double uncertainty = 0.0;
};

struct SweepResult {
  std::string parameter_name;  // "alpha" or "xi"
  std::vector<double> grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> raw;  // d<B> + xi d<A>; empty for alpha sweeps
  std::vector<bool> violated;
  std::vector<double> ci_low;  // confidence channel of lhs - rhs, optional
  std::vector<double> ci_high;
  std::vector<Crossing> thresholds;

  double margin(std::size_t k) const { return lhs[k] - rhs[k]; }
};

/// Sign changes of f between adjacent grid points, refined by bisection to
/// `tol`. Brackets containing `excluded` (if finite) are skipped.
std::vector<double> find_sign_crossings(std::span<const double> grid,
                                        std::span<const double> values,
                                        const std::function<double(double)>& f,
                                        double tol = kCrossingTol,
                                        double excluded = std::numeric_limits<double>::quiet_NaN());

/// 121 uniform points on [-3, 3] with alpha = 0 removed.
std::vector<double> default_alpha_grid();

/// `points` uniform points spanning [xi_min, xi_max]; both bounds must be finite.
std::vector<double> auto_xi_grid(const DeformationBounds& bounds, std::size_t points = 101);

SweepResult alpha_sweep(std::span<const double> initial, std::span<const double> final_dist,
                        const GlobalPassivityOperator& B, std::span<const double> grid);

/// Deformed inequality with B' = B + xi A. lhs = d<H_c> with c the first
/// measured qubit, rhs = lhs - (d<B> + xi d<A>) / beta_c, which for A = H_h
/// is -((beta_h + xi) / beta_c) d<H_h>.
SweepResult deformation_sweep(std::span<const double> initial, std::span<const double> final_dist,
                              const GlobalPassivityOperator& B, std::span<const double> a_values,
                              std::span<const double> grid);

}  // namespace heatleak

#endif  // HEATLEAK_PASSIVITY_HPP
