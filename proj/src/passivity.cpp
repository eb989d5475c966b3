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

#include "heatleak/passivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "heatleak/error.hpp"
#include "heatleak/register.hpp"

namespace heatleak {

namespace {

void check_distribution_pair(std::span<const double> initial, std::span<const double> final_dist,
                             std::size_t outcomes, const char* what) {
  if (initial.size() != outcomes || final_dist.size() != outcomes) {
    throw invalid_argument(std::string(what) + ": expected " + std::to_string(outcomes) +
                           " outcomes, got " + std::to_string(initial.size()) + " and " +
                           std::to_string(final_dist.size()));
  }
}

double delta_of(std::span<const double> initial, std::span<const double> final_dist,
                std::span<const double> values) {
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    acc += values[k] * (final_dist[k] - initial[k]);
  }
  return acc;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void require_increasing(std::span<const double> grid, const char* what) {
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw invalid_argument(std::string(what) + ": grid must be strictly increasing");
    }
  }
}

}  // namespace

GlobalPassivityOperator build_B(std::span<const double> betas, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw invalid_argument("build_B: epsilon must be a positive finite number");
  }
  if (betas.empty() || betas.size() > kMaxQubits) {
    throw invalid_argument("build_B: need between 1 and 10 inverse temperatures");
  }
  for (double b : betas) {
    if (!std::isfinite(b)) throw invalid_argument("build_B: inverse temperatures must be finite");
  }
  const std::size_t m = betas.size();
  const std::size_t outcomes = std::size_t{1} << m;
  std::vector<double> energy(outcomes, 0.0);
  for (std::size_t k = 0; k < outcomes; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      if (k & (std::size_t{1} << (m - 1 - j))) energy[k] += betas[j];
    }
  }
  const auto min_it = std::min_element(energy.begin(), energy.end());
  GlobalPassivityOperator B;
  B.betas.assign(betas.begin(), betas.end());
  B.epsilon = epsilon;
  B.d = *min_it - epsilon;
  B.basis_values.resize(outcomes);
  for (std::size_t k = 0; k < outcomes; ++k) B.basis_values[k] = energy[k] - B.d;
  B.basis_values[static_cast<std::size_t>(min_it - energy.begin())] = epsilon;
  return B;
}

std::vector<double> b_alpha_values(const GlobalPassivityOperator& B, double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha)) {
    throw invalid_argument("b_alpha_values: alpha must be finite and nonzero");
  }
  const double sign = alpha > 0.0 ? 1.0 : -1.0;
  std::vector<double> out(B.basis_values.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = sign * std::pow(B.basis_values[k], alpha);
  }
  return out;
}

double delta_B_alpha(std::span<const double> initial, std::span<const double> final_dist,
                     const GlobalPassivityOperator& B, double alpha) {
  check_distribution_pair(initial, final_dist, B.basis_values.size(), "delta_B_alpha");
  return delta_of(initial, final_dist, b_alpha_values(B, alpha));
}

double second_law_delta(std::span<const double> initial, std::span<const double> final_dist,
                        std::span<const double> betas) {
  if (betas.empty() || betas.size() > kMaxQubits) {
    throw invalid_argument("second_law_delta: need between 1 and 10 inverse temperatures");
  }
  const std::size_t m = betas.size();
  check_distribution_pair(initial, final_dist, std::size_t{1} << m, "second_law_delta");
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto h = energy_observable("", j, m);
    acc += betas[j] * delta_of(initial, final_dist, h.basis_values);
  }
  return acc;
}

double generic_F_delta(std::span<const double> initial, std::span<const double> final_dist,
                       std::span<const double> f_values) {
  check_distribution_pair(initial, final_dist, f_values.size(), "generic_F_delta");
  std::ostringstream bad;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < f_values.size(); ++i) {
    for (std::size_t j = 0; j < f_values.size(); ++j) {
      if (initial[i] > initial[j] && f_values[i] > f_values[j]) {
        bad << (violations++ ? ", " : "") << '(' << i << ',' << j << ')';
      }
    }
  }
  if (violations) {
    throw invalid_argument(
        "generic_F_delta: F is not anti-ordered with the initial distribution; "
        "offending (more populated, less populated) outcome pairs: " + bad.str());
  }
  return delta_of(initial, final_dist, f_values);
}

bool check_ordering_inherited(std::span<const double> b_values,
                              std::span<const double> a_values, double xi) {
  if (b_values.size() != a_values.size()) {
    throw invalid_argument("check_ordering_inherited: outcome count mismatch");
  }
  const double tol = 1e-12 * std::max({1.0, max_abs(b_values), std::abs(xi) * max_abs(a_values)});
  for (std::size_t i = 0; i < b_values.size(); ++i) {
    for (std::size_t j = 0; j < b_values.size(); ++j) {
      if (!(b_values[i] < b_values[j])) continue;
      const double gap = (b_values[j] + xi * a_values[j]) - (b_values[i] + xi * a_values[i]);
      if (gap < -tol) return false;
    }
  }
  return true;
}

DeformationBounds deformation_bounds(std::span<const double> b_values,
                                     std::span<const double> a_values) {
  if (b_values.size() != a_values.size()) {
    throw invalid_argument("deformation_bounds: outcome count mismatch");
  }
  DeformationBounds out;
  out.xi_min = -INFINITY;
  out.xi_max = INFINITY;
  struct Candidate {
    double value;
    OutcomePair pair;
  };
  std::vector<Candidate> lower, upper;
  for (std::size_t i = 0; i < b_values.size(); ++i) {
    for (std::size_t j = 0; j < b_values.size(); ++j) {
      if (!(b_values[i] < b_values[j]) || a_values[i] == a_values[j]) continue;
      // b_i + xi a_i <= b_j + xi a_j  <=>  xi (a_i - a_j) <= b_j - b_i
      const double v = (b_values[j] - b_values[i]) / (a_values[i] - a_values[j]);
      if (a_values[i] > a_values[j]) {
        upper.push_back({v, {i, j}});
        out.xi_max = std::min(out.xi_max, v);
      } else {
        lower.push_back({v, {i, j}});
        out.xi_min = std::max(out.xi_min, v);
      }
    }
  }
  auto binding = [](const std::vector<Candidate>& cands, double bound) {
    std::vector<OutcomePair> pairs;
    for (const auto& c : cands) {
      if (std::abs(c.value - bound) <= 1e-12 * std::max(1.0, std::abs(bound))) {
        pairs.push_back(c.pair);
      }
    }
    return pairs;
  };
  if (std::isfinite(out.xi_min)) out.min_binding = binding(lower, out.xi_min);
  if (std::isfinite(out.xi_max)) out.max_binding = binding(upper, out.xi_max);
  return out;
}

std::vector<double> find_sign_crossings(std::span<const double> grid,
                                        std::span<const double> values,
                                        const std::function<double(double)>& f, double tol,
                                        double excluded) {
  if (grid.size() != values.size()) {
    throw invalid_argument("find_sign_crossings: grid and values differ in length");
  }
  std::vector<double> crossings;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (std::isfinite(excluded) && grid[k] <= excluded && excluded <= grid[k + 1]) continue;
    const double va = values[k], vb = values[k + 1];
    if (!((va < 0.0 && vb > 0.0) || (va > 0.0 && vb < 0.0))) continue;
    double lo = grid[k], hi = grid[k + 1], flo = va;
    double root = std::numeric_limits<double>::quiet_NaN();
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        root = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    crossings.push_back(std::isnan(root) ? 0.5 * (lo + hi) : root);
  }
  return crossings;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = -60; k <= 60; ++k) {
    if (k != 0) grid.push_back(k / 20.0);
  }
  return grid;
}

std::vector<double> auto_xi_grid(const DeformationBounds& bounds, std::size_t points) {
  if (!std::isfinite(bounds.xi_min) || !std::isfinite(bounds.xi_max)) {
    throw invalid_argument("auto_xi_grid: deformation bounds are unbounded");
  }
  if (points < 2) throw invalid_argument("auto_xi_grid: need at least two points");
  std::vector<double> grid(points);
  const double span = bounds.xi_max - bounds.xi_min;
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = bounds.xi_min + span * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  grid.back() = bounds.xi_max;
  return grid;
}

SweepResult alpha_sweep(std::span<const double> initial, std::span<const double> final_dist,
                        const GlobalPassivityOperator& B, std::span<const double> grid) {
  check_distribution_pair(initial, final_dist, B.basis_values.size(), "alpha_sweep");
  require_increasing(grid, "alpha_sweep");
  SweepResult r;
  r.parameter_name = "alpha";
  r.grid.assign(grid.begin(), grid.end());
  for (double alpha : grid) {
    if (alpha == 0.0) throw invalid_argument("alpha_sweep: grid must exclude alpha = 0");
    const double d = delta_B_alpha(initial, final_dist, B, alpha);
    r.lhs.push_back(d);
    r.rhs.push_back(0.0);
    r.violated.push_back(d < 0.0);
  }
  const auto f = [&](double alpha) { return delta_B_alpha(initial, final_dist, B, alpha); };
  for (double x : find_sign_crossings(r.grid, r.lhs, f, kCrossingTol, 0.0)) {
    r.thresholds.push_back({x, 0.0});
  }
  return r;
}

SweepResult deformation_sweep(std::span<const double> initial, std::span<const double> final_dist,
                              const GlobalPassivityOperator& B, std::span<const double> a_values,
                              std::span<const double> grid) {
  check_distribution_pair(initial, final_dist, B.basis_values.size(), "deformation_sweep");
  if (a_values.size() != B.basis_values.size()) {
    throw invalid_argument("deformation_sweep: deformation observable has wrong outcome count");
  }
  const double beta_c = B.betas.front();
  if (beta_c == 0.0) {
    throw invalid_argument("deformation_sweep: beta_c = 0 is degenerate for the normal form");
  }
  require_increasing(grid, "deformation_sweep");
  const DeformationBounds bounds = deformation_bounds(B.basis_values, a_values);
  const double slack = 1e-12 * std::max({1.0, std::abs(bounds.xi_min), std::abs(bounds.xi_max)});
  for (double xi : grid) {
    if (xi < bounds.xi_min - slack || xi > bounds.xi_max + slack) {
      std::ostringstream msg;
      msg << "deformation_sweep: xi = " << xi << " outside admissible range [" << bounds.xi_min
          << ", " << bounds.xi_max << "]";
      throw invalid_argument(msg.str());
    }
  }

  const std::size_t m = B.betas.size();
  const double d_hc = delta_of(initial, final_dist, energy_observable("c", 0, m).basis_values);
  const double d_b = delta_of(initial, final_dist, B.basis_values);
  const double d_a = delta_of(initial, final_dist, a_values);
  const auto raw = [&](double xi) { return d_b + xi * d_a; };

  SweepResult r;
  r.parameter_name = "xi";
  r.grid.assign(grid.begin(), grid.end());
  for (double xi : grid) {
    const double v = raw(xi);
    r.lhs.push_back(d_hc);
    r.rhs.push_back(d_hc - v / beta_c);
    r.raw.push_back(v);
    r.violated.push_back(v < 0.0);
  }
  for (double x : find_sign_crossings(r.grid, r.raw, raw)) r.thresholds.push_back({x, 0.0});
  return r;
}

}  // namespace heatleak
