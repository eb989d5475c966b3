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

#include "heatleak/register.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "heatleak/error.hpp"

namespace heatleak {

class StateAccess {
 public:
  static DensityOperator make(std::size_t n, ComplexMatrix m) {
    return DensityOperator(n, std::move(m));
  }
};

namespace {

std::size_t qubits_for_dim(Eigen::Index dim, const char* what) {
  const auto udim = static_cast<std::size_t>(dim);
  if (dim < 1 || !std::has_single_bit(udim)) {
    throw invalid_argument(std::string(what) + ": dimension " +
                           std::to_string(dim) + " is not a power of two");
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(udim));
  if (n > kMaxQubits) {
    throw invalid_argument(std::string(what) + ": " + std::to_string(n) +
                           " qubits exceeds the register cap of " +
                           std::to_string(kMaxQubits));
  }
  return n;
}

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw invalid_argument(std::string(what) + ": matrix is not square");
  }
  if (!m.allFinite()) {
    throw invalid_argument(std::string(what) + ": non-finite entry");
  }
}

void check_targets(std::span<const std::size_t> targets, std::size_t num_qubits,
                   const char* what) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= num_qubits) {
      throw invalid_argument(std::string(what) + ": qubit index " +
                             std::to_string(targets[i]) + " outside register of " +
                             std::to_string(num_qubits));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw invalid_argument(std::string(what) + ": repeated qubit index " +
                               std::to_string(targets[i]));
      }
    }
  }
}

// Bit mask of qubit q in an n-qubit basis index.
inline std::size_t qubit_bit(std::size_t q, std::size_t n) {
  return std::size_t{1} << (n - 1 - q);
}

// Spreads the k-bit sub-index s over the target bit positions.
inline std::size_t scatter(std::size_t s, std::span<const std::size_t> targets,
                           std::size_t n) {
  std::size_t out = 0;
  const std::size_t k = targets.size();
  for (std::size_t t = 0; t < k; ++t) {
    if (s & (std::size_t{1} << (k - 1 - t))) out |= qubit_bit(targets[t], n);
  }
  return out;
}

// M <- U_full M, touching only the row groups selected by the targets.
void apply_left(ComplexMatrix& m, const ComplexMatrix& u,
                std::span<const std::size_t> targets, std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t sub = std::size_t{1} << targets.size();
  std::size_t target_mask = 0;
  for (auto t : targets) target_mask |= qubit_bit(t, n);

  std::vector<std::size_t> idx(sub);
  for (std::size_t s = 0; s < sub; ++s) idx[s] = scatter(s, targets, n);

  std::vector<Complex> v(sub);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (std::size_t s = 0; s < sub; ++s) v[s] = m(base | idx[s], c);
      for (std::size_t r = 0; r < sub; ++r) {
        Complex acc = 0.0;
        for (std::size_t s = 0; s < sub; ++s) acc += u(r, s) * v[s];
        m(base | idx[r], c) = acc;
      }
    }
  }
}

ComplexMatrix conjugate(const ComplexMatrix& rho, const ComplexMatrix& u,
                        std::span<const std::size_t> targets, std::size_t n) {
  // U rho U^dagger = (U (U rho)^dagger)^dagger since rho is Hermitian.
  ComplexMatrix m = rho;
  apply_left(m, u, targets, n);
  ComplexMatrix mt = m.adjoint();
  apply_left(mt, u, targets, n);
  return mt.adjoint();
}

}  // namespace

InverseTemperature::InverseTemperature(double beta) : beta_(beta) {
  if (std::isnan(beta)) {
    throw invalid_argument("inverse temperature must not be NaN");
  }
}

bool InverseTemperature::is_infinite() const noexcept { return std::isinf(beta_); }

InvariantReport check_density_invariants(const ComplexMatrix& m) {
  InvariantReport r;
  r.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  r.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

DensityOperator DensityOperator::from_matrix(ComplexMatrix m) {
  require_square_finite(m, "density operator");
  const std::size_t n = qubits_for_dim(m.rows(), "density operator");
  const InvariantReport r = check_density_invariants(m);
  if (r.hermiticity_error > kHermiticityTol) {
    throw invalid_argument("density operator is not Hermitian (error " +
                           std::to_string(r.hermiticity_error) + ")");
  }
  if (r.trace_error > kTraceTol) {
    throw invalid_argument("density operator trace differs from 1 by " +
                           std::to_string(r.trace_error));
  }
  if (r.min_eigenvalue < -kPsdTol) {
    throw invalid_argument("density operator has negative eigenvalue " +
                           std::to_string(r.min_eigenvalue));
  }
  return DensityOperator(n, std::move(m));
}

std::vector<double> DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

UnitaryOperator UnitaryOperator::from_matrix(ComplexMatrix m) {
  require_square_finite(m, "unitary");
  const std::size_t n = qubits_for_dim(m.rows(), "unitary");
  const ComplexMatrix id = ComplexMatrix::Identity(m.rows(), m.cols());
  const double err = (m.adjoint() * m - id).cwiseAbs().maxCoeff();
  if (err > kUnitarityTol) {
    throw invalid_argument("matrix is not unitary (max |U^dagger U - 1| = " +
                           std::to_string(err) + ")");
  }
  return UnitaryOperator(n, std::move(m));
}

EnergyObservable energy_observable(std::string label, std::size_t position,
                                   std::size_t num_qubits) {
  if (position >= num_qubits || num_qubits > kMaxQubits) {
    throw invalid_argument("energy observable: qubit position out of range");
  }
  EnergyObservable obs{std::move(label), {}};
  const std::size_t dim = std::size_t{1} << num_qubits;
  obs.basis_values.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    obs.basis_values[k] = (k & qubit_bit(position, num_qubits)) ? 1.0 : 0.0;
  }
  return obs;
}

DensityOperator thermal_qubit(InverseTemperature beta) {
  const double b = beta.value();
  // Logistic forms keep both populations accurate for large |beta|.
  const double p0 = 1.0 / (1.0 + std::exp(-b));
  const double p1 = 1.0 / (1.0 + std::exp(b));
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = p0;
  m(1, 1) = p1;
  return StateAccess::make(1, std::move(m));
}

InverseTemperature beta_from_ground_pop(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) {
    throw invalid_argument("ground population must lie in [0, 1], got " +
                           std::to_string(p0));
  }
  if (p0 == 1.0) return InverseTemperature(INFINITY);
  if (p0 == 0.0) return InverseTemperature(-INFINITY);
  return InverseTemperature(std::log(p0) - std::log1p(-p0));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  const std::size_t n = a.num_qubits() + b.num_qubits();
  if (n > kMaxQubits) {
    throw invalid_argument("tensor: result exceeds the register cap");
  }
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  ComplexMatrix m(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      m.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
    }
  }
  return StateAccess::make(n, std::move(m));
}

ComplexMatrix embed(const ComplexMatrix& u, std::span<const std::size_t> targets,
                    std::size_t num_qubits) {
  if (u.rows() != (Eigen::Index{1} << targets.size()) || u.rows() != u.cols()) {
    throw invalid_argument("embed: operator size does not match target count");
  }
  check_targets(targets, num_qubits, "embed");
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  ComplexMatrix full = ComplexMatrix::Identity(dim, dim);
  apply_left(full, u, targets, num_qubits);
  return full;
}

DensityOperator apply_unitary(const DensityOperator& state,
                              const UnitaryOperator& u,
                              std::span<const std::size_t> targets) {
  if (targets.size() != u.num_qubits()) {
    throw invalid_argument("apply_unitary: " + std::to_string(u.num_qubits()) +
                           "-qubit unitary given " + std::to_string(targets.size()) +
                           " targets");
  }
  check_targets(targets, state.num_qubits(), "apply_unitary");
  return StateAccess::make(
      state.num_qubits(),
      conjugate(state.matrix(), u.matrix(), targets, state.num_qubits()));
}

DensityOperator mixture_channel(const DensityOperator& state,
                                std::span<const MixtureTerm> terms) {
  if (terms.empty()) {
    throw invalid_argument("mixture_channel: no terms");
  }
  double total = 0.0;
  for (const auto& t : terms) {
    if (!(t.probability >= 0.0)) {
      throw invalid_argument("mixture_channel: negative or NaN probability");
    }
    total += t.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw invalid_argument("mixture_channel: probabilities sum to " +
                           std::to_string(total));
  }
  ComplexMatrix acc = ComplexMatrix::Zero(state.dim(), state.dim());
  for (const auto& t : terms) {
    if (t.targets.size() != t.unitary.num_qubits()) {
      throw invalid_argument("mixture_channel: target count mismatch");
    }
    check_targets(t.targets, state.num_qubits(), "mixture_channel");
    acc += t.probability *
           conjugate(state.matrix(), t.unitary.matrix(), t.targets, state.num_qubits());
  }
  return StateAccess::make(state.num_qubits(), std::move(acc));
}

DensityOperator partial_trace(const DensityOperator& state,
                              std::span<const std::size_t> keep) {
  const std::size_t n = state.num_qubits();
  check_targets(keep, n, "partial_trace");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  }

  const std::size_t dk = std::size_t{1} << kept.size();
  const std::size_t dt = std::size_t{1} << traced.size();
  std::vector<std::size_t> kidx(dk), tidx(dt);
  for (std::size_t s = 0; s < dk; ++s) kidx[s] = scatter(s, kept, n);
  for (std::size_t s = 0; s < dt; ++s) tidx[s] = scatter(s, traced, n);

  const auto& m = state.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk),
                                          static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i) {
    for (std::size_t j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < dt; ++t) acc += m(kidx[i] | tidx[t], kidx[j] | tidx[t]);
      out(i, j) = acc;
    }
  }
  return StateAccess::make(kept.size(), std::move(out));
}

std::vector<double> measure_distribution(const DensityOperator& state,
                                         std::span<const std::size_t> qubits) {
  const std::size_t n = state.num_qubits();
  check_targets(qubits, n, "measure_distribution");
  const std::size_t k = qubits.size();
  std::vector<double> dist(std::size_t{1} << k, 0.0);
  const auto& m = state.matrix();
  for (std::size_t idx = 0; idx < (std::size_t{1} << n); ++idx) {
    std::size_t out = 0;
    for (std::size_t t = 0; t < k; ++t) {
      if (idx & qubit_bit(qubits[t], n)) out |= std::size_t{1} << (k - 1 - t);
    }
    dist[out] += m(idx, idx).real();
  }
  for (double& p : dist) {
    if (p < -kPsdTol) {
      throw Error(ErrorKind::domain,
                  "measure_distribution: negative probability " + std::to_string(p));
    }
    p = std::clamp(p, 0.0, 1.0);
  }
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  for (double& p : dist) p /= total;
  return dist;
}

double expectation(std::span<const double> distribution,
                   std::span<const double> observable_values) {
  if (distribution.size() != observable_values.size()) {
    throw invalid_argument("expectation: distribution has " +
                           std::to_string(distribution.size()) + " outcomes, observable " +
                           std::to_string(observable_values.size()));
  }
  const double total = std::accumulate(distribution.begin(), distribution.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw invalid_argument("expectation: distribution sums to " + std::to_string(total));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < distribution.size(); ++k) {
    acc += distribution[k] * observable_values[k];
  }
  return acc;
}

double von_neumann_entropy(const DensityOperator& state) {
  double s = 0.0;
  for (double lambda : state.eigenvalues()) {
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

}  // namespace heatleak
