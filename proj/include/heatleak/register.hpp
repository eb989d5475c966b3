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

#ifndef HEATLEAK_REGISTER_HPP
#define HEATLEAK_REGISTER_HPP

// Dense density-operator substrate for registers of up to kMaxQubits qubits.
//
// Basis convention: qubit 0 is the leftmost tensor factor, i.e. the most
// significant bit of a basis index. An outcome label such as "01" lists
// qubits in register (or requested) order, so "01" is index 1.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace heatleak {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr std::size_t kMaxQubits = 10;

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitarityTol = 1e-12;

/// Dimensionless inverse temperature. +/-infinity denotes a pure state.
class InverseTemperature {
 public:
  explicit InverseTemperature(double beta);

  double value() const noexcept { return beta_; }
  bool is_infinite() const noexcept;

 private:
  double beta_;
};

struct InvariantReport {
  double hermiticity_error = 0.0;  // max |M - M^dagger|
  double trace_error = 0.0;        // |tr M - 1|
  double min_eigenvalue = 0.0;

  bool ok() const noexcept {
    return hermiticity_error <= kHermiticityTol && trace_error <= kTraceTol &&
           min_eigenvalue >= -kPsdTol;
  }
};

InvariantReport check_density_invariants(const ComplexMatrix& m);

class DensityOperator {
 public:
  /// Validates dimension, finiteness and the density-operator invariants.
  static DensityOperator from_matrix(ComplexMatrix m);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

  std::vector<double> eigenvalues() const;

 private:
  DensityOperator(std::size_t num_qubits, ComplexMatrix m)
      : num_qubits_(num_qubits), matrix_(std::move(m)) {}

  friend class StateAccess;

  std::size_t num_qubits_;
  ComplexMatrix matrix_;
};

class UnitaryOperator {
 public:
  static UnitaryOperator from_matrix(ComplexMatrix m);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

 private:
  UnitaryOperator(std::size_t num_qubits, ComplexMatrix m)
      : num_qubits_(num_qubits), matrix_(std::move(m)) {}

  std::size_t num_qubits_;
  ComplexMatrix matrix_;
};

/// Diagonal energy observable |1><1| of one qubit, expressed as its value on
/// each computational-basis outcome of a measured register.
struct EnergyObservable {
  std::string qubit_label;
  std::vector<double> basis_values;
};

/// E0 = 0, E1 = 1 on qubit `position` out of `num_qubits` measured qubits.
EnergyObservable energy_observable(std::string label, std::size_t position,
                                   std::size_t num_qubits);

DensityOperator thermal_qubit(InverseTemperature beta);
InverseTemperature beta_from_ground_pop(double p0);

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Full-register matrix of `u` acting on `targets` (first target is the most
/// significant bit of u's index), identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& u, std::span<const std::size_t> targets,
                    std::size_t num_qubits);

DensityOperator apply_unitary(const DensityOperator& state,
                              const UnitaryOperator& u,
                              std::span<const std::size_t> targets);

struct MixtureTerm {
  double probability;
  UnitaryOperator unitary;
  std::vector<std::size_t> targets;
};

/// sum_k p_k U_k rho U_k^dagger
DensityOperator mixture_channel(const DensityOperator& state,
                                std::span<const MixtureTerm> terms);

/// Reduced state on `keep`, kept qubits in ascending order. An empty `keep`
/// yields the 0-qubit state [tr rho].
DensityOperator partial_trace(const DensityOperator& state,
                              std::span<const std::size_t> keep);

/// Computational-basis outcome probabilities of `qubits`, indexed with the
/// first listed qubit as most significant bit.
std::vector<double> measure_distribution(const DensityOperator& state,
                                         std::span<const std::size_t> qubits);

double expectation(std::span<const double> distribution,
                   std::span<const double> observable_values);

double von_neumann_entropy(const DensityOperator& state);

}  // namespace heatleak

#endif  // HEATLEAK_REGISTER_HPP
