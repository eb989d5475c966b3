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

#ifndef HEATLEAK_GATES_HPP
#define HEATLEAK_GATES_HPP

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "heatleak/register.hpp"

namespace heatleak {

/// exp(-i theta sigma_y). The angle enters the exponent as is, not halved.
UnitaryOperator ry_gate(double theta);

/// diag(e^{i phi}, 1, 1, e^{i phi}) in basis order 00, 01, 10, 11.
UnitaryOperator phase_gate(double phi);

UnitaryOperator swap_gate();

enum class QubitRole { c, h, e };

std::string_view role_name(QubitRole role);
std::optional<QubitRole> parse_role(std::string_view name);

/// Local rotation layer: exp(-i theta sum_t sigma_y^(t)) over all targets.
struct RotY {
  double theta;
};
struct PhaseGate {
  double phi;
};
struct Swap {};
struct Custom {
  UnitaryOperator unitary;
};

struct GateSpec {
  std::variant<RotY, PhaseGate, Swap, Custom> kind;
  std::vector<QubitRole> targets;
};

/// Measurement checkpoints: after initialization, after the system unitary,
/// after the optional environment SWAP.
enum class Stage { i, ii, iii };

inline constexpr std::array<Stage, 3> kAllStages = {Stage::i, Stage::ii, Stage::iii};

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

class Circuit {
 public:
  /// `stage_markers[s]` is the number of gates executed before checkpoint s.
  Circuit(std::vector<QubitRole> qubits, std::vector<InverseTemperature> init_betas,
          std::vector<GateSpec> gates, std::vector<QubitRole> measured,
          std::array<std::size_t, 3> stage_markers);

  const std::vector<QubitRole>& qubits() const noexcept { return qubits_; }
  const std::vector<InverseTemperature>& init_betas() const noexcept { return init_betas_; }
  const std::vector<GateSpec>& gates() const noexcept { return gates_; }
  const std::vector<QubitRole>& measured() const noexcept { return measured_; }
  std::size_t marker(Stage stage) const noexcept {
    return markers_[static_cast<std::size_t>(stage)];
  }

  std::size_t index_of(QubitRole role) const;
  std::vector<std::size_t> measured_indices() const;

 private:
  std::vector<QubitRole> qubits_;
  std::vector<InverseTemperature> init_betas_;
  std::vector<GateSpec> gates_;
  std::vector<QubitRole> measured_;
  std::array<std::size_t, 3> markers_;
};

enum class Variant { A, B };

/// Order of the two system gates in variant B.
enum class GateOrderB { swap_first, rotation_first };

struct ProtocolConfig {
  Variant variant = Variant::A;
  double beta_c = 2.23;
  double beta_h = 0.43;
  double beta_e = 2.02;
  double phi = 3.0 * std::numbers::pi / 4.0;
  // Exponent coefficient of the variant-B rotation exp(-i theta sigma_y);
  // 1.25 is a physical rotation by 2.5 rad.
  double theta = 1.25;
  bool include_env_swap = true;
  GateOrderB order_b = GateOrderB::swap_first;
  // When set, the environment SWAP acts on the slot holding the qubit that
  // was initialized as h, tracking it through a SWAP(c, h).
  bool env_swap_follows_ion = true;

  /// Inverse temperatures and gate parameters of the published runs.
  static ProtocolConfig published(Variant variant, bool include_env_swap);

  void validate() const;
};

Circuit build_protocol(const ProtocolConfig& config);

DensityOperator initial_state(const Circuit& circuit);
DensityOperator run_circuit(const Circuit& circuit, Stage upto_stage);

/// Outcome distribution of the measured qubits at a checkpoint.
std::vector<double> stage_distribution(const Circuit& circuit, Stage stage);

}  // namespace heatleak

#endif  // HEATLEAK_GATES_HPP
