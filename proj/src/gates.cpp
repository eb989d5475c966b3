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

#include "heatleak/gates.hpp"

#include <algorithm>
#include <cmath>

#include "heatleak/error.hpp"

namespace heatleak {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::size_t arity_of(const GateSpec& g) {
  return std::visit(overloaded{[](const RotY&) -> std::size_t { return 0; },
                               [](const PhaseGate&) -> std::size_t { return 2; },
                               [](const Swap&) -> std::size_t { return 2; },
                               [](const Custom& c) { return c.unitary.num_qubits(); }},
                    g.kind);
}

DensityOperator apply_gate(const DensityOperator& state, const GateSpec& gate,
                           const Circuit& circuit) {
  std::vector<std::size_t> idx;
  for (auto role : gate.targets) idx.push_back(circuit.index_of(role));
  return std::visit(
      overloaded{[&](const RotY& r) {
                   const auto u = ry_gate(r.theta);
                   DensityOperator s = state;
                   for (auto q : idx) s = apply_unitary(s, u, std::span(&q, 1));
                   return s;
                 },
                 [&](const PhaseGate& p) { return apply_unitary(state, phase_gate(p.phi), idx); },
                 [&](const Swap&) { return apply_unitary(state, swap_gate(), idx); },
                 [&](const Custom& c) { return apply_unitary(state, c.unitary, idx); }},
      gate.kind);
}

}  // namespace

UnitaryOperator ry_gate(double theta) {
  if (!std::isfinite(theta)) throw invalid_argument("ry_gate: non-finite angle");
  ComplexMatrix m(2, 2);
  const double c = std::cos(theta), s = std::sin(theta);
  m << c, -s, s, c;
  return UnitaryOperator::from_matrix(std::move(m));
}

UnitaryOperator phase_gate(double phi) {
  if (!std::isfinite(phi)) throw invalid_argument("phase_gate: non-finite phase");
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  const Complex ph = std::polar(1.0, phi);
  m(0, 0) = ph;
  m(3, 3) = ph;
  return UnitaryOperator::from_matrix(std::move(m));
}

UnitaryOperator swap_gate() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 2) = 1.0;
  m(2, 1) = 1.0;
  m(3, 3) = 1.0;
  return UnitaryOperator::from_matrix(std::move(m));
}

std::string_view role_name(QubitRole role) {
  switch (role) {
    case QubitRole::c: return "c";
    case QubitRole::h: return "h";
    case QubitRole::e: return "e";
  }
  return "?";
}

std::optional<QubitRole> parse_role(std::string_view name) {
  if (name == "c") return QubitRole::c;
  if (name == "h") return QubitRole::h;
  if (name == "e") return QubitRole::e;
  return std::nullopt;
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::i: return "i";
    case Stage::ii: return "ii";
    case Stage::iii: return "iii";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  if (name == "i") return Stage::i;
  if (name == "ii") return Stage::ii;
  if (name == "iii") return Stage::iii;
  return std::nullopt;
}

Circuit::Circuit(std::vector<QubitRole> qubits, std::vector<InverseTemperature> init_betas,
                 std::vector<GateSpec> gates, std::vector<QubitRole> measured,
                 std::array<std::size_t, 3> stage_markers)
    : qubits_(std::move(qubits)),
      init_betas_(std::move(init_betas)),
      gates_(std::move(gates)),
      measured_(std::move(measured)),
      markers_(stage_markers) {
  if (qubits_.empty() || qubits_.size() > kMaxQubits) {
    throw invalid_argument("circuit: register size must be in [1, 10]");
  }
  for (std::size_t i = 0; i < qubits_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (qubits_[i] == qubits_[j]) throw invalid_argument("circuit: duplicate qubit role");
    }
  }
  if (init_betas_.size() != qubits_.size()) {
    throw invalid_argument("circuit: one initial inverse temperature per qubit required");
  }
  for (const auto& g : gates_) {
    const std::size_t arity = arity_of(g);
    if (arity == 0 ? g.targets.empty() : g.targets.size() != arity) {
      throw invalid_argument("circuit: gate target count does not match its arity");
    }
    for (std::size_t i = 0; i < g.targets.size(); ++i) {
      index_of(g.targets[i]);
      for (std::size_t j = 0; j < i; ++j) {
        if (g.targets[i] == g.targets[j]) throw invalid_argument("circuit: repeated gate target");
      }
    }
  }
  if (measured_.empty()) throw invalid_argument("circuit: no measured qubits");
  for (auto role : measured_) {
    if (role == QubitRole::e) {
      throw invalid_argument("circuit: the environment qubit cannot be measured");
    }
    index_of(role);
  }
  if (!(markers_[0] <= markers_[1] && markers_[1] <= markers_[2] &&
        markers_[2] <= gates_.size())) {
    throw invalid_argument("circuit: stage markers must satisfy i <= ii <= iii <= #gates");
  }
}

std::size_t Circuit::index_of(QubitRole role) const {
  const auto it = std::find(qubits_.begin(), qubits_.end(), role);
  if (it == qubits_.end()) {
    throw invalid_argument("circuit: qubit role '" + std::string(role_name(role)) +
                           "' not in register");
  }
  return static_cast<std::size_t>(it - qubits_.begin());
}

std::vector<std::size_t> Circuit::measured_indices() const {
  std::vector<std::size_t> out;
  for (auto role : measured_) out.push_back(index_of(role));
  return out;
}

ProtocolConfig ProtocolConfig::published(Variant variant, bool include_env_swap) {
  ProtocolConfig cfg;
  cfg.variant = variant;
  cfg.include_env_swap = include_env_swap;
  if (variant == Variant::B) {
    cfg.beta_c = 1.627;
    cfg.beta_h = 1.099;
    cfg.beta_e = 2.232;
  }
  return cfg;
}

void ProtocolConfig::validate() const {
  for (double b : {beta_c, beta_h, beta_e}) {
    if (std::isnan(b)) throw invalid_argument("protocol: inverse temperature is NaN");
  }
  if (variant == Variant::A && !std::isfinite(phi)) {
    throw invalid_argument("protocol A: phase must be finite");
  }
  if (variant == Variant::B && !std::isfinite(theta)) {
    throw invalid_argument("protocol B: rotation angle must be finite");
  }
  if (variant != Variant::A && variant != Variant::B) {
    throw invalid_argument("protocol: unknown variant");
  }
}

Circuit build_protocol(const ProtocolConfig& config) {
  config.validate();
  using R = QubitRole;
  std::vector<GateSpec> gates;
  // Slot that holds the qubit initialized as h after the system unitary.
  R h_slot = R::h;
  if (config.variant == Variant::A) {
    gates.push_back({RotY{std::numbers::pi / 4.0}, {R::c, R::h}});
    gates.push_back({PhaseGate{config.phi}, {R::c, R::h}});
    gates.push_back({RotY{std::numbers::pi / 4.0}, {R::c, R::h}});
  } else {
    GateSpec rot{RotY{config.theta}, {R::h}};
    GateSpec sw{Swap{}, {R::c, R::h}};
    if (config.order_b == GateOrderB::swap_first) {
      gates.push_back(sw);
      gates.push_back(rot);
    } else {
      gates.push_back(rot);
      gates.push_back(sw);
    }
    if (config.env_swap_follows_ion) h_slot = R::c;
  }
  const std::size_t system_end = gates.size();
  if (config.include_env_swap) gates.push_back({Swap{}, {h_slot, R::e}});
  return Circuit({R::c, R::h, R::e},
                 {InverseTemperature(config.beta_c), InverseTemperature(config.beta_h),
                  InverseTemperature(config.beta_e)},
                 std::move(gates), {R::c, R::h},
                 {0, system_end, system_end + (config.include_env_swap ? 1u : 0u)});
}

DensityOperator initial_state(const Circuit& circuit) {
  const auto& betas = circuit.init_betas();
  DensityOperator rho = thermal_qubit(betas.front());
  for (std::size_t q = 1; q < betas.size(); ++q) rho = tensor(rho, thermal_qubit(betas[q]));
  return rho;
}

DensityOperator run_circuit(const Circuit& circuit, Stage upto_stage) {
  DensityOperator rho = initial_state(circuit);
  const std::size_t end = circuit.marker(upto_stage);
  for (std::size_t g = 0; g < end; ++g) rho = apply_gate(rho, circuit.gates()[g], circuit);
  return rho;
}

std::vector<double> stage_distribution(const Circuit& circuit, Stage stage) {
  const auto idx = circuit.measured_indices();
  return measure_distribution(run_circuit(circuit, stage), idx);
}

}  // namespace heatleak
