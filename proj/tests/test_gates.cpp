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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "heatleak/error.hpp"
#include "heatleak/gates.hpp"
#include "oracle.hpp"

using namespace heatleak;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

void expect_dist_near(const std::vector<double>& got, const std::vector<double>& want,
                      double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], tol) << "outcome " << k;
}

}  // namespace

TEST(Gates, RyIsExponential) {
  for (double theta : {-1.0, 0.0, std::numbers::pi / 4, 1.25, 2.5}) {
    const auto u = ry_gate(theta).matrix();
    EXPECT_LT(max_abs(u - oracle::ry(theta)), 1e-15);
    EXPECT_NEAR(u(0, 0).real(), std::cos(theta), 1e-15);
    EXPECT_NEAR(u(1, 0).real(), std::sin(theta), 1e-15);
  }
  EXPECT_THROW(ry_gate(std::nan("")), Error);
}

TEST(Gates, PhaseAndSwap) {
  const auto p = phase_gate(0.7).matrix();
  EXPECT_NEAR(std::arg(p(0, 0)), 0.7, 1e-15);
  EXPECT_NEAR(std::arg(p(3, 3)), 0.7, 1e-15);
  EXPECT_EQ(p(1, 1), Complex(1.0));
  EXPECT_EQ(p(2, 2), Complex(1.0));
  EXPECT_LT(max_abs(swap_gate().matrix() - oracle::swap2()), 1e-15);
}

TEST(Names, RoundTrip) {
  for (auto r : {QubitRole::c, QubitRole::h, QubitRole::e}) EXPECT_EQ(parse_role(role_name(r)), r);
  for (auto s : kAllStages) EXPECT_EQ(parse_stage(stage_name(s)), s);
  EXPECT_FALSE(parse_role("x").has_value());
  EXPECT_FALSE(parse_stage("iv").has_value());
}

TEST(Circuit, Validation) {
  using R = QubitRole;
  const std::vector<InverseTemperature> b3 = {InverseTemperature(1), InverseTemperature(1),
                                              InverseTemperature(1)};
  const std::vector<R> q = {R::c, R::h, R::e};
  const std::vector<R> m = {R::c, R::h};
  EXPECT_NO_THROW(Circuit(q, b3, {{Swap{}, {R::c, R::h}}}, m, {0, 1, 1}));
  EXPECT_THROW(Circuit(q, b3, {{Swap{}, {R::c}}}, m, {0, 1, 1}), Error);
  EXPECT_THROW(Circuit(q, b3, {{Swap{}, {R::c, R::c}}}, m, {0, 1, 1}), Error);
  EXPECT_THROW(Circuit(q, b3, {{PhaseGate{1.0}, {R::h}}}, m, {0, 1, 1}), Error);
  EXPECT_THROW(Circuit(q, b3, {}, {R::c, R::e}, {0, 0, 0}), Error);
  EXPECT_THROW(Circuit(q, b3, {{Swap{}, {R::c, R::h}}}, m, {1, 0, 1}), Error);
  EXPECT_THROW(Circuit(q, b3, {{Swap{}, {R::c, R::h}}}, m, {0, 1, 2}), Error);
  EXPECT_THROW(Circuit({R::c, R::c}, {b3[0], b3[1]}, {}, {R::c}, {0, 0, 0}), Error);
  EXPECT_THROW(Circuit(q, {b3[0]}, {}, m, {0, 0, 0}), Error);
  EXPECT_THROW(Circuit({R::c, R::h}, {b3[0], b3[1]}, {{Swap{}, {R::c, R::e}}}, {R::c},
                       {0, 1, 1}),
               Error);
}

TEST(Protocol, AMatchesOracle) {
  for (bool swap : {true, false}) {
    const auto cfg = ProtocolConfig::published(Variant::A, swap);
    const auto circuit = build_protocol(cfg);
    EXPECT_EQ(circuit.gates().size(), swap ? 4u : 3u);
    const auto ref = oracle::protocol_a(cfg.beta_c, cfg.beta_h, cfg.beta_e, cfg.phi, swap);
    expect_dist_near(stage_distribution(circuit, Stage::i), ref.initial, 1e-13);
    expect_dist_near(stage_distribution(circuit, Stage::iii), ref.final_dist, 1e-13);
    const auto no_swap = oracle::protocol_a(cfg.beta_c, cfg.beta_h, cfg.beta_e, cfg.phi, false);
    expect_dist_near(stage_distribution(circuit, Stage::ii), no_swap.final_dist, 1e-13);
  }
}

TEST(Protocol, BMatchesOracle) {
  for (bool swap : {true, false}) {
    const auto cfg = ProtocolConfig::published(Variant::B, swap);
    const auto circuit = build_protocol(cfg);
    const auto ref = oracle::protocol_b(cfg.beta_c, cfg.beta_h, cfg.beta_e, cfg.theta, swap);
    expect_dist_near(stage_distribution(circuit, Stage::i), ref.initial, 1e-13);
    expect_dist_near(stage_distribution(circuit, Stage::iii), ref.final_dist, 1e-13);
  }
}

TEST(Protocol, FrozenDistributions) {
  // Values from the brute-force reference at the published parameters.
  const auto a = build_protocol(ProtocolConfig::published(Variant::A, true));
  expect_dist_near(stage_distribution(a, Stage::iii),
                   {0.6929745, 0.09192685, 0.18990651, 0.02519214}, 1e-7);
  const auto b = build_protocol(ProtocolConfig::published(Variant::B, true));
  expect_dist_near(stage_distribution(b, Stage::i),
                   {0.62687944, 0.20887881, 0.12319325, 0.0410485}, 1e-7);
  expect_dist_near(stage_distribution(b, Stage::iii),
                   {0.2086215, 0.69446505, 0.02238792, 0.07452554}, 1e-7);
}

TEST(Protocol, BAlternativeOrderings) {
  auto cfg = ProtocolConfig::published(Variant::B, true);
  cfg.order_b = GateOrderB::rotation_first;
  cfg.env_swap_follows_ion = false;
  const auto circuit = build_protocol(cfg);
  // Rotation on h, SWAP(c, h), then SWAP(h, e), written out in full.
  using oracle::I2;
  const oracle::Mat u = oracle::kron(I2(), oracle::swap2()) *
                        oracle::kron(oracle::swap2(), I2()) *
                        oracle::kron3(I2(), oracle::ry(cfg.theta), I2());
  const auto rho0 = oracle::kron3(oracle::thermal(cfg.beta_c), oracle::thermal(cfg.beta_h),
                                  oracle::thermal(cfg.beta_e));
  expect_dist_near(stage_distribution(circuit, Stage::iii),
                   oracle::marginal_ch(oracle::evolve(u, rho0)), 1e-13);
}

TEST(Protocol, StageIiMatchesIiiWithoutSwap) {
  const auto circuit = build_protocol(ProtocolConfig::published(Variant::A, false));
  EXPECT_EQ(stage_distribution(circuit, Stage::ii), stage_distribution(circuit, Stage::iii));
}

TEST(Protocol, EnvSwapPreservesSystemEntropyBookkeeping) {
  // The reduced c,h state after the full circuit stays a valid density operator.
  for (auto v : {Variant::A, Variant::B}) {
    const auto circuit = build_protocol(ProtocolConfig::published(v, true));
    const auto rho = run_circuit(circuit, Stage::iii);
    EXPECT_TRUE(check_density_invariants(rho.matrix()).ok());
    double total = 0.0;
    for (double p : stage_distribution(circuit, Stage::iii)) total += p;
    EXPECT_NEAR(total, 1.0, 1e-14);
  }
}

TEST(Protocol, InfiniteTemperatures) {
  auto cfg = ProtocolConfig::published(Variant::A, true);
  cfg.beta_c = std::numeric_limits<double>::infinity();
  cfg.beta_e = -std::numeric_limits<double>::infinity();
  const auto d = stage_distribution(build_protocol(cfg), Stage::i);
  EXPECT_NEAR(d[0] + d[1], 1.0, 1e-15);
  cfg.beta_h = std::nan("");
  EXPECT_THROW(build_protocol(cfg), Error);
}

TEST(RotYLayer, IsProductOfSingleRotations) {
  using R = QubitRole;
  const std::vector<InverseTemperature> b = {InverseTemperature(0.3), InverseTemperature(1.1)};
  const Circuit layer({R::c, R::h}, b, {{RotY{0.4}, {R::c, R::h}}}, {R::c, R::h}, {0, 1, 1});
  const Circuit split({R::c, R::h}, b, {{RotY{0.4}, {R::c}}, {RotY{0.4}, {R::h}}}, {R::c, R::h},
                      {0, 2, 2});
  EXPECT_LT(max_abs(run_circuit(layer, Stage::ii).matrix() - run_circuit(split, Stage::ii).matrix()),
            1e-14);
}
