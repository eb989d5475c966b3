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

#ifndef HEATLEAK_STATS_HPP
#define HEATLEAK_STATS_HPP

// Finite-shot layer. Random numbers come from std::mt19937_64, whose output
// sequence is fixed by the C++ standard; uniforms are the top 53 bits scaled
// by 2^-53. Substreams are seeded through splitmix64, so sampling is
// bit-reproducible from a seed on any IEEE-754 platform.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "heatleak/gates.hpp"
#include "heatleak/passivity.hpp"

namespace heatleak {

struct ShotRecord {
  Stage stage = Stage::i;
  std::vector<std::string> qubits;     // measured qubit labels, outcome bit order
  std::vector<std::uint64_t> counts;   // indexed by outcome, first qubit is MSB
  std::uint64_t total_shots = 0;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> meta;

  void validate() const;
  std::vector<double> frequencies() const;
};

/// Per-qubit readout confusion. A vector of length 1 applies to every qubit.
struct SpamModel {
  std::vector<double> flip_0_to_1{0.0};
  std::vector<double> flip_1_to_0{0.0};

  bool is_identity() const;
};

struct BootstrapConfig {
  std::size_t resamples = 2000;
  double confidence = 0.6827;
  std::uint64_t seed = 0;
};

struct EstimateWithCI {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double std_error = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of substream `stream` derived from `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// n categorical draws from `p`, one uniform per draw.
std::vector<std::uint64_t> multinomial_counts(std::span<const double> p, std::uint64_t n,
                                              std::mt19937_64& rng);

ShotRecord sample_shots(std::span<const double> distribution, std::uint64_t n,
                        std::uint64_t seed, Stage stage = Stage::i,
                        std::vector<std::string> qubits = {});

std::vector<double> apply_spam(std::span<const double> distribution, const SpamModel& model);

double estimate_expectation(const ShotRecord& record, std::span<const double> observable_values);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> samples, double q);

/// Calls `visit(r, resampled)` for every bootstrap resample r. Each record's
/// counts are redrawn from its own empirical rates with its own shot total.
void for_each_resample(std::span<const ShotRecord> records, const BootstrapConfig& config,
                       const std::function<void(std::size_t, std::span<const ShotRecord>)>& visit);

using Statistic = std::function<std::vector<double>(std::span<const ShotRecord>)>;

std::vector<EstimateWithCI> bootstrap_statistic(std::span<const ShotRecord> records,
                                                const Statistic& statistic,
                                                const BootstrapConfig& config);

/// Summary of resampled values around a point estimate; the CI always
/// brackets the point value.
EstimateWithCI summarize(double point, std::vector<double> samples, double confidence);

using SweepBuilder = std::function<SweepResult(const ShotRecord&, const ShotRecord&)>;

struct ThresholdEstimate {
  std::optional<EstimateWithCI> estimate;  // empty: no crossing on the point sweep
  std::size_t point_crossings = 0;
  std::size_t resamples = 0;
  std::size_t resamples_without_crossing = 0;
};

/// Central value is the first crossing of the point-estimate sweep; spread
/// comes from the crossing nearest to it in each bootstrap resample.
ThresholdEstimate threshold_with_uncertainty(const ShotRecord& initial, const ShotRecord& final_record,
                                             const SweepBuilder& sweep_builder,
                                             const BootstrapConfig& config);

}  // namespace heatleak

#endif  // HEATLEAK_STATS_HPP
