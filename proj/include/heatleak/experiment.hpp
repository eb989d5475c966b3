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

#ifndef HEATLEAK_EXPERIMENT_HPP
#define HEATLEAK_EXPERIMENT_HPP

// Experiment configuration, persistence formats and the exact / simulate /
// analyze pipelines behind the command-line tool.
//
// Shot records are JSON lines. The first line is a header echoing the
// configuration; every further line is one record:
//   {"stage":"i","qubits":["c","h"],"counts":{"00":n,...},"shots":N,"meta":{...}}
// Sweeps are CSV files with header parameter,lhs,rhs,ci_low,ci_high,violated
// where the channel columns bound lhs - rhs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "heatleak/gates.hpp"
#include "heatleak/passivity.hpp"
#include "heatleak/stats.hpp"

namespace heatleak {

struct ExperimentConfig {
  ProtocolConfig protocol;
  std::uint64_t shots_per_stage = 6700;
  std::uint64_t seed = 1;
  double epsilon = kDefaultEpsilon;
  std::vector<double> alpha_grid = default_alpha_grid();
  std::optional<std::vector<double>> xi_grid;  // empty: fill [xi_m, xi_p]
  std::size_t xi_points = 101;
  std::string deformation_observable = "h";  // energy of qubit c or h
  SpamModel spam;
  std::size_t resamples = 2000;
  double confidence = 0.6827;
  std::optional<std::uint64_t> bootstrap_seed;  // derived from seed if empty
  double significance = 3.0;
  std::string out_dir = ".";

  /// Published parameters: 6700 shots per stage for A, 3200 for B.
  static ExperimentConfig defaults(Variant variant, bool include_env_swap);

  BootstrapConfig bootstrap() const;
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
/// Fields absent from `j` keep the defaults of the variant named in it.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<double> deformation_values(const ExperimentConfig& config);
GlobalPassivityOperator passivity_operator(const ExperimentConfig& config);
std::vector<double> resolve_xi_grid(const ExperimentConfig& config);

// ---- files ----------------------------------------------------------------

/// Writes via a temporary sibling file renamed into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string outcome_label(std::size_t outcome, std::size_t num_qubits);

nlohmann::json record_to_json(const ShotRecord& record);
ShotRecord record_from_json(const nlohmann::json& j);

struct RecordFile {
  std::optional<nlohmann::json> header_config;
  std::vector<ShotRecord> records;
};

std::string format_records(const ExperimentConfig& config, const std::vector<ShotRecord>& records);
RecordFile parse_records(const std::string& text);
RecordFile read_records(const std::filesystem::path& path);

std::string format_sweep_csv(const SweepResult& sweep);

// ---- pipelines -------------------------------------------------------------

struct EpsilonSensitivity {
  double epsilon;
  std::string stage_pair;
  std::vector<double> alpha_thresholds;  // point-estimate crossings
};

struct ExactResult {
  std::vector<std::vector<double>> distributions;  // per stage i, ii, iii
  SweepResult alpha_ii, alpha_iii;
  std::optional<SweepResult> xi_ii, xi_iii;
  DeformationBounds bounds;
  double second_law_ii = 0.0, second_law_iii = 0.0;
  std::vector<EpsilonSensitivity> epsilon_sensitivity;
};

ExactResult run_exact(const ExperimentConfig& config);
void write_exact(const ExperimentConfig& config, const ExactResult& result,
                 const std::filesystem::path& out_dir);

std::vector<ShotRecord> run_simulate(const ExperimentConfig& config);

struct LabeledThreshold {
  std::string test;        // "global-passivity" or "deformation"
  std::string stage_pair;  // "ii_vs_i" or "iii_vs_i"
  ThresholdEstimate threshold;
};

struct TestOutcome {
  std::string test;
  std::string stage_pair;
  double strength = 0.0;  // largest -margin / std_error over the test's points
  bool fired = false;
};

struct Verdict {
  bool detected = false;
  std::string channel = "none";
  double strength = 0.0;
  double significance = 3.0;
  std::vector<TestOutcome> tests;
  std::vector<LabeledThreshold> thresholds;
  std::vector<EpsilonSensitivity> epsilon_sensitivity;
};

struct StagePairAnalysis {
  std::string stage_pair;
  SweepResult alpha;
  std::optional<SweepResult> xi;
  EstimateWithCI second_law;
};

struct AnalysisResult {
  std::vector<StagePairAnalysis> pairs;
  Verdict verdict;
};

AnalysisResult run_analyze(const std::vector<ShotRecord>& records, const ExperimentConfig& config);
void write_analysis(const AnalysisResult& result, const std::filesystem::path& out_dir);

nlohmann::json verdict_to_json(const Verdict& verdict);

}  // namespace heatleak

#endif  // HEATLEAK_EXPERIMENT_HPP
