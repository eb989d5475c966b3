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

// heatleak: exact theory curves, shot simulation, heat-leak analysis and
// deformation bounds for the two-qubit passivity protocols.
//
// Exit codes: 0 success (analyze: no leak detected), 2 leak detected, 1 error.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "heatleak/heatleak.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitLeak = 2;

struct Globals {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> significance;
  std::optional<double> epsilon;
  std::optional<double> spam_flip01;
  std::optional<double> spam_flip10;
  std::optional<uint64_t> shots_per_stage;
  std::optional<std::size_t> resamples;
  std::string variant = "A";
  std::optional<bool> env_swap;
};

class ConfigHandle {
 public:
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
  ~ConfigHandle() { hl_config_free(ptr_); }

  hl_config** out() { return &ptr_; }
  hl_config* get() const { return ptr_; }

 private:
  hl_config* ptr_ = nullptr;
};

bool check(hl_status status, const char* what) {
  if (status == HL_OK) return true;
  std::fprintf(stderr, "heatleak: %s: %s\n", what, hl_last_error());
  return false;
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  hl_string_free(s);
  return out;
}

// Loads --config (or the record header for analyze) and applies flag overrides.
bool resolve_config(const Globals& g, ConfigHandle& cfg, const std::string& records_for_header) {
  if (!g.config_path.empty()) {
    if (!check(hl_config_load(g.config_path.c_str(), cfg.out()), "loading config")) return false;
  } else if (!records_for_header.empty()) {
    if (!check(hl_config_from_records(records_for_header.c_str(), cfg.out()),
               "reading configuration from record header")) {
      return false;
    }
  } else {
    const hl_variant v = (g.variant == "B" || g.variant == "b") ? HL_VARIANT_B : HL_VARIANT_A;
    if (!check(hl_config_create(v, g.env_swap.value_or(true) ? 1 : 0, cfg.out()),
               "creating config")) {
      return false;
    }
  }
  hl_config* c = cfg.get();
  if (g.env_swap && !check(hl_config_set_env_swap(c, *g.env_swap ? 1 : 0), "--env-swap")) return false;
  if (g.seed && !check(hl_config_set_seed(c, *g.seed), "--seed")) return false;
  if (g.out_dir && !check(hl_config_set_out_dir(c, g.out_dir->c_str()), "--out")) return false;
  if (g.significance && !check(hl_config_set_significance(c, *g.significance), "--significance")) {
    return false;
  }
  if (g.epsilon && !check(hl_config_set_epsilon(c, *g.epsilon), "--epsilon")) return false;
  if (g.spam_flip01 || g.spam_flip10) {
    if (!check(hl_config_set_spam(c, g.spam_flip01.value_or(0.0), g.spam_flip10.value_or(0.0)),
               "--spam-flip01/--spam-flip10")) {
      return false;
    }
  }
  if (g.shots_per_stage &&
      !check(hl_config_set_shots_per_stage(c, *g.shots_per_stage), "--shots-per-stage")) {
    return false;
  }
  if (g.resamples && !check(hl_config_set_resamples(c, *g.resamples), "--resamples")) return false;
  return true;
}

std::string out_dir_of(const ConfigHandle& cfg) {
  char* s = nullptr;
  if (hl_config_get_out_dir(cfg.get(), &s) != HL_OK) return ".";
  return take_string(s);
}

void print_bound(const char* name, double v) {
  if (std::isinf(v)) std::printf("%s = %sinf\n", name, v < 0 ? "-" : "+");
  else std::printf("%s = %.12g\n", name, v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-leak detection with passivity-based inequalities"};
  app.require_subcommand(1);
  Globals g;

  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config_path, "JSON configuration file");
    sub->add_option("--seed", g.seed, "Random seed");
    sub->add_option("--out", g.out_dir, "Output directory");
    sub->add_option("--significance", g.significance, "Detection threshold in bootstrap sigma");
    sub->add_option("--epsilon", g.epsilon, "Minimum eigenvalue of the passive operator B");
    sub->add_option("--spam-flip01", g.spam_flip01, "Readout flip probability 0 -> 1");
    sub->add_option("--spam-flip10", g.spam_flip10, "Readout flip probability 1 -> 0");
    sub->add_option("--shots-per-stage", g.shots_per_stage, "Shots per measurement stage");
    sub->add_option("--resamples", g.resamples, "Bootstrap resamples");
    sub->add_option("--variant", g.variant, "Protocol variant when no config is given")
        ->check(CLI::IsMember({"A", "B", "a", "b"}));
    sub->add_flag("--env-swap,!--no-env-swap", g.env_swap, "Couple to the environment qubit");
  };

  auto* exact = app.add_subcommand("exact", "Write exact theory sweeps and stage distributions");
  add_globals(exact);

  auto* simulate = app.add_subcommand("simulate", "Sample shot records for stages i, ii, iii");
  std::string sim_records;
  simulate->add_option("--records", sim_records, "Output record file (default OUT/records.jsonl)");
  add_globals(simulate);

  auto* analyze = app.add_subcommand("analyze", "Analyze shot records and emit a verdict");
  std::string ana_records;
  analyze->add_option("--records", ana_records, "Shot record file (JSON lines)")->required();
  add_globals(analyze);

  auto* bounds = app.add_subcommand("bounds", "Print the admissible deformation range");
  double beta_c = 1.627, beta_h = 1.099;
  std::string observable = "h";
  bounds->add_option("--beta-c", beta_c, "Inverse temperature of the cold qubit");
  bounds->add_option("--beta-h", beta_h, "Inverse temperature of the hot qubit");
  bounds->add_option("--observable", observable, "Deformation observable: h, c or const")
      ->check(CLI::IsMember({"h", "c", "const"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*bounds) {
      hl_bounds b{};
      char* binding = nullptr;
      if (!check(hl_bounds_for_betas(beta_c, beta_h, observable.c_str(), &b, &binding), "bounds")) {
        return kExitError;
      }
      print_bound("xi_min", b.xi_min);
      print_bound("xi_max", b.xi_max);
      std::printf("%s\n", take_string(binding).c_str());
      return kExitOk;
    }

    ConfigHandle cfg;
    const bool header_config = *analyze && g.config_path.empty();
    if (!resolve_config(g, cfg, header_config ? ana_records : std::string{})) return kExitError;

    if (*exact) {
      if (!check(hl_exact(cfg.get(), nullptr), "exact")) return kExitError;
      std::printf("exact sweeps written to %s\n", out_dir_of(cfg).c_str());
      return kExitOk;
    }
    if (*simulate) {
      const std::string path = sim_records.empty() ? out_dir_of(cfg) + "/records.jsonl" : sim_records;
      if (!check(hl_simulate(cfg.get(), path.c_str()), "simulate")) return kExitError;
      std::printf("records written to %s\n", path.c_str());
      return kExitOk;
    }
    if (*analyze) {
      hl_verdict* verdict = nullptr;
      if (!check(hl_analyze(cfg.get(), ana_records.c_str(), nullptr, &verdict), "analyze")) {
        return kExitError;
      }
      char* json = nullptr;
      const bool ok = check(hl_verdict_to_json(verdict, &json), "verdict");
      if (ok) std::printf("%s\n", take_string(json).c_str());
      const int detected = hl_verdict_detected(verdict);
      hl_verdict_free(verdict);
      if (!ok) return kExitError;
      return detected ? kExitLeak : kExitOk;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "heatleak: %s\n", ex.what());
    return kExitError;
  } catch (...) {
    std::fprintf(stderr, "heatleak: unknown error\n");
    return kExitError;
  }
  return kExitError;
}
