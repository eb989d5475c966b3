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

#include "heatleak/heatleak.h"

#include <cmath>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "heatleak/error.hpp"
#include "heatleak/experiment.hpp"

struct hl_config {
  heatleak::ExperimentConfig cfg;
};

struct hl_verdict {
  heatleak::Verdict verdict;
};

namespace {

thread_local std::string g_last_error;

hl_status status_of(heatleak::ErrorKind kind) {
  switch (kind) {
    case heatleak::ErrorKind::invalid_argument: return HL_ERR_INVALID_ARGUMENT;
    case heatleak::ErrorKind::domain: return HL_ERR_DOMAIN;
    case heatleak::ErrorKind::io: return HL_ERR_IO;
    case heatleak::ErrorKind::parse: return HL_ERR_PARSE;
  }
  return HL_ERR_INTERNAL;
}

template <class F>
hl_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return HL_OK;
  } catch (const heatleak::Error& ex) {
    g_last_error = ex.what();
    return status_of(ex.kind());
  } catch (const nlohmann::json::exception& ex) {
    g_last_error = ex.what();
    return HL_ERR_PARSE;
  } catch (const std::filesystem::filesystem_error& ex) {
    g_last_error = ex.what();
    return HL_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HL_ERR_INTERNAL;
  } catch (const std::exception& ex) {
    g_last_error = ex.what();
    return HL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HL_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw heatleak::invalid_argument(what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Setters validate the edited copy before committing it.
template <class F>
hl_status edit(hl_config* config, F&& mutate) {
  return guarded([&] {
    require(config != nullptr, "config handle is NULL");
    heatleak::ExperimentConfig next = config->cfg;
    mutate(next);
    next.validate();
    config->cfg = std::move(next);
  });
}

std::string describe_pairs(const std::vector<heatleak::OutcomePair>& pairs) {
  std::ostringstream os;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    os << (k ? " " : "") << heatleak::outcome_label(pairs[k].lower, 2) << "<"
       << heatleak::outcome_label(pairs[k].upper, 2);
  }
  return os.str();
}

}  // namespace

extern "C" {

const char* hl_version(void) { return "1.0.0"; }

const char* hl_last_error(void) { return g_last_error.c_str(); }

void hl_string_free(char* s) { delete[] s; }

hl_status hl_config_create(hl_variant variant, int include_env_swap, hl_config** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is NULL");
    require(variant == HL_VARIANT_A || variant == HL_VARIANT_B, "unknown protocol variant");
    const auto v = variant == HL_VARIANT_A ? heatleak::Variant::A : heatleak::Variant::B;
    *out = new hl_config{heatleak::ExperimentConfig::defaults(v, include_env_swap != 0)};
  });
}

hl_status hl_config_load(const char* path, hl_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    *out = new hl_config{heatleak::load_config(path)};
  });
}

hl_status hl_config_from_json(const char* json, hl_config** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "NULL argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& ex) {
      throw heatleak::Error(heatleak::ErrorKind::parse, std::string("config: ") + ex.what());
    }
    *out = new hl_config{heatleak::config_from_json(j)};
  });
}

hl_status hl_config_from_records(const char* records_path, hl_config** out) {
  return guarded([&] {
    require(records_path != nullptr && out != nullptr, "NULL argument");
    const auto file = heatleak::read_records(records_path);
    if (!file.header_config) {
      throw heatleak::Error(heatleak::ErrorKind::parse,
                            std::string(records_path) + ": no header line with a configuration");
    }
    *out = new hl_config{heatleak::config_from_json(*file.header_config)};
  });
}

void hl_config_free(hl_config* config) { delete config; }

hl_status hl_config_to_json(const hl_config* config, char** out_json) {
  return guarded([&] {
    require(config != nullptr && out_json != nullptr, "NULL argument");
    *out_json = dup_string(heatleak::config_to_json(config->cfg).dump(2));
  });
}

hl_status hl_config_set_seed(hl_config* config, uint64_t seed) {
  return edit(config, [&](auto& c) { c.seed = seed; });
}

hl_status hl_config_set_significance(hl_config* config, double sigma) {
  return edit(config, [&](auto& c) { c.significance = sigma; });
}

hl_status hl_config_set_epsilon(hl_config* config, double epsilon) {
  return edit(config, [&](auto& c) { c.epsilon = epsilon; });
}

hl_status hl_config_set_spam(hl_config* config, double flip_0_to_1, double flip_1_to_0) {
  return edit(config, [&](auto& c) {
    if (!(flip_0_to_1 >= 0.0 && flip_0_to_1 <= 1.0 && flip_1_to_0 >= 0.0 && flip_1_to_0 <= 1.0)) {
      throw heatleak::invalid_argument("SPAM flip probabilities must lie in [0, 1]");
    }
    c.spam.flip_0_to_1 = {flip_0_to_1};
    c.spam.flip_1_to_0 = {flip_1_to_0};
  });
}

hl_status hl_config_set_out_dir(hl_config* config, const char* dir) {
  return edit(config, [&](auto& c) {
    require(dir != nullptr, "out_dir is NULL");
    c.out_dir = dir;
  });
}

hl_status hl_config_set_shots_per_stage(hl_config* config, uint64_t shots) {
  return edit(config, [&](auto& c) { c.shots_per_stage = shots; });
}

hl_status hl_config_set_env_swap(hl_config* config, int include_env_swap) {
  return edit(config, [&](auto& c) { c.protocol.include_env_swap = include_env_swap != 0; });
}

hl_status hl_config_set_resamples(hl_config* config, size_t resamples) {
  return edit(config, [&](auto& c) { c.resamples = resamples; });
}

hl_status hl_config_get_out_dir(const hl_config* config, char** out_dir) {
  return guarded([&] {
    require(config != nullptr && out_dir != nullptr, "NULL argument");
    *out_dir = dup_string(config->cfg.out_dir);
  });
}

hl_status hl_stage_distribution(const hl_config* config, hl_stage stage, double out[4]) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "NULL argument");
    require(stage >= HL_STAGE_I && stage <= HL_STAGE_III, "unknown stage");
    const auto circuit = heatleak::build_protocol(config->cfg.protocol);
    const auto d = heatleak::stage_distribution(circuit, heatleak::kAllStages[stage]);
    for (std::size_t k = 0; k < 4; ++k) out[k] = d[k];
  });
}

hl_status hl_exact(const hl_config* config, const char* out_dir) {
  return guarded([&] {
    require(config != nullptr, "config handle is NULL");
    const auto result = heatleak::run_exact(config->cfg);
    heatleak::write_exact(config->cfg, result, out_dir ? out_dir : config->cfg.out_dir);
  });
}

hl_status hl_simulate(const hl_config* config, const char* records_path) {
  return guarded([&] {
    require(config != nullptr && records_path != nullptr, "NULL argument");
    const auto records = heatleak::run_simulate(config->cfg);
    heatleak::write_file_atomic(records_path, heatleak::format_records(config->cfg, records));
  });
}

hl_status hl_analyze(const hl_config* config, const char* records_path, const char* out_dir,
                     hl_verdict** out) {
  return guarded([&] {
    require(config != nullptr && records_path != nullptr, "NULL argument");
    const auto file = heatleak::read_records(records_path);
    const auto result = heatleak::run_analyze(file.records, config->cfg);
    heatleak::write_analysis(result, out_dir ? out_dir : config->cfg.out_dir);
    if (out) *out = new hl_verdict{result.verdict};
  });
}

void hl_verdict_free(hl_verdict* verdict) { delete verdict; }

int hl_verdict_detected(const hl_verdict* verdict) {
  return verdict && verdict->verdict.detected ? 1 : 0;
}

const char* hl_verdict_channel(const hl_verdict* verdict) {
  return verdict ? verdict->verdict.channel.c_str() : "";
}

double hl_verdict_strength(const hl_verdict* verdict) {
  return verdict ? verdict->verdict.strength : NAN;
}

size_t hl_verdict_threshold_count(const hl_verdict* verdict) {
  return verdict ? verdict->verdict.thresholds.size() : 0;
}

hl_status hl_verdict_threshold(const hl_verdict* verdict, size_t index, hl_threshold* out) {
  return guarded([&] {
    require(verdict != nullptr && out != nullptr, "NULL argument");
    require(index < verdict->verdict.thresholds.size(), "threshold index out of range");
    const auto& t = verdict->verdict.thresholds[index];
    *out = hl_threshold{};
    out->test = t.test.c_str();
    out->stage_pair = t.stage_pair.c_str();
    out->resamples = t.threshold.resamples;
    out->resamples_without_crossing = t.threshold.resamples_without_crossing;
    if (t.threshold.estimate) {
      out->has_estimate = 1;
      out->value = t.threshold.estimate->value;
      out->ci_low = t.threshold.estimate->ci_low;
      out->ci_high = t.threshold.estimate->ci_high;
      out->std_error = t.threshold.estimate->std_error;
    }
  });
}

hl_status hl_verdict_to_json(const hl_verdict* verdict, char** out_json) {
  return guarded([&] {
    require(verdict != nullptr && out_json != nullptr, "NULL argument");
    *out_json = dup_string(heatleak::verdict_to_json(verdict->verdict).dump(2));
  });
}

hl_status hl_deformation_bounds(const double* b_values, const double* a_values, size_t n,
                                hl_bounds* out) {
  return guarded([&] {
    require(b_values != nullptr && a_values != nullptr && out != nullptr, "NULL argument");
    const auto b = heatleak::deformation_bounds({b_values, n}, {a_values, n});
    *out = hl_bounds{b.xi_min, b.xi_max};
  });
}

hl_status hl_bounds_for_betas(double beta_c, double beta_h, const char* observable,
                              hl_bounds* out, char** binding) {
  return guarded([&] {
    require(observable != nullptr && out != nullptr, "NULL argument");
    const std::string obs = observable;
    std::vector<double> a;
    if (obs == "c") a = heatleak::energy_observable("c", 0, 2).basis_values;
    else if (obs == "h") a = heatleak::energy_observable("h", 1, 2).basis_values;
    else if (obs == "const") a.assign(4, 1.0);
    else throw heatleak::invalid_argument("observable must be 'c', 'h' or 'const'");
    const double betas[2] = {beta_c, beta_h};
    const auto B = heatleak::build_B(betas);
    const auto b = heatleak::deformation_bounds(B.basis_values, a);
    *out = hl_bounds{b.xi_min, b.xi_max};
    if (binding) {
      *binding = dup_string("xi_min: " + describe_pairs(b.min_binding) +
                            "\nxi_max: " + describe_pairs(b.max_binding));
    }
  });
}

hl_status hl_delta_b_alpha(const double* initial, const double* final_dist, const double* betas,
                           size_t n_betas, double epsilon, double alpha, double* out) {
  return guarded([&] {
    require(initial != nullptr && final_dist != nullptr && betas != nullptr && out != nullptr,
            "NULL argument");
    require(n_betas >= 1 && n_betas <= heatleak::kMaxQubits, "n_betas must be in [1, 10]");
    const std::size_t n = std::size_t{1} << n_betas;
    const auto B = heatleak::build_B({betas, n_betas}, epsilon);
    *out = heatleak::delta_B_alpha({initial, n}, {final_dist, n}, B, alpha);
  });
}

}  // extern "C"
