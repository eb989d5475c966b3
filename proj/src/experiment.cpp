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

#include "heatleak/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "heatleak/error.hpp"

namespace heatleak {

using nlohmann::json;

namespace {

constexpr const char* kRecordFormat = "heatleak-shots/1";
constexpr std::uint64_t kBootstrapStream = 0xB0075;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

std::string variant_name(Variant v) { return v == Variant::A ? "A" : "B"; }

Variant parse_variant(const std::string& s) {
  if (s == "A" || s == "a") return Variant::A;
  if (s == "B" || s == "b") return Variant::B;
  throw invalid_argument("unknown protocol variant '" + s + "' (expected A or B)");
}

template <class T>
void read_field(const json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::parse, std::string("config field '") + key + "': " + ex.what());
  }
}

std::vector<double> number_or_list(const json& v, const char* key) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) return v.get<std::vector<double>>();
  throw Error(ErrorKind::parse, std::string("config field '") + key +
                                    "' must be a number or a list of numbers");
}

double beta_for_label(const ProtocolConfig& p, const std::string& label) {
  if (label == "c") return p.beta_c;
  if (label == "h") return p.beta_h;
  throw invalid_argument("analysis: measured qubit '" + label +
                         "' has no configured inverse temperature (expected c or h)");
}

std::vector<std::string> csv_header_row() {
  return {"parameter", "lhs", "rhs", "ci_low", "ci_high", "violated"};
}

std::vector<double> threshold_values(const SweepResult& s) {
  std::vector<double> out;
  for (const auto& c : s.thresholds) out.push_back(c.value);
  return out;
}

json estimate_json(const EstimateWithCI& e) {
  return {{"value", finite_or_string(e.value)},
          {"ci_low", finite_or_string(e.ci_low)},
          {"ci_high", finite_or_string(e.ci_high)},
          {"std_error", finite_or_string(e.std_error)}};
}

json bounds_json(const DeformationBounds& b) {
  auto pairs = [](const std::vector<OutcomePair>& v) {
    json arr = json::array();
    for (const auto& p : v) arr.push_back({p.lower, p.upper});
    return arr;
  };
  return {{"xi_min", finite_or_string(b.xi_min)},
          {"xi_max", finite_or_string(b.xi_max)},
          {"min_binding", pairs(b.min_binding)},
          {"max_binding", pairs(b.max_binding)}};
}

double violation_strength(double margin, double std_error) {
  if (std_error > 0.0) return -margin / std_error;
  if (margin < 0.0) return INFINITY;
  return 0.0;
}

}  // namespace

// ---- configuration ---------------------------------------------------------

ExperimentConfig ExperimentConfig::defaults(Variant variant, bool include_env_swap) {
  ExperimentConfig c;
  c.protocol = ProtocolConfig::published(variant, include_env_swap);
  c.shots_per_stage = variant == Variant::A ? 6700 : 3200;
  return c;
}

BootstrapConfig ExperimentConfig::bootstrap() const {
  return {resamples, confidence, bootstrap_seed.value_or(derive_seed(seed, kBootstrapStream))};
}

void ExperimentConfig::validate() const {
  protocol.validate();
  if (shots_per_stage == 0) throw invalid_argument("config: shots_per_stage must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw invalid_argument("config: epsilon must be positive");
  }
  if (alpha_grid.empty()) throw invalid_argument("config: alpha_grid is empty");
  for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
    if (alpha_grid[k] == 0.0) throw invalid_argument("config: alpha_grid must exclude 0");
    if (k && !(alpha_grid[k] > alpha_grid[k - 1])) {
      throw invalid_argument("config: alpha_grid must be strictly increasing");
    }
  }
  if (deformation_observable != "c" && deformation_observable != "h") {
    throw invalid_argument("config: deformation_observable must be 'c' or 'h'");
  }
  if (xi_points < 2) throw invalid_argument("config: xi_points must be at least 2");
  if (resamples < 100) throw invalid_argument("config: at least 100 bootstrap resamples required");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw invalid_argument("config: confidence must lie in (0, 1)");
  }
  if (!(significance > 0.0)) throw invalid_argument("config: significance must be positive");
  if (xi_grid) resolve_xi_grid(*this);
}

json config_to_json(const ExperimentConfig& c) {
  const auto& p = c.protocol;
  json j;
  j["protocol"] = {{"variant", variant_name(p.variant)},
                   {"beta_c", finite_or_string(p.beta_c)},
                   {"beta_h", finite_or_string(p.beta_h)},
                   {"beta_e", finite_or_string(p.beta_e)},
                   {"phi", p.phi},
                   {"theta", p.theta},
                   {"include_env_swap", p.include_env_swap},
                   {"order_b", p.order_b == GateOrderB::swap_first ? "swap_first" : "rotation_first"},
                   {"env_swap_follows_ion", p.env_swap_follows_ion}};
  j["shots_per_stage"] = c.shots_per_stage;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["alpha_grid"] = c.alpha_grid;
  j["xi_grid"] = c.xi_grid ? json(*c.xi_grid) : json("auto");
  j["xi_points"] = c.xi_points;
  j["deformation_observable"] = c.deformation_observable;
  j["spam"] = {{"flip_0_to_1", c.spam.flip_0_to_1}, {"flip_1_to_0", c.spam.flip_1_to_0}};
  j["bootstrap"] = {{"resamples", c.resamples}, {"confidence", c.confidence}};
  if (c.bootstrap_seed) j["bootstrap"]["seed"] = *c.bootstrap_seed;
  j["significance"] = c.significance;
  j["out_dir"] = c.out_dir;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse, "config: expected a JSON object");
  const json proto = j.value("protocol", json::object());
  Variant variant = Variant::A;
  bool env_swap = true;
  if (proto.contains("variant")) variant = parse_variant(proto.at("variant").get<std::string>());
  read_field(proto, "include_env_swap", env_swap);
  ExperimentConfig c = ExperimentConfig::defaults(variant, env_swap);

  auto& p = c.protocol;
  read_field(proto, "beta_c", p.beta_c);
  read_field(proto, "beta_h", p.beta_h);
  read_field(proto, "beta_e", p.beta_e);
  read_field(proto, "phi", p.phi);
  read_field(proto, "theta", p.theta);
  if (proto.contains("order_b")) {
    const auto s = proto.at("order_b").get<std::string>();
    if (s == "swap_first") p.order_b = GateOrderB::swap_first;
    else if (s == "rotation_first") p.order_b = GateOrderB::rotation_first;
    else throw Error(ErrorKind::parse, "config: order_b must be swap_first or rotation_first");
  }
  read_field(proto, "env_swap_follows_ion", p.env_swap_follows_ion);

  read_field(j, "shots_per_stage", c.shots_per_stage);
  read_field(j, "seed", c.seed);
  read_field(j, "epsilon", c.epsilon);
  read_field(j, "alpha_grid", c.alpha_grid);
  if (j.contains("xi_grid")) {
    const auto& g = j.at("xi_grid");
    if (g.is_string() && g.get<std::string>() == "auto") c.xi_grid.reset();
    else c.xi_grid = number_or_list(g, "xi_grid");
  }
  read_field(j, "xi_points", c.xi_points);
  read_field(j, "deformation_observable", c.deformation_observable);
  if (j.contains("spam")) {
    const auto& s = j.at("spam");
    if (s.contains("flip_0_to_1")) c.spam.flip_0_to_1 = number_or_list(s.at("flip_0_to_1"), "flip_0_to_1");
    if (s.contains("flip_1_to_0")) c.spam.flip_1_to_0 = number_or_list(s.at("flip_1_to_0"), "flip_1_to_0");
  }
  if (j.contains("bootstrap")) {
    const auto& b = j.at("bootstrap");
    read_field(b, "resamples", c.resamples);
    read_field(b, "confidence", c.confidence);
    if (b.contains("seed")) c.bootstrap_seed = b.at("seed").get<std::uint64_t>();
  }
  read_field(j, "significance", c.significance);
  read_field(j, "out_dir", c.out_dir);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::parse, path.string() + ": " + ex.what());
  }
  return config_from_json(j);
}

std::vector<double> deformation_values(const ExperimentConfig& config) {
  const std::size_t pos = config.deformation_observable == "c" ? 0 : 1;
  return energy_observable(config.deformation_observable, pos, 2).basis_values;
}

GlobalPassivityOperator passivity_operator(const ExperimentConfig& config) {
  const double betas[2] = {config.protocol.beta_c, config.protocol.beta_h};
  return build_B(betas, config.epsilon);
}

std::vector<double> resolve_xi_grid(const ExperimentConfig& config) {
  const auto B = passivity_operator(config);
  const auto bounds = deformation_bounds(B.basis_values, deformation_values(config));
  if (!config.xi_grid) return auto_xi_grid(bounds, config.xi_points);
  const auto& g = *config.xi_grid;
  for (double xi : g) {
    if (xi < bounds.xi_min - 1e-12 || xi > bounds.xi_max + 1e-12) {
      throw invalid_argument("config: xi_grid value " + num(xi) + " outside [" +
                             num(bounds.xi_min) + ", " + num(bounds.xi_max) + "]");
    }
  }
  return g;
}

// ---- files -----------------------------------------------------------------

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io, "cannot rename " + tmp.string() + " to " + path.string() +
                                         ": " + ec.message());
}

std::string outcome_label(std::size_t outcome, std::size_t num_qubits) {
  std::string s(num_qubits, '0');
  for (std::size_t j = 0; j < num_qubits; ++j) {
    if (outcome & (std::size_t{1} << (num_qubits - 1 - j))) s[j] = '1';
  }
  return s;
}

json record_to_json(const ShotRecord& r) {
  json counts = json::object();
  for (std::size_t k = 0; k < r.counts.size(); ++k) {
    counts[outcome_label(k, r.qubits.size())] = r.counts[k];
  }
  json meta = json::object();
  for (const auto& [k, v] : r.meta) meta[k] = v;
  if (r.seed) meta["seed"] = *r.seed;
  return {{"stage", std::string(stage_name(r.stage))},
          {"qubits", r.qubits},
          {"counts", counts},
          {"shots", r.total_shots},
          {"meta", meta}};
}

ShotRecord record_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse, "record must be a JSON object");
  for (const char* key : {"stage", "qubits", "counts", "shots"}) {
    if (!j.contains(key)) throw Error(ErrorKind::parse, std::string("record lacks '") + key + "'");
  }
  ShotRecord r;
  try {
    const auto stage = parse_stage(j.at("stage").get<std::string>());
    if (!stage) throw Error(ErrorKind::parse, "unknown stage '" + j.at("stage").get<std::string>() + "'");
    r.stage = *stage;
    r.qubits = j.at("qubits").get<std::vector<std::string>>();
    if (r.qubits.empty() || r.qubits.size() > kMaxQubits) {
      throw Error(ErrorKind::parse, "record must list between 1 and 10 qubits");
    }
    r.counts.assign(std::size_t{1} << r.qubits.size(), 0);
    const auto& counts = j.at("counts");
    if (!counts.is_object()) throw Error(ErrorKind::parse, "'counts' must be an object");
    for (const auto& [label, value] : counts.items()) {
      if (label.size() != r.qubits.size() ||
          label.find_first_not_of("01") != std::string::npos) {
        throw Error(ErrorKind::parse, "outcome label '" + label + "' does not match " +
                                          std::to_string(r.qubits.size()) + " qubits");
      }
      if (!value.is_number_unsigned()) {
        throw Error(ErrorKind::parse, "count for '" + label + "' must be a non-negative integer");
      }
      r.counts[std::stoul(label, nullptr, 2)] = value.get<std::uint64_t>();
    }
    if (!j.at("shots").is_number_unsigned()) {
      throw Error(ErrorKind::parse, "'shots' must be a positive integer");
    }
    r.total_shots = j.at("shots").get<std::uint64_t>();
    if (j.contains("meta")) {
      for (const auto& [k, v] : j.at("meta").items()) {
        if (k == "seed" && v.is_number_unsigned()) r.seed = v.get<std::uint64_t>();
        else r.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::parse, ex.what());
  }
  try {
    r.validate();
  } catch (const Error& ex) {
    throw Error(ErrorKind::parse, ex.what());
  }
  return r;
}

std::string format_records(const ExperimentConfig& config, const std::vector<ShotRecord>& records) {
  std::string out;
  // The output location is not part of the experiment; leaving it out keeps
  // record files identical wherever they are written.
  json echoed = config_to_json(config);
  echoed.erase("out_dir");
  const json header = {{"type", "header"}, {"format", kRecordFormat}, {"config", echoed}};
  out += header.dump() + "\n";
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

RecordFile parse_records(const std::string& text) {
  RecordFile file;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (j.is_object() && (j.value("type", "") == "header" || (j.contains("config") && !j.contains("counts")))) {
        if (!file.records.empty() || file.header_config) {
          throw Error(ErrorKind::parse, "header must be the first line");
        }
        file.header_config = j.value("config", json::object());
        continue;
      }
      file.records.push_back(record_from_json(j));
    } catch (const json::exception& ex) {
      throw Error(ErrorKind::parse, "records line " + std::to_string(lineno) + ": " + ex.what());
    } catch (const Error& ex) {
      throw Error(ErrorKind::parse, "records line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (file.records.empty()) throw Error(ErrorKind::parse, "records: no shot records found");
  return file;
}

RecordFile read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open records file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_records(ss.str());
  } catch (const Error& ex) {
    throw Error(ex.kind(), path.string() + ": " + ex.what());
  }
}

std::string format_sweep_csv(const SweepResult& s) {
  std::string out;
  const auto header = csv_header_row();
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += "\n";
  const bool has_ci = s.ci_low.size() == s.grid.size();
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    out += num(s.grid[k]) + "," + num(s.lhs[k]) + "," + num(s.rhs[k]) + ",";
    if (has_ci) out += num(s.ci_low[k]) + "," + num(s.ci_high[k]);
    else out += ",";
    out += s.violated[k] ? ",1\n" : ",0\n";
  }
  return out;
}

// ---- exact -----------------------------------------------------------------

ExactResult run_exact(const ExperimentConfig& config) {
  config.validate();
  const Circuit circuit = build_protocol(config.protocol);
  ExactResult r;
  for (Stage s : kAllStages) r.distributions.push_back(stage_distribution(circuit, s));
  const auto& d0 = r.distributions[0];
  const auto& d2 = r.distributions[1];
  const auto& d3 = r.distributions[2];

  const auto B = passivity_operator(config);
  r.alpha_ii = alpha_sweep(d0, d2, B, config.alpha_grid);
  r.alpha_iii = alpha_sweep(d0, d3, B, config.alpha_grid);
  r.second_law_ii = second_law_delta(d0, d2, B.betas);
  r.second_law_iii = second_law_delta(d0, d3, B.betas);

  const auto a = deformation_values(config);
  r.bounds = deformation_bounds(B.basis_values, a);
  if (std::isfinite(r.bounds.xi_min) && std::isfinite(r.bounds.xi_max) && B.betas[0] != 0.0) {
    const auto grid = resolve_xi_grid(config);
    r.xi_ii = deformation_sweep(d0, d2, B, a, grid);
    r.xi_iii = deformation_sweep(d0, d3, B, a, grid);
  }

  for (double eps : {config.epsilon / 10.0, config.epsilon, config.epsilon * 10.0}) {
    const double betas[2] = {config.protocol.beta_c, config.protocol.beta_h};
    const auto Be = build_B(betas, eps);
    r.epsilon_sensitivity.push_back(
        {eps, "iii_vs_i", threshold_values(alpha_sweep(d0, d3, Be, config.alpha_grid))});
  }
  return r;
}

void write_exact(const ExperimentConfig& config, const ExactResult& r,
                 const std::filesystem::path& out_dir) {
  std::string dist = "stage";
  for (std::size_t k = 0; k < r.distributions[0].size(); ++k) dist += "," + outcome_label(k, 2);
  dist += "\n";
  for (std::size_t s = 0; s < kAllStages.size(); ++s) {
    dist += std::string(stage_name(kAllStages[s]));
    for (double p : r.distributions[s]) dist += "," + num(p);
    dist += "\n";
  }
  write_file_atomic(out_dir / "exact_distributions.csv", dist);
  write_file_atomic(out_dir / "exact_alpha_sweep_ii_vs_i.csv", format_sweep_csv(r.alpha_ii));
  write_file_atomic(out_dir / "exact_alpha_sweep_iii_vs_i.csv", format_sweep_csv(r.alpha_iii));
  if (r.xi_ii) {
    write_file_atomic(out_dir / "exact_deformation_sweep_ii_vs_i.csv", format_sweep_csv(*r.xi_ii));
    write_file_atomic(out_dir / "exact_deformation_sweep_iii_vs_i.csv", format_sweep_csv(*r.xi_iii));
  }

  json summary;
  summary["config"] = config_to_json(config);
  summary["bounds"] = bounds_json(r.bounds);
  summary["second_law"] = {{"ii_vs_i", r.second_law_ii}, {"iii_vs_i", r.second_law_iii}};
  summary["alpha_thresholds"] = {{"ii_vs_i", threshold_values(r.alpha_ii)},
                                 {"iii_vs_i", threshold_values(r.alpha_iii)}};
  if (r.xi_ii) {
    summary["xi_thresholds"] = {{"ii_vs_i", threshold_values(*r.xi_ii)},
                                {"iii_vs_i", threshold_values(*r.xi_iii)}};
  }
  json sens = json::array();
  for (const auto& e : r.epsilon_sensitivity) {
    sens.push_back({{"epsilon", e.epsilon}, {"stage_pair", e.stage_pair},
                    {"alpha_thresholds", e.alpha_thresholds}});
  }
  summary["epsilon_sensitivity"] = sens;
  write_file_atomic(out_dir / "exact_summary.json", summary.dump(2) + "\n");
}

// ---- simulate --------------------------------------------------------------

std::vector<ShotRecord> run_simulate(const ExperimentConfig& config) {
  config.validate();
  const Circuit circuit = build_protocol(config.protocol);
  std::vector<ShotRecord> records;
  for (std::size_t s = 0; s < kAllStages.size(); ++s) {
    auto dist = stage_distribution(circuit, kAllStages[s]);
    if (!config.spam.is_identity()) dist = apply_spam(dist, config.spam);
    ShotRecord rec = sample_shots(dist, config.shots_per_stage, derive_seed(config.seed, s + 1),
                                  kAllStages[s], {"c", "h"});
    rec.meta["source"] = "simulated";
    rec.meta["variant"] = variant_name(config.protocol.variant);
    rec.meta["include_env_swap"] = config.protocol.include_env_swap ? "true" : "false";
    records.push_back(std::move(rec));
  }
  return records;
}

// ---- analyze ---------------------------------------------------------------

AnalysisResult run_analyze(const std::vector<ShotRecord>& records, const ExperimentConfig& config) {
  config.validate();
  // Records of the same stage are pooled.
  std::map<Stage, ShotRecord> by_stage;
  for (const auto& r : records) {
    r.validate();
    auto [it, fresh] = by_stage.try_emplace(r.stage, r);
    if (fresh) continue;
    if (it->second.qubits != r.qubits) {
      throw invalid_argument("analysis: stage " + std::string(stage_name(r.stage)) +
                             " records disagree on measured qubits");
    }
    for (std::size_t k = 0; k < r.counts.size(); ++k) it->second.counts[k] += r.counts[k];
    it->second.total_shots += r.total_shots;
  }
  if (!by_stage.count(Stage::i)) throw invalid_argument("analysis: no stage-i record");
  if (!by_stage.count(Stage::ii) && !by_stage.count(Stage::iii)) {
    throw invalid_argument("analysis: need a stage-ii or stage-iii record");
  }
  const ShotRecord& initial = by_stage.at(Stage::i);
  if (initial.qubits != std::vector<std::string>{"c", "h"}) {
    throw invalid_argument("analysis: records must measure qubits [\"c\", \"h\"] in that order");
  }
  std::vector<double> betas;
  for (const auto& q : initial.qubits) betas.push_back(beta_for_label(config.protocol, q));

  const auto B = build_B(betas, config.epsilon);
  const auto a = deformation_values(config);
  const auto bounds = deformation_bounds(B.basis_values, a);
  const bool with_xi =
      std::isfinite(bounds.xi_min) && std::isfinite(bounds.xi_max) && betas[0] != 0.0;
  const std::vector<double> xi_grid = with_xi ? resolve_xi_grid(config) : std::vector<double>{};
  const auto bcfg = config.bootstrap();

  const SweepBuilder alpha_builder = [&](const ShotRecord& i0, const ShotRecord& f) {
    return alpha_sweep(i0.frequencies(), f.frequencies(), B, config.alpha_grid);
  };
  const SweepBuilder xi_builder = [&](const ShotRecord& i0, const ShotRecord& f) {
    return deformation_sweep(i0.frequencies(), f.frequencies(), B, a, xi_grid);
  };

  AnalysisResult result;
  Verdict& v = result.verdict;
  v.significance = config.significance;

  for (Stage final_stage : {Stage::ii, Stage::iii}) {
    if (!by_stage.count(final_stage)) continue;
    const ShotRecord& fin = by_stage.at(final_stage);
    if (fin.qubits != initial.qubits) {
      throw invalid_argument("analysis: stage records disagree on measured qubits");
    }
    StagePairAnalysis pa;
    pa.stage_pair = std::string(stage_name(final_stage)) + "_vs_i";
    pa.alpha = alpha_builder(initial, fin);
    if (with_xi) pa.xi = xi_builder(initial, fin);

    const std::size_t n_alpha = config.alpha_grid.size();
    const std::size_t n_xi = xi_grid.size();
    const Statistic stat = [&](std::span<const ShotRecord> rs) {
      const auto p0 = rs[0].frequencies();
      const auto pf = rs[1].frequencies();
      std::vector<double> out;
      out.reserve(n_alpha + n_xi + 1);
      for (double alpha : config.alpha_grid) out.push_back(delta_B_alpha(p0, pf, B, alpha));
      if (with_xi) {
        const auto s = deformation_sweep(p0, pf, B, a, xi_grid);
        for (std::size_t k = 0; k < n_xi; ++k) out.push_back(s.margin(k));
      }
      out.push_back(second_law_delta(p0, pf, betas));
      return out;
    };
    const ShotRecord pair[2] = {initial, fin};
    const auto est = bootstrap_statistic(pair, stat, bcfg);

    double gp_strength = -INFINITY, xi_strength = -INFINITY;
    for (std::size_t k = 0; k < n_alpha; ++k) {
      pa.alpha.ci_low.push_back(est[k].ci_low);
      pa.alpha.ci_high.push_back(est[k].ci_high);
      gp_strength = std::max(gp_strength, violation_strength(est[k].value, est[k].std_error));
    }
    if (with_xi) {
      for (std::size_t k = 0; k < n_xi; ++k) {
        const auto& e = est[n_alpha + k];
        pa.xi->ci_low.push_back(e.ci_low);
        pa.xi->ci_high.push_back(e.ci_high);
        // margin = raw / beta_c, so a negative beta_c flips which side violates.
        const double signed_margin = betas[0] > 0.0 ? e.value : -e.value;
        xi_strength = std::max(xi_strength, violation_strength(signed_margin, e.std_error));
      }
    }
    pa.second_law = est.back();
    const double sl_strength = violation_strength(pa.second_law.value, pa.second_law.std_error);

    const auto outcome = [&](const char* test, double z) {
      return TestOutcome{test, pa.stage_pair, z, z >= config.significance};
    };
    v.tests.push_back(outcome("second-law", sl_strength));
    v.tests.push_back(outcome("global-passivity", gp_strength));
    if (with_xi) v.tests.push_back(outcome("deformation", xi_strength));

    auto alpha_t = threshold_with_uncertainty(initial, fin, alpha_builder, bcfg);
    if (alpha_t.estimate && !pa.alpha.thresholds.empty()) {
      pa.alpha.thresholds.front().uncertainty = alpha_t.estimate->std_error;
    }
    v.thresholds.push_back({"global-passivity", pa.stage_pair, alpha_t});
    if (with_xi) {
      auto xi_t = threshold_with_uncertainty(initial, fin, xi_builder, bcfg);
      if (xi_t.estimate && !pa.xi->thresholds.empty()) {
        pa.xi->thresholds.front().uncertainty = xi_t.estimate->std_error;
      }
      v.thresholds.push_back({"deformation", pa.stage_pair, xi_t});
    }

    const auto p0 = initial.frequencies();
    const auto pf = fin.frequencies();
    for (double eps : {config.epsilon / 10.0, config.epsilon, config.epsilon * 10.0}) {
      const auto Be = build_B(betas, eps);
      v.epsilon_sensitivity.push_back(
          {eps, pa.stage_pair, threshold_values(alpha_sweep(p0, pf, Be, config.alpha_grid))});
    }
    result.pairs.push_back(std::move(pa));
  }

  v.strength = 0.0;
  for (const auto& t : v.tests) v.strength = std::max(v.strength, t.strength);
  for (const char* name : {"second-law", "global-passivity", "deformation"}) {
    const bool fired = std::any_of(v.tests.begin(), v.tests.end(),
                                   [&](const TestOutcome& t) { return t.test == name && t.fired; });
    if (fired) {
      v.detected = true;
      v.channel = name;
      break;
    }
  }
  return result;
}

json verdict_to_json(const Verdict& v) {
  json j;
  j["detected"] = v.detected;
  j["channel"] = v.channel;
  j["strength"] = finite_or_string(v.strength);
  j["significance"] = v.significance;
  json tests = json::array();
  for (const auto& t : v.tests) {
    tests.push_back({{"test", t.test}, {"stage_pair", t.stage_pair},
                     {"strength", finite_or_string(t.strength)}, {"fired", t.fired}});
  }
  j["tests"] = tests;
  json th = json::array();
  for (const auto& t : v.thresholds) {
    json e = {{"test", t.test},
              {"stage_pair", t.stage_pair},
              {"point_crossings", t.threshold.point_crossings},
              {"resamples", t.threshold.resamples},
              {"resamples_without_crossing", t.threshold.resamples_without_crossing}};
    e["estimate"] = t.threshold.estimate ? estimate_json(*t.threshold.estimate) : json(nullptr);
    th.push_back(e);
  }
  j["thresholds"] = th;
  json sens = json::array();
  for (const auto& e : v.epsilon_sensitivity) {
    sens.push_back({{"epsilon", e.epsilon}, {"stage_pair", e.stage_pair},
                    {"alpha_thresholds", e.alpha_thresholds}});
  }
  j["epsilon_sensitivity"] = sens;
  return j;
}

void write_analysis(const AnalysisResult& result, const std::filesystem::path& out_dir) {
  json second_law = json::object();
  for (const auto& pa : result.pairs) {
    write_file_atomic(out_dir / ("alpha_sweep_" + pa.stage_pair + ".csv"), format_sweep_csv(pa.alpha));
    if (pa.xi) {
      write_file_atomic(out_dir / ("deformation_sweep_" + pa.stage_pair + ".csv"),
                        format_sweep_csv(*pa.xi));
    }
    second_law[pa.stage_pair] = estimate_json(pa.second_law);
  }
  json j = verdict_to_json(result.verdict);
  j["second_law"] = second_law;
  write_file_atomic(out_dir / "verdict.json", j.dump(2) + "\n");
}

}  // namespace heatleak
