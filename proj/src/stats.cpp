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

#include "heatleak/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "heatleak/error.hpp"

namespace heatleak {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_probability_vector(std::span<const double> p, const char* what) {
  if (p.empty() || !std::has_single_bit(p.size())) {
    throw invalid_argument(std::string(what) + ": outcome count must be a power of two");
  }
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw invalid_argument(std::string(what) + ": probabilities must be finite and non-negative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw invalid_argument(std::string(what) + ": probabilities sum to " + std::to_string(total));
  }
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void check_confidence(const BootstrapConfig& config) {
  if (config.resamples == 0) throw invalid_argument("bootstrap: resamples must be positive");
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw invalid_argument("bootstrap: confidence must lie in (0, 1)");
  }
}

}  // namespace

void ShotRecord::validate() const {
  if (total_shots == 0) throw invalid_argument("shot record: total_shots must be positive");
  if (counts.empty() || !std::has_single_bit(counts.size())) {
    throw invalid_argument("shot record: outcome count must be a power of two");
  }
  if (!qubits.empty() && (std::size_t{1} << qubits.size()) != counts.size()) {
    throw invalid_argument("shot record: " + std::to_string(qubits.size()) +
                           " qubits do not match " + std::to_string(counts.size()) + " outcomes");
  }
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  if (sum != total_shots) {
    throw invalid_argument("shot record: counts sum to " + std::to_string(sum) + " but shots = " +
                           std::to_string(total_shots));
  }
}

std::vector<double> ShotRecord::frequencies() const {
  std::vector<double> f(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    f[k] = static_cast<double>(counts[k]) / static_cast<double>(total_shots);
  }
  return f;
}

bool SpamModel::is_identity() const {
  auto zero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  };
  return zero(flip_0_to_1) && zero(flip_1_to_0);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed + stream * kGolden;
  return splitmix64(state);
}

std::vector<std::uint64_t> multinomial_counts(std::span<const double> p, std::uint64_t n,
                                              std::mt19937_64& rng) {
  const std::size_t k = p.size();
  std::vector<double> cum(k);
  std::partial_sum(p.begin(), p.end(), cum.begin());
  // The last non-empty outcome and everything after it absorb rounding in the
  // cumulative sum, which keeps cum non-decreasing.
  for (std::size_t j = k; j-- > 0;) {
    if (p[j] > 0.0) {
      std::fill(cum.begin() + static_cast<std::ptrdiff_t>(j), cum.end(),
                std::numeric_limits<double>::infinity());
      break;
    }
  }
  // Outcome = first j with u < cum[j]. Small alphabets count comparisons
  // without branching; shot outcomes are random, so branches mispredict.
  std::vector<std::uint64_t> counts(k, 0);
  if (k <= 16) {
    for (std::uint64_t s = 0; s < n; ++s) {
      const double u = uniform01(rng);
      std::size_t j = 0;
      for (std::size_t t = 0; t + 1 < k; ++t) j += static_cast<std::size_t>(u >= cum[t]);
      ++counts[j];
    }
  } else {
    for (std::uint64_t s = 0; s < n; ++s) {
      const double u = uniform01(rng);
      const auto it = std::upper_bound(cum.begin(), cum.end() - 1, u);
      ++counts[static_cast<std::size_t>(it - cum.begin())];
    }
  }
  return counts;
}

ShotRecord sample_shots(std::span<const double> distribution, std::uint64_t n,
                        std::uint64_t seed, Stage stage, std::vector<std::string> qubits) {
  if (n == 0) throw invalid_argument("sample_shots: number of shots must be positive");
  check_probability_vector(distribution, "sample_shots");
  const auto m = static_cast<std::size_t>(std::countr_zero(distribution.size()));
  if (qubits.empty()) {
    for (std::size_t j = 0; j < m; ++j) qubits.push_back("q" + std::to_string(j));
  }
  std::mt19937_64 rng(derive_seed(seed, 0));
  ShotRecord r;
  r.stage = stage;
  r.qubits = std::move(qubits);
  r.counts = multinomial_counts(distribution, n, rng);
  r.total_shots = n;
  r.seed = seed;
  r.validate();
  return r;
}

std::vector<double> apply_spam(std::span<const double> distribution, const SpamModel& model) {
  check_probability_vector(distribution, "apply_spam");
  const auto m = static_cast<std::size_t>(std::countr_zero(distribution.size()));
  auto rate = [&](const std::vector<double>& v, std::size_t j) {
    if (v.size() != 1 && v.size() != m) {
      throw invalid_argument("apply_spam: flip probabilities must be given once or per qubit");
    }
    const double x = v.size() == 1 ? v[0] : v[j];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw invalid_argument("apply_spam: flip probability outside [0, 1]");
    }
    return x;
  };
  std::vector<double> cur(distribution.begin(), distribution.end());
  for (std::size_t j = 0; j < m; ++j) {
    const double p01 = rate(model.flip_0_to_1, j);
    const double p10 = rate(model.flip_1_to_0, j);
    const std::size_t mask = std::size_t{1} << (m - 1 - j);
    std::vector<double> next(cur.size(), 0.0);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      if (k & mask) {
        next[k] += (1.0 - p10) * cur[k];
        next[k & ~mask] += p10 * cur[k];
      } else {
        next[k] += (1.0 - p01) * cur[k];
        next[k | mask] += p01 * cur[k];
      }
    }
    cur = std::move(next);
  }
  const double total = std::accumulate(cur.begin(), cur.end(), 0.0);
  for (double& x : cur) x /= total;
  return cur;
}

double estimate_expectation(const ShotRecord& record, std::span<const double> observable_values) {
  record.validate();
  if (observable_values.size() != record.counts.size()) {
    throw invalid_argument("estimate_expectation: record has " +
                           std::to_string(record.counts.size()) + " outcomes, observable " +
                           std::to_string(observable_values.size()));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < observable_values.size(); ++k) {
    acc += static_cast<double>(record.counts[k]) * observable_values[k];
  }
  return acc / static_cast<double>(record.total_shots);
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw invalid_argument("quantile: no samples");
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

void for_each_resample(std::span<const ShotRecord> records, const BootstrapConfig& config,
                       const std::function<void(std::size_t, std::span<const ShotRecord>)>& visit) {
  if (records.empty()) throw invalid_argument("bootstrap: no records");
  check_confidence(config);
  std::vector<std::vector<double>> rates;
  for (const auto& rec : records) {
    rec.validate();
    rates.push_back(rec.frequencies());
  }
  std::vector<ShotRecord> resampled(records.begin(), records.end());
  for (std::size_t r = 0; r < config.resamples; ++r) {
    std::mt19937_64 rng(derive_seed(config.seed, r));
    for (std::size_t i = 0; i < records.size(); ++i) {
      resampled[i].counts = multinomial_counts(rates[i], records[i].total_shots, rng);
    }
    visit(r, resampled);
  }
}

EstimateWithCI summarize(double point, std::vector<double> samples, double confidence) {
  EstimateWithCI e;
  e.value = point;
  if (samples.empty()) {
    e.ci_low = e.ci_high = point;
    return e;
  }
  e.std_error = sample_sd(samples);
  const double lo = quantile(samples, 0.5 * (1.0 - confidence));
  const double hi = quantile(std::move(samples), 0.5 * (1.0 + confidence));
  e.ci_low = std::min(lo, point);
  e.ci_high = std::max(hi, point);
  return e;
}

std::vector<EstimateWithCI> bootstrap_statistic(std::span<const ShotRecord> records,
                                                const Statistic& statistic,
                                                const BootstrapConfig& config) {
  if (records.empty()) throw invalid_argument("bootstrap: no records");
  const std::vector<double> point = statistic(records);
  std::vector<std::vector<double>> samples(point.size());
  for (auto& s : samples) s.reserve(config.resamples);
  for_each_resample(records, config, [&](std::size_t r, std::span<const ShotRecord> rs) {
    std::vector<double> v;
    try {
      v = statistic(rs);
    } catch (const std::exception& ex) {
      throw Error(ErrorKind::domain, "bootstrap: statistic failed on resample " +
                                         std::to_string(r) + ": " + ex.what());
    }
    if (v.size() != point.size()) {
      throw Error(ErrorKind::domain, "bootstrap: statistic returned " + std::to_string(v.size()) +
                                         " components on resample " + std::to_string(r) +
                                         ", expected " + std::to_string(point.size()));
    }
    for (std::size_t c = 0; c < v.size(); ++c) samples[c].push_back(v[c]);
  });
  std::vector<EstimateWithCI> out;
  out.reserve(point.size());
  for (std::size_t c = 0; c < point.size(); ++c) {
    out.push_back(summarize(point[c], std::move(samples[c]), config.confidence));
  }
  return out;
}

ThresholdEstimate threshold_with_uncertainty(const ShotRecord& initial, const ShotRecord& final_record,
                                             const SweepBuilder& sweep_builder,
                                             const BootstrapConfig& config) {
  ThresholdEstimate out;
  const SweepResult point = sweep_builder(initial, final_record);
  out.point_crossings = point.thresholds.size();
  if (point.thresholds.empty()) return out;
  const double central = point.thresholds.front().value;

  std::vector<double> crossings;
  const ShotRecord pair[2] = {initial, final_record};
  for_each_resample(pair, config, [&](std::size_t, std::span<const ShotRecord> rs) {
    const SweepResult s = sweep_builder(rs[0], rs[1]);
    ++out.resamples;
    if (s.thresholds.empty()) {
      ++out.resamples_without_crossing;
      return;
    }
    double best = s.thresholds.front().value;
    for (const auto& c : s.thresholds) {
      if (std::abs(c.value - central) < std::abs(best - central)) best = c.value;
    }
    crossings.push_back(best);
  });
  out.estimate = summarize(central, std::move(crossings), config.confidence);
  return out;
}

}  // namespace heatleak
