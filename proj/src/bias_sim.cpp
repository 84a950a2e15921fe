// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/bias_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fairgauge/random.hpp"

namespace fairgauge {

namespace {

constexpr double kScoreMin = -1.0;
constexpr double kScoreMax = 1.0;
constexpr std::uint64_t kMatedStream = 0;
constexpr std::uint64_t kNonmatedStream = 1;

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void draw(std::vector<ComparisonRecord>& out, const std::string& group, bool mated, double mean, double sd,
          std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TruncatedNormal dist(mean, sd, kScoreMin, kScoreMax);
  for (std::size_t i = 0; i < count; ++i) out.push_back({dist(rng), mated, group});
}

}  // namespace

void ScenarioSpec::validate() const {
  if (groups.size() < 2) throw InputError("groups: at least two groups required");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const std::string path = "groups[" + std::to_string(i) + "]";
    if (!is_valid_group_token(g.id)) throw InputError(path + ".id: invalid group token");
    if (!seen.insert(g.id).second) throw InputError(path + ".id: duplicate group '" + g.id + "'");
    if (!std::isfinite(g.mated_mean)) throw InputError(path + ".mated_mean: must be finite");
    if (!std::isfinite(g.nonmated_mean)) throw InputError(path + ".nonmated_mean: must be finite");
    if (!(g.mated_sd > 0.0) || !std::isfinite(g.mated_sd)) throw InputError(path + ".mated_sd: must be > 0");
    if (!(g.nonmated_sd > 0.0) || !std::isfinite(g.nonmated_sd))
      throw InputError(path + ".nonmated_sd: must be > 0");
    if (g.n_mated < 1) throw InputError(path + ".n_mated: must be >= 1");
    if (g.n_nonmated < 1) throw InputError(path + ".n_nonmated: must be >= 1");
  }
}

const GroupDistribution* ScenarioSpec::find(const std::string& id) const {
  for (const auto& g : groups) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

void MitigationSpec::validate() const {
  if (!(strength >= 0.0 && strength <= 1.0)) throw InputError("strength: must lie in [0,1]");
  if (!(overshoot >= 0.0) || !std::isfinite(overshoot)) throw InputError("overshoot: must be >= 0");
  if (!(mated_sd_gain >= 0.0) || !std::isfinite(mated_sd_gain)) throw InputError("mated_sd_gain: must be >= 0");
  if (mode == MitigationMode::balanced && !target_groups.empty())
    throw InputError("target_groups: only valid in targeted mode");
}

void BiasPolicy::validate() const {
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw InputError("kappa: must be > 1");
}

ComparisonSet generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::size_t total = 0;
  for (const auto& g : spec.groups) total += g.n_mated + g.n_nonmated;

  std::vector<ComparisonRecord> records;
  records.reserve(total);
  for (const auto& g : spec.groups) {
    draw(records, g.id, true, g.mated_mean, g.mated_sd, g.n_mated, substream_seed(spec.seed, g.id, kMatedStream));
    draw(records, g.id, false, g.nonmated_mean, g.nonmated_sd, g.n_nonmated,
         substream_seed(spec.seed, g.id, kNonmatedStream));
  }
  return ComparisonSet(std::move(records));
}

std::vector<std::string> identify_bias(const FairnessReport& report, const GroupRateTable& rates,
                                       const BiasPolicy& policy) {
  policy.validate();
  if (!report.groups.empty() && report.groups != rates.groups)
    throw InputError("identify_bias: report and rate table cover different groups");

  std::vector<bool> flagged(rates.groups.size(), false);
  for (std::size_t z = 0; z < rates.thresholds.size(); ++z) {
    const auto& entry = rates.thresholds[z];
    if (!policy.scope.empty() && !contains(policy.scope, entry.label)) continue;
    double overall;
    if (!rates.overall_fmr.empty()) {
      overall = rates.overall_fmr[z];
    } else if (entry.target) {
      overall = *entry.target;
    } else {
      throw InputError("identify_bias: no overall FMR for threshold '" + entry.label + "'");
    }
    for (std::size_t g = 0; g < rates.groups.size(); ++g) {
      if (rates.fmr[g][z] > policy.kappa * overall) flagged[g] = true;
    }
  }
  std::vector<std::string> out;
  for (std::size_t g = 0; g < rates.groups.size(); ++g) {
    if (flagged[g]) out.push_back(rates.groups[g]);
  }
  return out;
}

std::uint64_t advance_seed(std::uint64_t seed) noexcept { return mix64(seed ^ 0x6D69746967617465ull); }

ScenarioSpec apply_mitigation(const ScenarioSpec& spec, const MitigationSpec& mit,
                              const std::vector<std::string>& biased) {
  spec.validate();
  mit.validate();

  ScenarioSpec out = spec;
  out.seed = advance_seed(spec.seed);
  const double s = mit.strength;

  if (mit.mode == MitigationMode::balanced) {
    double sum = 0.0;
    for (const auto& g : spec.groups) sum += g.nonmated_mean;
    const double reference = sum / static_cast<double>(spec.groups.size());
    for (auto& g : out.groups) g.nonmated_mean = std::lerp(g.nonmated_mean, reference, s);
    return out;
  }

  const auto& targets = mit.target_groups.empty() ? biased : mit.target_groups;
  if (targets.empty()) throw InputError("targeted mitigation needs at least one target group");
  for (const auto& id : targets) {
    if (!spec.find(id)) throw InputError("unknown group id '" + id + "'");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& g : spec.groups) {
    if (contains(targets, g.id)) continue;
    sum += g.nonmated_mean;
    ++count;
  }
  if (count == 0) throw InputError("targeted mitigation needs at least one non-target group as reference");
  const double reference = sum / static_cast<double>(count);

  for (auto& g : out.groups) {
    if (!contains(targets, g.id)) continue;
    g.nonmated_mean = std::lerp(g.nonmated_mean, reference - mit.overshoot * g.nonmated_sd, s);
    g.mated_sd *= 1.0 + s * mit.mated_sd_gain;
  }
  return out;
}

AuditStage audit_set(const ComparisonSet& set, const OperationalPoints& points, const FairnessConfig& cfg,
                     const BiasPolicy& policy) {
  AuditStage stage;
  stage.rates = group_rates(set, solve_all(set, points));
  stage.metrics = metric_suite(stage.rates, cfg);
  stage.flagged = identify_bias(stage.metrics, stage.rates, policy);
  return stage;
}

PipelineReport run_pipeline(const ScenarioSpec& spec, const MitigationSpec& mit, const OperationalPoints& points,
                            const FairnessConfig& cfg, const BiasPolicy& policy) {
  spec.validate();
  mit.validate();
  points.validate();
  cfg.validate();
  policy.validate();

  PipelineReport report;
  report.scenario_before = spec;
  report.mitigation = mit;

  // Step 1: identification on the original scores.
  report.before = audit_set(generate_scenario(spec), points, cfg, policy);
  report.identified = report.before.flagged;

  // Step 2: simulated fine-tuning.
  if (mit.mode == MitigationMode::balanced) {
    for (const auto& g : spec.groups) report.mitigated.push_back(g.id);
  } else {
    report.mitigated = mit.target_groups.empty() ? report.identified : mit.target_groups;
  }
  if (mit.mode == MitigationMode::targeted && report.mitigated.empty()) {
    report.scenario_after = spec;
    report.scenario_after.seed = advance_seed(spec.seed);
  } else {
    report.scenario_after = apply_mitigation(spec, mit, report.identified);
    report.mitigation_applied = true;
  }

  // Step 3: re-evaluation with thresholds re-solved on the new scores.
  report.after = audit_set(generate_scenario(report.scenario_after), points, cfg, policy);

  const auto& b = report.before;
  const auto& a = report.after;
  for (std::size_t z = 0; z < b.metrics.rows.size(); ++z) {
    const auto& rb = b.metrics.rows[z];
    const auto& ra = a.metrics.rows[z];
    MetricDelta d;
    d.label = rb.label;
    d.fdr = ra.fdr - rb.fdr;
    d.ir = (std::isinf(ra.ir) && std::isinf(rb.ir)) ? std::numeric_limits<double>::quiet_NaN() : ra.ir - rb.ir;
    d.garbe = ra.garbe - rb.garbe;
    d.garbe_relative = rb.garbe > 0.0 ? d.garbe / rb.garbe : 0.0;
    report.deltas.push_back(d);
  }
  const std::size_t n = b.rates.groups.size();
  const std::size_t m = b.rates.thresholds.size();
  report.delta_fmr.assign(n, std::vector<double>(m));
  report.delta_fnmr.assign(n, std::vector<double>(m));
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t z = 0; z < m; ++z) {
      report.delta_fmr[g][z] = a.rates.fmr[g][z] - b.rates.fmr[g][z];
      report.delta_fnmr[g][z] = a.rates.fnmr[g][z] - b.rates.fnmr[g][z];
    }
  }
  return report;
}

}  // namespace fairgauge
