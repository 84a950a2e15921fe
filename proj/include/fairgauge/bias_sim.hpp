// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairgauge/fairness.hpp"
#include "fairgauge/rate_engine.hpp"
#include "fairgauge/score_model.hpp"

namespace fairgauge {

/// Score model of one demographic group: truncated normals on [-1, 1] for
/// mated and non-mated similarity scores.
struct GroupDistribution {
  std::string id;
  double mated_mean = 0.5;
  double mated_sd = 0.1;
  double nonmated_mean = 0.0;
  double nonmated_sd = 0.1;
  std::size_t n_mated = 1000;
  std::size_t n_nonmated = 1000;

  friend bool operator==(const GroupDistribution&, const GroupDistribution&) = default;
};

struct ScenarioSpec {
  std::vector<GroupDistribution> groups;
  std::uint64_t seed = 0;

  /// Throws InputError with the offending field path, e.g. `groups[1].mated_sd`.
  void validate() const;
  const GroupDistribution* find(const std::string& id) const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

enum class MitigationMode { targeted, balanced };

/// Simulated fine-tuning, expressed as a shift of non-mated score means.
///
/// targeted: each target group's non-mated mean m moves to
///   m + strength * ((ref - overshoot * sd) - m)
/// where ref is the unweighted mean of the non-target groups' non-mated means
/// and sd is the group's non-mated sd. overshoot > 0 pushes past the
/// reference (over-correction). Target groups' mated sd is multiplied by
/// 1 + strength * mated_sd_gain.
///
/// balanced: every group's non-mated mean moves toward the unweighted mean of
/// all groups by `strength`; overshoot and mated_sd_gain apply to no group.
struct MitigationSpec {
  MitigationMode mode = MitigationMode::targeted;
  std::vector<std::string> target_groups;  // empty: use the identified groups
  double strength = 1.0;
  double overshoot = 0.0;
  double mated_sd_gain = 0.0;

  void validate() const;
};

/// Flags groups whose FMR exceeds kappa times the overall FMR.
struct BiasPolicy {
  double kappa = 2.0;
  std::vector<std::string> scope{"t1"};  // threshold labels; empty means all

  void validate() const;
};

/// Draws every group's scores from independent substreams of `spec.seed`.
/// Output order: groups in spec order, mated records before non-mated.
ComparisonSet generate_scenario(const ScenarioSpec& spec);

/// Groups whose FMR at any in-scope threshold is strictly above kappa times
/// the overall FMR there (the threshold target when the table has no overall
/// row). Returned in table group order.
std::vector<std::string> identify_bias(const FairnessReport& report, const GroupRateTable& rates,
                                       const BiasPolicy& policy);

/// Next seed in the deterministic chain used between pipeline stages.
std::uint64_t advance_seed(std::uint64_t seed) noexcept;

/// Returns the mitigated scenario with the seed advanced. In targeted mode the
/// targets are `mit.target_groups` when non-empty, else `biased`.
ScenarioSpec apply_mitigation(const ScenarioSpec& spec, const MitigationSpec& mit,
                              const std::vector<std::string>& biased);

struct AuditStage {
  GroupRateTable rates;
  FairnessReport metrics;
  std::vector<std::string> flagged;
};

/// Thresholds solved on the set's own pooled scores, then rates, metrics and
/// bias flags.
AuditStage audit_set(const ComparisonSet& set, const OperationalPoints& points, const FairnessConfig& cfg,
                     const BiasPolicy& policy);

struct MetricDelta {
  std::string label;
  double fdr = 0.0;
  double ir = 0.0;  // NaN when both sides are infinite
  double garbe = 0.0;
  double garbe_relative = 0.0;  // (after - before) / before; 0 when before == 0
};

struct PipelineReport {
  ScenarioSpec scenario_before;
  ScenarioSpec scenario_after;
  MitigationSpec mitigation;
  std::vector<std::string> identified;  // stage-1 flags
  std::vector<std::string> mitigated;   // groups the shift was applied to
  bool mitigation_applied = false;      // false when targeted mode had nothing to target
  AuditStage before;
  AuditStage after;
  std::vector<MetricDelta> deltas;
  // delta_fmr[g][z], delta_fnmr[g][z] (after - before)
  std::vector<std::vector<double>> delta_fmr;
  std::vector<std::vector<double>> delta_fnmr;
};

/// Audit, identify, mitigate, re-audit. Thresholds are re-solved on each
/// stage's own scores.
PipelineReport run_pipeline(const ScenarioSpec& spec, const MitigationSpec& mit, const OperationalPoints& points,
                            const FairnessConfig& cfg, const BiasPolicy& policy);

}  // namespace fairgauge
