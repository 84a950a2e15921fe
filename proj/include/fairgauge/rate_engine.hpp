// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairgauge/score_model.hpp"

namespace fairgauge {

/// Global FMR targets (fractions) at which thresholds are solved. Labelled
/// t1, t2, ... in order.
struct OperationalPoints {
  std::vector<double> targets{0.1, 0.01, 0.001};

  /// Throws InputError unless strictly decreasing and each in (0,1].
  void validate() const;
  std::vector<std::string> labels() const;
};

struct ThresholdSolution {
  double threshold = 0.0;
  double achieved_fmr = 0.0;
};

/// Decision rule: match iff score >= threshold. Returns the smallest candidate
/// threshold whose FMR does not exceed `target`. Candidates are the distinct
/// non-mated scores plus the next representable value above the largest one
/// (FMR 0). Throws SolverError without non-mated scores.
ThresholdSolution solve_threshold(std::span<const double> nonmated_scores, double target);
ThresholdSolution solve_threshold(const ComparisonSet& set, double target);

/// One entry per target, solved on the pooled non-mated scores.
ThresholdSet solve_all(const ComparisonSet& set, const OperationalPoints& points);

/// Per-group and pooled FMR/FNMR at each threshold of `ts` (which must carry
/// threshold values). Throws InputError naming a group without mated or
/// non-mated records.
GroupRateTable group_rates(const ComparisonSet& set, const ThresholdSet& ts);

}  // namespace fairgauge
