// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairgauge/score_model.hpp"

namespace fairgauge {

/// Weight of the FMR component in every metric; 1 - alpha weights FNMR.
struct FairnessConfig {
  double alpha = 0.5;

  /// Throws InputError unless 0 < alpha < 1.
  void validate() const;
};

/// All metrics at one threshold, with the intermediates they are built from.
/// Ratios and IR use +infinity for x/0 with x > 0.
struct MetricRow {
  std::string label;
  double fdr = 1.0;
  double ir = 1.0;
  double garbe = 0.0;
  double a_diff = 0.0;   // max pairwise |FMR_i - FMR_j|
  double b_diff = 0.0;   // max pairwise |FNMR_i - FNMR_j|
  double a_ratio = 1.0;  // max FMR / min FMR
  double b_ratio = 1.0;  // max FNMR / min FNMR
  double gini_fmr = 0.0;
  double gini_fnmr = 0.0;
};

struct FairnessReport {
  std::vector<std::string> groups;
  FairnessConfig config;
  std::vector<MetricRow> rows;
};

double max_pairwise_difference(std::span<const double> rates);

/// max/min with 0/0 = 1 and x/0 = +inf.
double max_min_ratio(std::span<const double> rates);

/// Fairness discrepancy rate on [0,1], 1 = fair.
double fdr(std::span<const double> fmr, std::span<const double> fnmr, double alpha);

/// Inequity rate A^alpha * B^(1-alpha) on [0, +inf], 1 = fair.
double ir(std::span<const double> fmr, std::span<const double> fnmr, double alpha);

/// Sample-corrected Gini coefficient n/(n-1) * sum_ij |r_i - r_j| / (2 n^2 mean).
/// Returns 0 for a zero mean. Requires n >= 2 and non-negative entries.
double gini(std::span<const double> rates);

/// alpha * Gini(FMR) + (1 - alpha) * Gini(FNMR), on [0,1], 0 = fair.
double garbe(std::span<const double> fmr, std::span<const double> fnmr, double alpha);

/// One MetricRow per threshold of `table`. Throws MetricUndefined for fewer
/// than two groups.
FairnessReport metric_suite(const GroupRateTable& table, const FairnessConfig& cfg);

}  // namespace fairgauge
