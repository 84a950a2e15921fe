// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairgauge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_groups(std::size_t n) {
  if (n < 2) throw MetricUndefined("fairness metrics need at least two groups, got " + std::to_string(n));
}

void require_rates(std::span<const double> rates) {
  require_groups(rates.size());
  for (double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw InputError("rate outside [0,1]");
  }
}

void require_pair(std::span<const double> fmr, std::span<const double> fnmr, double alpha) {
  FairnessConfig{alpha}.validate();
  require_rates(fmr);
  require_rates(fnmr);
  if (fmr.size() != fnmr.size()) throw InputError("FMR and FNMR rows differ in length");
}

// a^alpha * b^(1-alpha); an infinite factor dominates since 0 < alpha < 1.
double weighted_geometric(double a, double b, double alpha) {
  if (std::isinf(a) || std::isinf(b)) return kInf;
  return std::pow(a, alpha) * std::pow(b, 1.0 - alpha);
}

}  // namespace

void FairnessConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
}

double max_pairwise_difference(std::span<const double> rates) {
  require_groups(rates.size());
  auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  return *hi - *lo;
}

double max_min_ratio(std::span<const double> rates) {
  require_groups(rates.size());
  auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  if (*lo == 0.0) return *hi == 0.0 ? 1.0 : kInf;
  return *hi / *lo;
}

double fdr(std::span<const double> fmr, std::span<const double> fnmr, double alpha) {
  require_pair(fmr, fnmr, alpha);
  return 1.0 - (alpha * max_pairwise_difference(fmr) + (1.0 - alpha) * max_pairwise_difference(fnmr));
}

double ir(std::span<const double> fmr, std::span<const double> fnmr, double alpha) {
  require_pair(fmr, fnmr, alpha);
  return weighted_geometric(max_min_ratio(fmr), max_min_ratio(fnmr), alpha);
}

double gini(std::span<const double> rates) {
  const std::size_t n = rates.size();
  require_groups(n);
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw InputError("Gini input must be finite and non-negative");
  }
  std::vector<double> sorted(rates.begin(), rates.end());
  std::sort(sorted.begin(), sorted.end());
  const double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (sum == 0.0) return 0.0;

  // Over unordered pairs, sum (r_j - r_i) = sum_k k (n - k) (r_(k) - r_(k-1))
  // for ascending r_(k); equal values contribute exactly zero.
  double weighted = 0.0;
  for (std::size_t k = 1; k < n; ++k)
    weighted += static_cast<double>(k) * static_cast<double>(n - k) * (sorted[k] - sorted[k - 1]);
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  return (dn / (dn - 1.0)) * (2.0 * weighted) / (2.0 * dn * dn * mean);
}

double garbe(std::span<const double> fmr, std::span<const double> fnmr, double alpha) {
  require_pair(fmr, fnmr, alpha);
  return alpha * gini(fmr) + (1.0 - alpha) * gini(fnmr);
}

FairnessReport metric_suite(const GroupRateTable& table, const FairnessConfig& cfg) {
  cfg.validate();
  table.check();
  require_groups(table.groups.size());

  FairnessReport report;
  report.groups = table.groups;
  report.config = cfg;
  const double a = cfg.alpha;
  for (std::size_t z = 0; z < table.thresholds.size(); ++z) {
    const auto fmr = table.fmr_at(z);
    const auto fnmr = table.fnmr_at(z);
    MetricRow row;
    row.label = table.thresholds[z].label;
    row.a_diff = max_pairwise_difference(fmr);
    row.b_diff = max_pairwise_difference(fnmr);
    row.a_ratio = max_min_ratio(fmr);
    row.b_ratio = max_min_ratio(fnmr);
    row.gini_fmr = gini(fmr);
    row.gini_fnmr = gini(fnmr);
    row.fdr = 1.0 - (a * row.a_diff + (1.0 - a) * row.b_diff);
    row.ir = weighted_geometric(row.a_ratio, row.b_ratio, a);
    row.garbe = a * row.gini_fmr + (1.0 - a) * row.gini_fnmr;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace fairgauge
