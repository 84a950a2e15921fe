// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/rate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace fairgauge {

namespace {

std::vector<double> nonmated_scores(const ComparisonSet& set) {
  std::vector<double> out;
  out.reserve(set.nonmated_count());
  for (const auto& r : set.records()) {
    if (!r.mated) out.push_back(r.score);
  }
  return out;
}

// Fraction of `ascending` at or above t.
double fraction_at_or_above(const std::vector<double>& ascending, double t) {
  auto it = std::lower_bound(ascending.begin(), ascending.end(), t);
  return static_cast<double>(ascending.end() - it) / static_cast<double>(ascending.size());
}

// Fraction of `ascending` strictly below t.
double fraction_below(const std::vector<double>& ascending, double t) {
  auto it = std::lower_bound(ascending.begin(), ascending.end(), t);
  return static_cast<double>(it - ascending.begin()) / static_cast<double>(ascending.size());
}

void check_target(double target) {
  if (!(target > 0.0 && target <= 1.0)) throw InputError("FMR target must lie in (0,1]");
}

}  // namespace

void OperationalPoints::validate() const {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    check_target(targets[i]);
    if (i > 0 && !(targets[i] < targets[i - 1]))
      throw InputError("FMR targets must be strictly decreasing");
  }
}

std::vector<std::string> OperationalPoints::labels() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < targets.size(); ++i) out.push_back("t" + std::to_string(i + 1));
  return out;
}

ThresholdSolution solve_threshold(std::span<const double> nonmated_scores, double target) {
  check_target(target);
  if (nonmated_scores.empty()) throw SolverError("cannot solve threshold: no non-mated comparisons");

  std::vector<double> desc(nonmated_scores.begin(), nonmated_scores.end());
  std::sort(desc.begin(), desc.end(), std::greater<>());
  const auto total = static_cast<double>(desc.size());

  // Walk distinct values from the top; the accepted count only grows as the
  // threshold drops, so the last feasible value is the smallest one.
  ThresholdSolution best{std::nextafter(desc.front(), std::numeric_limits<double>::infinity()), 0.0};
  std::size_t i = 0;
  while (i < desc.size()) {
    const double value = desc[i];
    while (i < desc.size() && desc[i] == value) ++i;
    const double fmr = static_cast<double>(i) / total;
    if (fmr > target) break;
    best = {value, fmr};
  }
  return best;
}

ThresholdSolution solve_threshold(const ComparisonSet& set, double target) {
  auto scores = nonmated_scores(set);
  return solve_threshold(scores, target);
}

ThresholdSet solve_all(const ComparisonSet& set, const OperationalPoints& points) {
  points.validate();
  ThresholdSet ts;
  if (points.targets.empty()) return ts;
  auto scores = nonmated_scores(set);
  auto labels = points.labels();
  for (std::size_t z = 0; z < points.targets.size(); ++z) {
    auto sol = solve_threshold(scores, points.targets[z]);
    ts.entries.push_back({labels[z], points.targets[z], sol.threshold, sol.achieved_fmr});
  }
  return ts;
}

GroupRateTable group_rates(const ComparisonSet& set, const ThresholdSet& ts) {
  if (set.mated_count() == 0 || set.nonmated_count() == 0)
    throw InputError("rates need at least one mated and one non-mated record");
  const auto& groups = set.groups();
  const auto& counts = set.group_counts();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (counts[g].mated == 0) throw InputError("group '" + groups[g] + "' has no mated records");
    if (counts[g].nonmated == 0) throw InputError("group '" + groups[g] + "' has no non-mated records");
  }
  for (const auto& e : ts.entries) {
    if (!e.value) throw InputError("threshold '" + e.label + "' has no value");
  }

  std::vector<std::vector<double>> mated(groups.size()), nonmated(groups.size());
  std::vector<double> all_mated, all_nonmated;
  for (const auto& r : set.records()) {
    const auto g = *set.group_index(r.group);
    (r.mated ? mated[g] : nonmated[g]).push_back(r.score);
    (r.mated ? all_mated : all_nonmated).push_back(r.score);
  }
  for (auto& v : mated) std::sort(v.begin(), v.end());
  for (auto& v : nonmated) std::sort(v.begin(), v.end());
  std::sort(all_mated.begin(), all_mated.end());
  std::sort(all_nonmated.begin(), all_nonmated.end());

  GroupRateTable table;
  table.groups = groups;
  table.thresholds = ts;
  table.fmr.assign(groups.size(), std::vector<double>(ts.size()));
  table.fnmr.assign(groups.size(), std::vector<double>(ts.size()));
  table.overall_fmr.resize(ts.size());
  table.overall_fnmr.resize(ts.size());
  for (std::size_t z = 0; z < ts.size(); ++z) {
    const double t = *ts[z].value;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      table.fmr[g][z] = fraction_at_or_above(nonmated[g], t);
      table.fnmr[g][z] = fraction_below(mated[g], t);
    }
    table.overall_fmr[z] = fraction_at_or_above(all_nonmated, t);
    table.overall_fnmr[z] = fraction_below(all_mated, t);
  }
  return table;
}

}  // namespace fairgauge
