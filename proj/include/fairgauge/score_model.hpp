// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairgauge/errors.hpp"

namespace fairgauge {

/// One scored comparison. Higher scores mean more similar. For non-mated
/// records, `group` is the demographic group both samples belong to.
struct ComparisonRecord {
  double score = 0.0;
  bool mated = false;
  std::string group;

  friend bool operator==(const ComparisonRecord&, const ComparisonRecord&) = default;
};

struct GroupCounts {
  std::size_t mated = 0;
  std::size_t nonmated = 0;
};

/// True when `token` is usable as a group id: non-empty, no field delimiter,
/// quote or line-break characters.
bool is_valid_group_token(std::string_view token);

/// Ordered list of comparisons plus the derived group set (order of first
/// appearance). Records are checked on construction: finite score, valid
/// group token.
class ComparisonSet {
 public:
  ComparisonSet() = default;
  explicit ComparisonSet(std::vector<ComparisonRecord> records);

  const std::vector<ComparisonRecord>& records() const noexcept { return records_; }
  const std::vector<std::string>& groups() const noexcept { return groups_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Counts aligned with groups().
  const std::vector<GroupCounts>& group_counts() const noexcept { return counts_; }
  std::optional<std::size_t> group_index(std::string_view group) const;

  std::size_t mated_count() const noexcept { return mated_; }
  std::size_t nonmated_count() const noexcept { return records_.size() - mated_; }

 private:
  std::vector<ComparisonRecord> records_;
  std::vector<std::string> groups_;
  std::vector<GroupCounts> counts_;
  std::size_t mated_ = 0;
};

/// Reads `score,mated,group` CSV. Throws ParseError naming the line.
ComparisonSet parse_comparisons(std::istream& in);
ComparisonSet parse_comparisons(std::string_view text);

/// Writes the CSV form read by parse_comparisons. Scores use the shortest
/// representation that round-trips exactly.
void write_comparisons(std::ostream& out, const ComparisonSet& set);
std::string write_comparisons(const ComparisonSet& set);

/// One decision threshold. Values solved from scores carry all fields; a
/// rate table loaded from a document may only know the label.
struct ThresholdEntry {
  std::string label;
  std::optional<double> target;        // configured global FMR, fraction
  std::optional<double> value;         // threshold t_z in score units
  std::optional<double> achieved_fmr;  // realised global FMR, fraction
};

struct ThresholdSet {
  std::vector<ThresholdEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  const ThresholdEntry& operator[](std::size_t z) const { return entries[z]; }
  std::vector<std::string> labels() const;
};

/// FMR/FNMR per group per threshold, as fractions. fmr[g][z] is group g at
/// threshold z. Overall rows are empty when unknown.
struct GroupRateTable {
  std::string name;
  std::vector<std::string> groups;
  ThresholdSet thresholds;
  std::vector<std::vector<double>> fmr;
  std::vector<std::vector<double>> fnmr;
  std::vector<double> overall_fmr;
  std::vector<double> overall_fnmr;

  /// Throws InputError on shape mismatch or a rate outside [0,1].
  void check() const;

  std::vector<double> fmr_at(std::size_t z) const;
  std::vector<double> fnmr_at(std::size_t z) const;
};

/// Parses the rate-table document (JSON object with `groups`,
/// `threshold_labels`, `fmr`, `fnmr`; optional `name`, `schema_version`,
/// `threshold_targets`, `overall_fmr`, `overall_fnmr`). Unknown keys are
/// rejected; out-of-range values are rejected, never clamped.
GroupRateTable parse_rate_table(std::string_view document);
GroupRateTable load_rate_table(const std::string& path);

/// Inverse of parse_rate_table.
std::string write_rate_table(const GroupRateTable& table);

struct ValidationFinding {
  std::optional<std::size_t> record;  // index into ComparisonSet::records()
  std::string group;
  std::string reason;
};

struct ValidationReport {
  std::vector<ValidationFinding> errors;
  std::vector<ValidationFinding> warnings;

  bool usable() const noexcept { return errors.empty(); }
};

/// Errors for every group lacking mated or non-mated records (and for an
/// empty set). Warns when a group has fewer non-mated records than needed
/// to resolve `finest_fmr` (one false match must not exceed it).
ValidationReport validate_set(const ComparisonSet& set, double finest_fmr = 0.001);

}  // namespace fairgauge
