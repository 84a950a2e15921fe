// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/score_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fairgauge {

namespace {

constexpr std::string_view kHeader = "score,mated,group";

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double parse_score(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;  // from_chars rejects a leading '+'
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty())
    throw ParseError(line, "malformed score '" + std::string(field) + "'");
  if (!std::isfinite(value)) throw ParseError(line, "score is not finite");
  return value;
}

}  // namespace

bool is_valid_group_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') return false;
  }
  return true;
}

ComparisonSet::ComparisonSet(std::vector<ComparisonRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!std::isfinite(r.score))
      throw InputError("record " + std::to_string(i) + ": score is not finite");
    if (!is_valid_group_token(r.group))
      throw InputError("record " + std::to_string(i) + ": invalid group token '" + r.group + "'");
    auto idx = group_index(r.group);
    if (!idx) {
      groups_.push_back(r.group);
      counts_.emplace_back();
      idx = groups_.size() - 1;
    }
    if (r.mated) {
      ++counts_[*idx].mated;
      ++mated_;
    } else {
      ++counts_[*idx].nonmated;
    }
  }
}

std::optional<std::size_t> ComparisonSet::group_index(std::string_view group) const {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g] == group) return g;
  }
  return std::nullopt;
}

ComparisonSet parse_comparisons(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<ComparisonRecord> records;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim_cr(raw);
    if (!have_header) {
      if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      if (line != kHeader) throw ParseError(line_no, "missing header '" + std::string(kHeader) + "'");
      have_header = true;
      continue;
    }
    if (line.empty()) continue;

    auto c1 = line.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw ParseError(line_no, "expected 3 fields");

    ComparisonRecord rec;
    rec.score = parse_score(line.substr(0, c1), line_no);

    auto mated = line.substr(c1 + 1, c2 - c1 - 1);
    if (mated == "1") {
      rec.mated = true;
    } else if (mated == "0") {
      rec.mated = false;
    } else {
      throw ParseError(line_no, "invalid mated flag '" + std::string(mated) + "' (expected 0 or 1)");
    }

    auto group = line.substr(c2 + 1);
    if (group.empty()) throw ParseError(line_no, "empty group");
    if (!is_valid_group_token(group)) throw ParseError(line_no, "invalid group token");
    rec.group = std::string(group);
    records.push_back(std::move(rec));
  }
  if (!have_header) throw ParseError(1, "missing header '" + std::string(kHeader) + "'");
  return ComparisonSet(std::move(records));
}

ComparisonSet parse_comparisons(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_comparisons(in);
}

void write_comparisons(std::ostream& out, const ComparisonSet& set) {
  out << kHeader << '\n';
  char buf[64];
  for (const auto& r : set.records()) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r.score);
    out.write(buf, ptr - buf);
    out << ',' << (r.mated ? '1' : '0') << ',' << r.group << '\n';
  }
}

std::string write_comparisons(const ComparisonSet& set) {
  std::ostringstream out;
  write_comparisons(out, set);
  return out.str();
}

std::vector<std::string> ThresholdSet::labels() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.label);
  return out;
}

void GroupRateTable::check() const {
  const std::size_t n = groups.size();
  const std::size_t m = thresholds.size();
  auto check_matrix = [&](const std::vector<std::vector<double>>& mat, const char* key) {
    if (mat.size() != n)
      throw InputError(std::string(key) + ": expected " + std::to_string(n) + " rows, got " +
                       std::to_string(mat.size()));
    for (std::size_t g = 0; g < n; ++g) {
      if (mat[g].size() != m)
        throw InputError(std::string(key) + "[" + std::to_string(g) + "]: expected " + std::to_string(m) +
                         " columns, got " + std::to_string(mat[g].size()));
      for (std::size_t z = 0; z < m; ++z) {
        double v = mat[g][z];
        if (!(v >= 0.0 && v <= 1.0))
          throw InputError(std::string(key) + "[" + std::to_string(g) + "][" + std::to_string(z) +
                           "]: rate outside [0,1]");
      }
    }
  };
  auto check_row = [&](const std::vector<double>& row, const char* key) {
    if (row.empty()) return;
    if (row.size() != m)
      throw InputError(std::string(key) + ": expected " + std::to_string(m) + " entries");
    for (std::size_t z = 0; z < m; ++z) {
      if (!(row[z] >= 0.0 && row[z] <= 1.0))
        throw InputError(std::string(key) + "[" + std::to_string(z) + "]: rate outside [0,1]");
    }
  };
  for (const auto& g : groups) {
    if (!is_valid_group_token(g)) throw InputError("groups: invalid group token '" + g + "'");
  }
  check_matrix(fmr, "fmr");
  check_matrix(fnmr, "fnmr");
  check_row(overall_fmr, "overall_fmr");
  check_row(overall_fnmr, "overall_fnmr");
}

std::vector<double> GroupRateTable::fmr_at(std::size_t z) const {
  std::vector<double> col;
  col.reserve(fmr.size());
  for (const auto& row : fmr) col.push_back(row.at(z));
  return col;
}

std::vector<double> GroupRateTable::fnmr_at(std::size_t z) const {
  std::vector<double> col;
  col.reserve(fnmr.size());
  for (const auto& row : fnmr) col.push_back(row.at(z));
  return col;
}

GroupRateTable parse_rate_table(std::string_view document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("rate table: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("rate table: expected a JSON object");

  static const std::vector<std::string> known = {"schema_version", "name",        "groups",     "threshold_labels",
                                                 "threshold_targets", "fmr",      "fnmr",       "overall_fmr",
                                                 "overall_fnmr"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InputError("rate table: unknown field '" + key + "'");
  }
  for (const char* key : {"groups", "threshold_labels", "fmr", "fnmr"}) {
    if (!doc.contains(key)) throw InputError(std::string("rate table: missing field '") + key + "'");
  }

  GroupRateTable table;
  try {
    if (doc.contains("schema_version") && doc["schema_version"].get<int>() != 1)
      throw InputError("rate table: unsupported schema_version");
    if (doc.contains("name")) table.name = doc["name"].get<std::string>();
    table.groups = doc["groups"].get<std::vector<std::string>>();
    auto labels = doc["threshold_labels"].get<std::vector<std::string>>();
    std::vector<double> targets;
    if (doc.contains("threshold_targets")) {
      targets = doc["threshold_targets"].get<std::vector<double>>();
      if (targets.size() != labels.size())
        throw InputError("rate table: threshold_targets length differs from threshold_labels");
    }
    for (std::size_t z = 0; z < labels.size(); ++z) {
      ThresholdEntry e;
      e.label = labels[z];
      if (!targets.empty()) e.target = targets[z];
      table.thresholds.entries.push_back(std::move(e));
    }
    table.fmr = doc["fmr"].get<std::vector<std::vector<double>>>();
    table.fnmr = doc["fnmr"].get<std::vector<std::vector<double>>>();
    if (doc.contains("overall_fmr")) table.overall_fmr = doc["overall_fmr"].get<std::vector<double>>();
    if (doc.contains("overall_fnmr")) table.overall_fnmr = doc["overall_fnmr"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("rate table: ") + e.what());
  }
  table.check();
  return table;
}

GroupRateTable load_rate_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rate table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rate_table(buf.str());
}

std::string write_rate_table(const GroupRateTable& table) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  if (!table.name.empty()) doc["name"] = table.name;
  doc["groups"] = table.groups;
  doc["threshold_labels"] = table.thresholds.labels();
  bool all_targets = !table.thresholds.empty();
  std::vector<double> targets;
  for (const auto& e : table.thresholds.entries) {
    if (!e.target) all_targets = false;
    else targets.push_back(*e.target);
  }
  if (all_targets) doc["threshold_targets"] = targets;
  doc["fmr"] = table.fmr;
  doc["fnmr"] = table.fnmr;
  if (!table.overall_fmr.empty()) doc["overall_fmr"] = table.overall_fmr;
  if (!table.overall_fnmr.empty()) doc["overall_fnmr"] = table.overall_fnmr;
  return doc.dump(2) + "\n";
}

ValidationReport validate_set(const ComparisonSet& set, double finest_fmr) {
  ValidationReport report;
  if (set.empty()) {
    report.errors.push_back({std::nullopt, {}, "no comparison records"});
    return report;
  }
  const auto& groups = set.groups();
  const auto& counts = set.group_counts();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (counts[g].mated == 0)
      report.errors.push_back({std::nullopt, groups[g], "group '" + groups[g] + "' has no mated records"});
    if (counts[g].nonmated == 0)
      report.errors.push_back({std::nullopt, groups[g], "group '" + groups[g] + "' has no non-mated records"});
    else if (finest_fmr > 0.0 && 1.0 / static_cast<double>(counts[g].nonmated) > finest_fmr) {
      std::ostringstream msg;
      msg << "group '" << groups[g] << "' has " << counts[g].nonmated
          << " non-mated records; insufficient for FMR=" << finest_fmr * 100.0 << "% resolution";
      report.warnings.push_back({std::nullopt, groups[g], msg.str()});
    }
  }
  return report;
}

}  // namespace fairgauge
