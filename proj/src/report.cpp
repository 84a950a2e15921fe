// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <openssl/evp.h>

#include "json_detail.hpp"

namespace fairgauge {

using detail::extended;
using detail::ojson;
using detail::round4;

namespace {

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

// Rates are rounded to 4 places once, so the percentage shown in markdown is
// the same number the JSON carries.
std::string percent(double rate) { return fixed(round4(rate) * 100.0, 2); }

std::string verdict(double delta, double tolerance) {
  if (delta > tolerance) return "regressed";
  if (delta < -tolerance) return "improved";
  return "within_noise";
}

std::string join(const std::vector<std::string>& items) {
  if (items.empty()) return "(none)";
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

ojson metric_rows_json(const FairnessReport& report) {
  ojson rows = ojson::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"threshold", r.label},
                    {"fdr", round4(r.fdr)},
                    {"ir", extended(r.ir)},
                    {"garbe", round4(r.garbe)},
                    {"a_diff", round4(r.a_diff)},
                    {"b_diff", round4(r.b_diff)},
                    {"a_ratio", extended(r.a_ratio)},
                    {"b_ratio", extended(r.b_ratio)},
                    {"gini_fmr", round4(r.gini_fmr)},
                    {"gini_fnmr", round4(r.gini_fnmr)}});
  }
  return rows;
}

ojson thresholds_json(const ThresholdSet& ts) {
  ojson out = ojson::array();
  for (const auto& e : ts.entries) {
    ojson j;
    j["label"] = e.label;
    j["target"] = e.target ? ojson(round4(*e.target)) : ojson(nullptr);
    j["value"] = e.value ? ojson(*e.value) : ojson(nullptr);
    j["achieved_fmr"] = e.achieved_fmr ? ojson(round4(*e.achieved_fmr)) : ojson(nullptr);
    out.push_back(j);
  }
  return out;
}

ojson matrix_json(const std::vector<std::vector<double>>& m) {
  ojson out = ojson::array();
  for (const auto& row : m) {
    ojson r = ojson::array();
    for (double v : row) r.push_back(round4(v));
    out.push_back(r);
  }
  return out;
}

ojson row_json(const std::vector<double>& v) {
  ojson out = ojson::array();
  for (double x : v) out.push_back(round4(x));
  return out;
}

ojson rates_json(const GroupRateTable& t) {
  ojson j;
  j["groups"] = t.groups;
  j["fmr"] = matrix_json(t.fmr);
  j["fnmr"] = matrix_json(t.fnmr);
  j["overall_fmr"] = row_json(t.overall_fmr);
  j["overall_fnmr"] = row_json(t.overall_fnmr);
  return j;
}

void markdown_rates(std::ostringstream& md, const GroupRateTable& t) {
  const auto labels = t.thresholds.labels();
  md << "| DG |";
  for (const auto& l : labels) md << " FMR [%] " << l << " |";
  for (const auto& l : labels) md << " FNMR [%] " << l << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < 2 * labels.size(); ++i) md << "---:|";
  md << "\n";
  for (std::size_t g = 0; g < t.groups.size(); ++g) {
    md << "| " << t.groups[g] << " |";
    for (double v : t.fmr[g]) md << " " << percent(v) << " |";
    for (double v : t.fnmr[g]) md << " " << percent(v) << " |";
    md << "\n";
  }
  if (!t.overall_fmr.empty() && !t.overall_fnmr.empty()) {
    md << "| OV |";
    for (double v : t.overall_fmr) md << " " << percent(v) << " |";
    for (double v : t.overall_fnmr) md << " " << percent(v) << " |";
    md << "\n";
  }
}

void markdown_metrics(std::ostringstream& md, const FairnessReport& report) {
  md << "| Threshold | FDR | IR | GARBE | A (max dFMR) | B (max dFNMR) | G_FMR | G_FNMR |\n";
  md << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : report.rows) {
    md << "| " << r.label << " | " << fixed(round4(r.fdr), 4) << " | " << format_extended(r.ir, 4) << " | "
       << fixed(round4(r.garbe), 4) << " | " << fixed(round4(r.a_diff), 4) << " | " << fixed(round4(r.b_diff), 4)
       << " | " << fixed(round4(r.gini_fmr), 4) << " | " << fixed(round4(r.gini_fnmr), 4) << " |\n";
  }
  if (report.rows.empty()) md << "\n_No thresholds._\n";
}

ojson audit_json(const AuditReport& r) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "fairgauge";
  j["tool_version"] = std::string(kToolVersion);
  j["command"] = r.command;
  if (!r.stage.empty()) j["stage"] = r.stage;
  j["input_digest"] = r.input_digest;
  j["config"] = detail::to_json(r.config);
  j["thresholds"] = thresholds_json(r.rates.thresholds);
  j["rates"] = rates_json(r.rates);
  j["metrics"] = metric_rows_json(r.metrics);
  j["flagged_groups"] = r.flagged;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace

std::string sha256_digest(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string format_extended(double x, int decimals) {
  if (std::isnan(x)) return "n/a";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fixed(round4(x), decimals);
}

std::string emit_report(const FairnessReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["groups"] = report.groups;
    j["alpha"] = report.config.alpha;
    j["metrics"] = metric_rows_json(report);
    return j.dump(2) + "\n";
  }
  std::ostringstream md;
  md << "# Fairness metrics\n\n";
  md << "Groups: " << join(report.groups) << "; alpha = " << report.config.alpha << "\n\n";
  markdown_metrics(md, report);
  return md.str();
}

std::string emit_report(const AuditReport& report, ReportFormat format) {
  if (format == ReportFormat::json) return audit_json(report).dump(2) + "\n";

  std::ostringstream md;
  md << "# Fairness " << (report.command == "metrics" ? "metrics" : "audit");
  if (!report.stage.empty()) md << " (" << report.stage << ")";
  md << "\n\n";
  md << "- Input: `" << report.input_digest << "`\n";
  md << "- alpha: " << report.config.fairness.alpha << "\n";
  if (report.command != "metrics") {
    md << "- Operational points (global FMR):";
    for (const auto& e : report.rates.thresholds.entries) {
      md << " " << e.label << "=" << (e.target ? percent(*e.target) + "%" : std::string("?"));
    }
    md << "\n";
  }
  md << "\n## Error rates per demographic group\n\n";
  markdown_rates(md, report.rates);
  md << "\n## Fairness metrics\n\n";
  markdown_metrics(md, report.metrics);
  if (report.command != "metrics") {
    md << "\n## Bias identification\n\n";
    md << "Flagged (FMR > " << report.config.policy.kappa << " x overall FMR): " << join(report.flagged) << "\n";
  }
  if (!report.warnings.empty()) {
    md << "\n## Warnings\n\n";
    for (const auto& w : report.warnings) md << "- " << w << "\n";
  }
  return md.str();
}

std::string emit_report(const PipelineReport& report, const RunConfig& config, ReportFormat format) {
  const auto& before = report.before;
  const auto& after = report.after;
  const double tol = config.delta_tolerance;

  std::vector<std::string> added, removed;
  for (const auto& g : after.flagged) {
    if (std::find(before.flagged.begin(), before.flagged.end(), g) == before.flagged.end()) added.push_back(g);
  }
  for (const auto& g : before.flagged) {
    if (std::find(after.flagged.begin(), after.flagged.end(), g) == after.flagged.end()) removed.push_back(g);
  }
  bool regression = false;
  for (const auto& d : report.deltas) regression = regression || verdict(d.garbe, tol) == "regressed";

  if (format == ReportFormat::json) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "fairgauge";
    j["tool_version"] = std::string(kToolVersion);
    j["command"] = "pipeline";
    j["note"] = "simulated mitigation: score-distribution shift, no model training";
    j["config"] = detail::to_json(config);
    j["scenario"] = detail::to_json(report.scenario_before);
    j["mitigation"] = detail::to_json(report.mitigation);
    j["scenario_after"] = detail::to_json(report.scenario_after);
    j["identified_groups"] = report.identified;
    j["mitigated_groups"] = report.mitigated;
    j["mitigation_applied"] = report.mitigation_applied;
    j["flagged_before"] = before.flagged;
    j["flagged_after"] = after.flagged;
    j["flag_changes"] = {{"added", added}, {"removed", removed}};
    j["thresholds_before"] = thresholds_json(before.rates.thresholds);
    j["thresholds_after"] = thresholds_json(after.rates.thresholds);
    ojson deltas = ojson::array();
    for (std::size_t z = 0; z < report.deltas.size(); ++z) {
      const auto& d = report.deltas[z];
      const auto& rb = before.metrics.rows[z];
      const auto& ra = after.metrics.rows[z];
      deltas.push_back({{"threshold", d.label},
                        {"fdr_before", round4(rb.fdr)},
                        {"fdr_after", round4(ra.fdr)},
                        {"delta_fdr", round4(d.fdr)},
                        {"ir_before", extended(rb.ir)},
                        {"ir_after", extended(ra.ir)},
                        {"delta_ir", extended(d.ir)},
                        {"garbe_before", round4(rb.garbe)},
                        {"garbe_after", round4(ra.garbe)},
                        {"delta_garbe", round4(d.garbe)},
                        {"garbe_relative_change", round4(d.garbe_relative)},
                        {"garbe_verdict", verdict(d.garbe, tol)}});
    }
    j["metric_deltas"] = deltas;
    ojson groups = ojson::array();
    for (std::size_t g = 0; g < before.rates.groups.size(); ++g) {
      groups.push_back({{"group", before.rates.groups[g]},
                        {"delta_fmr", row_json(report.delta_fmr[g])},
                        {"delta_fnmr", row_json(report.delta_fnmr[g])}});
    }
    j["group_deltas"] = groups;
    j["garbe_regression"] = regression;
    return j.dump(2) + "\n";
  }

  std::ostringstream md;
  md << "# Bias mitigation summary (simulated)\n\n";
  md << "- Identified groups: " << join(report.identified) << "\n";
  md << "- Mitigation: "
     << (report.mitigation.mode == MitigationMode::targeted ? "targeted" : "balanced")
     << ", strength " << report.mitigation.strength;
  if (report.mitigation.overshoot > 0.0) md << ", overshoot " << report.mitigation.overshoot;
  md << (report.mitigation_applied ? "" : " (not applied: no target groups)") << "\n";
  md << "- Mitigated groups: " << join(report.mitigated) << "\n";
  md << "- Flagged after: " << join(after.flagged) << " (added: " << join(added) << "; removed: " << join(removed)
     << ")\n";
  md << "- GARBE regression: " << (regression ? "YES" : "no") << " (tolerance " << tol << ")\n\n";

  md << "| Threshold | FDR before | FDR after | dFDR | IR before | IR after | GARBE before | GARBE after | dGARBE | "
        "verdict |\n";
  md << "|---|---:|---:|---:|---:|---:|---:|---:|---:|---|\n";
  for (std::size_t z = 0; z < report.deltas.size(); ++z) {
    const auto& d = report.deltas[z];
    const auto& rb = before.metrics.rows[z];
    const auto& ra = after.metrics.rows[z];
    md << "| " << d.label << " | " << fixed(round4(rb.fdr), 4) << " | " << fixed(round4(ra.fdr), 4) << " | "
       << fixed(round4(d.fdr), 4) << " | " << format_extended(rb.ir, 4) << " | " << format_extended(ra.ir, 4)
       << " | " << fixed(round4(rb.garbe), 4) << " | " << fixed(round4(ra.garbe), 4) << " | "
       << fixed(round4(d.garbe), 4) << " | " << verdict(d.garbe, tol) << " |\n";
  }

  md << "\n## Per-group change in error rates [percentage points]\n\n";
  const auto labels = before.rates.thresholds.labels();
  md << "| DG |";
  for (const auto& l : labels) md << " dFMR " << l << " |";
  for (const auto& l : labels) md << " dFNMR " << l << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < 2 * labels.size(); ++i) md << "---:|";
  md << "\n";
  for (std::size_t g = 0; g < before.rates.groups.size(); ++g) {
    md << "| " << before.rates.groups[g] << " |";
    for (double v : report.delta_fmr[g]) md << " " << percent(v) << " |";
    for (double v : report.delta_fnmr[g]) md << " " << percent(v) << " |";
    md << "\n";
  }
  return md.str();
}

}  // namespace fairgauge
