// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fairgauge/bias_sim.hpp"
#include "fairgauge/fairness.hpp"
#include "fairgauge/rate_engine.hpp"

namespace fairgauge {

enum class ReportFormat { json, markdown };

ReportFormat parse_report_format(std::string_view name);
std::string_view format_name(ReportFormat format);

/// Settings shared by the audit and pipeline commands.
struct RunConfig {
  FairnessConfig fairness;
  OperationalPoints points;
  BiasPolicy policy;
  std::vector<ReportFormat> formats{ReportFormat::json, ReportFormat::markdown};
  // |delta GARBE| below this is reported as within noise.
  double delta_tolerance = 0.05;

  void validate() const;
};

// Configuration documents are JSON objects with `"version": 1`. Unknown fields
// are rejected and errors name the offending field path.
RunConfig parse_run_config(std::string_view document);
ScenarioSpec parse_scenario(std::string_view document);
MitigationSpec parse_mitigation(std::string_view document);

std::string dump_run_config(const RunConfig& cfg);
std::string dump_scenario(const ScenarioSpec& spec);
std::string dump_mitigation(const MitigationSpec& mit);

/// Whole file as a string; IoError if unreadable.
std::string read_file(const std::string& path);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace fairgauge
