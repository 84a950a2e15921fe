// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fairgauge/bias_sim.hpp"
#include "fairgauge/config_io.hpp"
#include "fairgauge/fairness.hpp"
#include "fairgauge/score_model.hpp"

namespace fairgauge {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Everything needed to re-run and check one audit: the rates, the metrics,
/// the config used and a digest of the input.
struct AuditReport {
  std::string command;  // "audit", "metrics", or "pipeline"
  std::string stage;    // pipeline stage ("before"/"after"), empty otherwise
  std::string input_digest;
  RunConfig config;
  GroupRateTable rates;
  FairnessReport metrics;
  std::vector<std::string> flagged;
  std::vector<std::string> warnings;
};

/// "sha256:<hex>" of `bytes`.
std::string sha256_digest(std::string_view bytes);

std::string emit_report(const AuditReport& report, ReportFormat format);
std::string emit_report(const FairnessReport& report, ReportFormat format);

/// Delta summary of a pipeline run. `tolerance` separates improvements and
/// regressions from noise.
std::string emit_report(const PipelineReport& report, const RunConfig& config, ReportFormat format);

/// "inf" for +infinity, otherwise fixed with `decimals` places.
std::string format_extended(double x, int decimals);

}  // namespace fairgauge
