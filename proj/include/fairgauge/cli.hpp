// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairgauge/bias_sim.hpp"
#include "fairgauge/config_io.hpp"
#include "fairgauge/report.hpp"

namespace fairgauge {

/// Process exit codes of the fairgauge CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitMetricUndefined = 3,
  kExitIoError = 4,
};

/// Maps a library exception to its exit code.
int exit_code_for(const std::exception& e) noexcept;

/// Parses FAIRGAUGE_SEED_OVERRIDE if set; InputError if it is not an integer.
std::optional<std::uint64_t> seed_override_from_env();

// Each command writes its artifacts into `out` (a directory, or the CSV path
// for simulate) and returns what it wrote. Errors are thrown; run_cli turns
// them into exit codes.
AuditReport cmd_audit(const std::string& scores_path, const RunConfig& config, const std::string& out_dir);
AuditReport cmd_metrics(const std::string& rates_path, double alpha, const std::string& out_dir);
ComparisonSet cmd_simulate(const std::string& scenario_path, const std::string& out_path);
PipelineReport cmd_pipeline(const std::string& scenario_path, const std::string& mitigation_path,
                            const RunConfig& config, const std::string& out_dir);

/// Entry point behind the `fairgauge` binary. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairgauge
