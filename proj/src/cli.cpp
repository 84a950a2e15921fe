// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

namespace fairgauge {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::string extension(ReportFormat f) { return f == ReportFormat::json ? ".json" : ".md"; }

void write_report(const AuditReport& report, const std::vector<ReportFormat>& formats, const std::string& dir,
                  const std::string& stem) {
  for (auto f : formats) write_file_atomic((fs::path(dir) / (stem + extension(f))).string(), emit_report(report, f));
}

// Prefixes the message with the pipeline stage while keeping the error kind.
template <typename Fn>
auto stage_tagged(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const MetricUndefined& e) {
    throw MetricUndefined(std::string(stage) + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(std::string(stage) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(std::string(stage) + ": " + e.what());
  }
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const MetricUndefined*>(&e)) return kExitMetricUndefined;
  if (dynamic_cast<const IoError*>(&e)) return kExitIoError;
  if (dynamic_cast<const InputError*>(&e)) return kExitInputError;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitIoError;
  return kExitInputError;
}

std::optional<std::uint64_t> seed_override_from_env() {
  const char* raw = std::getenv("FAIRGAUGE_SEED_OVERRIDE");
  if (!raw || !*raw) return std::nullopt;
  std::string_view text(raw);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InputError("FAIRGAUGE_SEED_OVERRIDE: not a non-negative integer: '" + std::string(text) + "'");
  return value;
}

AuditReport cmd_audit(const std::string& scores_path, const RunConfig& config, const std::string& out_dir) {
  config.validate();
  const std::string bytes = read_file(scores_path);
  ComparisonSet set = parse_comparisons(bytes);

  const double finest = config.points.targets.empty() ? 0.0 : config.points.targets.back();
  const auto validation = validate_set(set, finest);
  if (!validation.usable()) {
    std::string msg = "comparison set unusable:";
    for (const auto& e : validation.errors) msg += " " + e.reason + ";";
    throw InputError(msg);
  }

  AuditReport report;
  report.command = "audit";
  report.input_digest = sha256_digest(bytes);
  report.config = config;
  for (const auto& w : validation.warnings) report.warnings.push_back(w.reason);
  auto stage = audit_set(set, config.points, config.fairness, config.policy);
  report.rates = std::move(stage.rates);
  report.metrics = std::move(stage.metrics);
  report.flagged = std::move(stage.flagged);

  ensure_dir(out_dir);
  write_report(report, config.formats, out_dir, "audit");
  return report;
}

AuditReport cmd_metrics(const std::string& rates_path, double alpha, const std::string& out_dir) {
  const std::string bytes = read_file(rates_path);
  AuditReport report;
  report.command = "metrics";
  report.input_digest = sha256_digest(bytes);
  report.config.fairness.alpha = alpha;
  report.config.fairness.validate();
  report.rates = parse_rate_table(bytes);
  report.metrics = metric_suite(report.rates, report.config.fairness);

  ensure_dir(out_dir);
  write_report(report, {ReportFormat::json, ReportFormat::markdown}, out_dir, "metrics");
  return report;
}

ComparisonSet cmd_simulate(const std::string& scenario_path, const std::string& out_path) {
  ScenarioSpec spec = parse_scenario(read_file(scenario_path));
  if (auto seed = seed_override_from_env()) spec.seed = *seed;
  ComparisonSet set = generate_scenario(spec);
  const fs::path parent = fs::path(out_path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  write_file_atomic(out_path, write_comparisons(set));
  return set;
}

PipelineReport cmd_pipeline(const std::string& scenario_path, const std::string& mitigation_path,
                            const RunConfig& config, const std::string& out_dir) {
  config.validate();
  const std::string scenario_bytes = read_file(scenario_path);
  const std::string mitigation_bytes = read_file(mitigation_path);
  ScenarioSpec spec = parse_scenario(scenario_bytes);
  if (auto seed = seed_override_from_env()) spec.seed = *seed;
  const MitigationSpec mit = parse_mitigation(mitigation_bytes);

  // Validate each stage separately so a failure names where it happened.
  stage_tagged("bias identification", [&] {
    spec.validate();
    return 0;
  });
  stage_tagged("fine-tuning", [&] {
    mit.validate();
    if (mit.mode == MitigationMode::targeted) {
      for (const auto& id : mit.target_groups) {
        if (!spec.find(id)) throw InputError("unknown group id '" + id + "'");
      }
    }
    return 0;
  });
  PipelineReport result = stage_tagged("pipeline", [&] {
    return run_pipeline(spec, mit, config.points, config.fairness, config.policy);
  });

  const std::string digest = sha256_digest(dump_scenario(spec) + dump_mitigation(mit));
  auto stage_report = [&](const AuditStage& s, const char* name) {
    AuditReport r;
    r.command = "pipeline";
    r.stage = name;
    r.input_digest = digest;
    r.config = config;
    r.rates = s.rates;
    r.metrics = s.metrics;
    r.flagged = s.flagged;
    return r;
  };

  ensure_dir(out_dir);
  write_report(stage_report(result.before, "before"), config.formats, out_dir, "before");
  write_report(stage_report(result.after, "after"), config.formats, out_dir, "after");
  for (auto f : config.formats)
    write_file_atomic((fs::path(out_dir) / ("delta" + extension(f))).string(), emit_report(result, config, f));
  return result;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fairgauge: demographic fairness audits for biometric comparison scores", "fairgauge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string scores, rates, scenario, mitigation, config_path, out_path;
  double alpha = 0.5;

  auto* audit = app.add_subcommand("audit", "Audit a comparison-score CSV");
  audit->add_option("--scores", scores, "CSV with header score,mated,group")->required();
  audit->add_option("--config", config_path, "Run configuration (JSON)");
  audit->add_option("--out", out_path, "Output directory")->required();

  auto* metrics = app.add_subcommand("metrics", "Fairness metrics from a rate table");
  metrics->add_option("--rates", rates, "Rate table (JSON)")->required();
  metrics->add_option("--alpha", alpha, "FMR weight in (0,1)")->default_val(0.5);
  metrics->add_option("--out", out_path, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a comparison-score CSV from a scenario");
  simulate->add_option("--scenario", scenario, "Scenario (JSON)")->required();
  simulate->add_option("--out", out_path, "Output CSV")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Identify bias, apply simulated mitigation, re-audit");
  pipeline->add_option("--scenario", scenario, "Scenario (JSON)")->required();
  pipeline->add_option("--mitigation", mitigation, "Mitigation (JSON)")->required();
  pipeline->add_option("--config", config_path, "Run configuration (JSON)");
  pipeline->add_option("--out", out_path, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fairgauge: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    auto load_config = [&] { return config_path.empty() ? RunConfig{} : parse_run_config(read_file(config_path)); };
    if (*audit) {
      const auto report = cmd_audit(scores, load_config(), out_path);
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      out << "audit written to " << out_path << "\n";
    } else if (*metrics) {
      cmd_metrics(rates, alpha, out_path);
      out << "metrics written to " << out_path << "\n";
    } else if (*simulate) {
      const auto set = cmd_simulate(scenario, out_path);
      out << set.size() << " comparisons written to " << out_path << "\n";
    } else if (*pipeline) {
      const auto config = load_config();
      const auto report = cmd_pipeline(scenario, mitigation, config, out_path);
      out << "pipeline reports written to " << out_path << "\n";
      for (const auto& d : report.deltas) {
        out << "  " << d.label << ": GARBE " << format_extended(d.garbe, 4) << " ("
            << format_extended(d.garbe_relative * 100.0, 1) << "%)\n";
      }
    }
  } catch (const std::exception& e) {
    err << "fairgauge: error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace fairgauge
