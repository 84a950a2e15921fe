// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/config_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_detail.hpp"

namespace fairgauge {

namespace detail {

void reject_unknown(const nlohmann::json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw InputError(path + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw InputError((path.empty() ? key : path + "." + key) + ": unknown field");
  }
}

nlohmann::json parse_config_object(std::string_view document, std::string_view what,
                                   std::initializer_list<std::string_view> allowed) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
  if (!doc.is_object()) throw InputError(std::string(what) + ": expected a JSON object");
  if (!doc.contains("version")) throw InputError(std::string(what) + ": version: missing");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
    throw InputError(std::string(what) + ": version: unsupported (expected 1)");
  for (const auto& [key, _] : doc.items()) {
    if (key == "version") continue;
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw InputError(std::string(what) + ": " + key + ": unknown field");
  }
  return doc;
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

ojson extended(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round4(x);
}

ojson to_json(const RunConfig& cfg) {
  ojson j;
  j["version"] = 1;
  j["alpha"] = cfg.fairness.alpha;
  j["fmr_targets"] = cfg.points.targets;
  j["bias_policy"] = {{"kappa", cfg.policy.kappa}, {"scope", cfg.policy.scope}};
  ojson formats = ojson::array();
  for (auto f : cfg.formats) formats.push_back(std::string(format_name(f)));
  j["formats"] = formats;
  j["delta_tolerance"] = cfg.delta_tolerance;
  return j;
}

ojson to_json(const ScenarioSpec& spec) {
  ojson j;
  j["version"] = 1;
  j["seed"] = spec.seed;
  ojson groups = ojson::array();
  for (const auto& g : spec.groups) {
    groups.push_back({{"id", g.id},
                      {"mated_mean", g.mated_mean},
                      {"mated_sd", g.mated_sd},
                      {"nonmated_mean", g.nonmated_mean},
                      {"nonmated_sd", g.nonmated_sd},
                      {"n_mated", g.n_mated},
                      {"n_nonmated", g.n_nonmated}});
  }
  j["groups"] = groups;
  return j;
}

ojson to_json(const MitigationSpec& mit) {
  ojson j;
  j["version"] = 1;
  j["mode"] = mit.mode == MitigationMode::targeted ? "targeted" : "balanced";
  j["target_groups"] = mit.target_groups;
  j["strength"] = mit.strength;
  j["overshoot"] = mit.overshoot;
  j["mated_sd_gain"] = mit.mated_sd_gain;
  return j;
}

}  // namespace detail

namespace {

template <typename T>
T field(const nlohmann::json& obj, const char* key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError((path.empty() ? std::string(key) : path + "." + key) + ": missing or wrong type");
  }
}

template <typename T>
T field_or(const nlohmann::json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  return field<T>(obj, key, path);
}

std::size_t count_field(const nlohmann::json& obj, const char* key, const std::string& path) {
  const std::string full = path + "." + key;
  if (!obj.contains(key)) throw InputError(full + ": missing");
  const auto& v = obj[key];
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw InputError(full + ": must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  throw InputError("unknown report format '" + std::string(name) + "'");
}

std::string_view format_name(ReportFormat format) {
  return format == ReportFormat::json ? "json" : "markdown";
}

void RunConfig::validate() const {
  fairness.validate();
  try {
    points.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("fmr_targets: ") + e.what());
  }
  try {
    policy.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("bias_policy.") + e.what());
  }
  if (!(delta_tolerance >= 0.0) || !std::isfinite(delta_tolerance))
    throw InputError("delta_tolerance: must be >= 0");
}

RunConfig parse_run_config(std::string_view document) {
  auto doc = detail::parse_config_object(document, "run config",
                                         {"alpha", "fmr_targets", "bias_policy", "formats", "delta_tolerance"});
  RunConfig cfg;
  cfg.fairness.alpha = field_or<double>(doc, "alpha", "", cfg.fairness.alpha);
  cfg.points.targets = field_or<std::vector<double>>(doc, "fmr_targets", "", cfg.points.targets);
  if (doc.contains("bias_policy")) {
    const auto& bp = doc["bias_policy"];
    detail::reject_unknown(bp, "bias_policy", {"kappa", "scope"});
    cfg.policy.kappa = field_or<double>(bp, "kappa", "bias_policy", cfg.policy.kappa);
    cfg.policy.scope = field_or<std::vector<std::string>>(bp, "scope", "bias_policy", cfg.policy.scope);
  }
  if (doc.contains("formats")) {
    cfg.formats.clear();
    for (const auto& name : field<std::vector<std::string>>(doc, "formats", ""))
      cfg.formats.push_back(parse_report_format(name));
  }
  cfg.delta_tolerance = field_or<double>(doc, "delta_tolerance", "", cfg.delta_tolerance);
  try {
    cfg.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("run config: ") + e.what());
  }
  return cfg;
}

ScenarioSpec parse_scenario(std::string_view document) {
  auto doc = detail::parse_config_object(document, "scenario", {"seed", "groups"});
  ScenarioSpec spec;
  if (!doc.contains("seed") || !doc["seed"].is_number_integer() ||
      (!doc["seed"].is_number_unsigned() && doc["seed"].get<long long>() < 0))
    throw InputError("scenario: seed: must be a non-negative integer");
  spec.seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("groups") || !doc["groups"].is_array())
    throw InputError("scenario: groups: must be an array");
  const auto& groups = doc["groups"];
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string path = "groups[" + std::to_string(i) + "]";
    const auto& g = groups[i];
    detail::reject_unknown(g, path,
                           {"id", "mated_mean", "mated_sd", "nonmated_mean", "nonmated_sd", "n_mated", "n_nonmated"});
    GroupDistribution d;
    d.id = field<std::string>(g, "id", path);
    d.mated_mean = field<double>(g, "mated_mean", path);
    d.mated_sd = field<double>(g, "mated_sd", path);
    d.nonmated_mean = field<double>(g, "nonmated_mean", path);
    d.nonmated_sd = field<double>(g, "nonmated_sd", path);
    d.n_mated = count_field(g, "n_mated", path);
    d.n_nonmated = count_field(g, "n_nonmated", path);
    spec.groups.push_back(std::move(d));
  }
  try {
    spec.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
  return spec;
}

MitigationSpec parse_mitigation(std::string_view document) {
  auto doc = detail::parse_config_object(document, "mitigation",
                                         {"mode", "target_groups", "strength", "overshoot", "mated_sd_gain"});
  MitigationSpec mit;
  const auto mode = field<std::string>(doc, "mode", "");
  if (mode == "targeted") {
    mit.mode = MitigationMode::targeted;
  } else if (mode == "balanced") {
    mit.mode = MitigationMode::balanced;
  } else {
    throw InputError("mitigation: mode: expected 'targeted' or 'balanced'");
  }
  mit.target_groups = field_or<std::vector<std::string>>(doc, "target_groups", "", {});
  mit.strength = field_or<double>(doc, "strength", "", mit.strength);
  mit.overshoot = field_or<double>(doc, "overshoot", "", 0.0);
  mit.mated_sd_gain = field_or<double>(doc, "mated_sd_gain", "", 0.0);
  try {
    mit.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("mitigation: ") + e.what());
  }
  return mit;
}

std::string dump_run_config(const RunConfig& cfg) { return detail::to_json(cfg).dump(2) + "\n"; }
std::string dump_scenario(const ScenarioSpec& spec) { return detail::to_json(spec).dump(2) + "\n"; }
std::string dump_mitigation(const MitigationSpec& mit) { return detail::to_json(mit).dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return buf.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace fairgauge
