// SPDX-License-Identifier: Apache-2.0
// JSON helpers shared by the config and report writers. Not installed.
#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fairgauge/config_io.hpp"

namespace fairgauge::detail {

using ojson = nlohmann::ordered_json;

/// Parses a config document and checks `version` == 1 and that every key is
/// in `allowed` (`version` is implied).
nlohmann::json parse_config_object(std::string_view document, std::string_view what,
                                   std::initializer_list<std::string_view> allowed);

void reject_unknown(const nlohmann::json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed);

ojson to_json(const RunConfig& cfg);
ojson to_json(const ScenarioSpec& spec);
ojson to_json(const MitigationSpec& mit);

/// Rounds to 4 decimal places, the precision of every fraction in reports.
double round4(double x);

/// A finite value rounded to 4 places; +inf as "inf"; NaN as null.
ojson extended(double x);

}  // namespace fairgauge::detail
