#pragma once

#include "dualfuel/engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <string_view>

namespace dualfuel {

/// Reads a JSON document. Syntax errors become ConfigError with
/// "file:line:column" in the message.
nlohmann::json load_json_file(const std::filesystem::path& path);
nlohmann::json parse_json_text(std::string_view text, std::string_view origin);

/// Applies "dotted.path=value" to a scenario document. The value is read
/// as JSON when it parses, as a string otherwise. Missing objects along
/// the path are created.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Validates a scenario document against the schema (unknown keys are
/// rejected) and builds the configuration. Omitted sections take the
/// defaults of default_scenario(). Throws ConfigError naming the field.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

} // namespace dualfuel
