#pragma once

// JSON campaign configuration (schema_version 1).
//
// Unknown keys are rejected. Geometry angles are given in degrees, lengths
// in metres, speeds in m/s, trims in radians. See README.md for the schema.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mme/protocol.hpp"

namespace mme {

inline constexpr int kConfigSchemaVersion = 1;

/// Parse and validate. Throws ConfigError naming the offending field.
CampaignConfig parse_config(const nlohmann::json& doc);

/// Read a config document from disk. A run manifest (`"kind":
/// "run_manifest"`) is unwrapped to the config snapshot it embeds.
nlohmann::json load_config_document(const std::filesystem::path& path);

inline CampaignConfig load_config(const std::filesystem::path& path) {
  return parse_config(load_config_document(path));
}

}  // namespace mme
