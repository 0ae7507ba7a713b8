#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "gdm/aggregation.hpp"

namespace gdm {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::filesystem::path> log;
    std::optional<int> maxRounds;
    ThresholdMapping thresholds;
    std::map<std::string, std::string> tokens;  // bearer token -> userId
};

// Minimal TOML subset: `key = value` pairs (strings in double quotes,
// integers, fractions as "2/3" strings or decimals), `[thresholds]` and
// `[tokens]` tables, `#` comments. Throws Error(BadRequest) with a line number.
ServiceConfig parseConfig(std::string_view text);
ServiceConfig loadConfig(const std::filesystem::path& path);

// Reads the file named by GDM_CONFIG, or defaults when unset.
ServiceConfig configFromEnvironment();

}  // namespace gdm
