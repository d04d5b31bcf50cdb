#pragma once

#include <optional>
#include <string_view>

#include <json.hpp>

namespace cci {

// Scans for the first balanced, well-formed JSON object in the text and
// returns it parsed. Prose before, after, or between candidates is skipped;
// candidates that do not parse are skipped too. Never throws.
std::optional<nlohmann::json> extract_first_json_object(std::string_view text);

// Same, for a top-level JSON array.
std::optional<nlohmann::json> extract_first_json_array(std::string_view text);

}  // namespace cci
