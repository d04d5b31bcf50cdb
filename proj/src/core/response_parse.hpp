#pragma once

#include <string>
#include <vector>

#include "core/cultures.hpp"
#include "core/index.hpp"

namespace cci {

// Scores the prompts demand to lie in [0.00, 1.00]; values off by at most
// this much are clamped with a warning, anything further is rejected as
// OutOfRangeScore.
inline constexpr double kClampTolerance = 0.05;

// Extracts the first well-formed JSON object from the response text, reads
// its "scores" map and validates coverage of the culture set. Extra cultures
// are dropped with a warning. Throws NoJsonFound, SchemaMismatch,
// MissingCulture or OutOfRangeScore.
GeneralityVector parse_generality_response(const std::string& text,
                                           const CultureSet& set,
                                           std::vector<std::string>* warnings);

// Extracts "score" from the first JSON object; same clamp policy.
double parse_baseline_response(const std::string& text,
                               std::vector<std::string>* warnings);

}  // namespace cci
