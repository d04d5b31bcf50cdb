#include "core/response_parse.hpp"

#include <cstdlib>
#include <map>

#include "core/errors.hpp"
#include "core/json_extract.hpp"

namespace cci {

namespace {

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings) warnings->push_back(std::move(message));
}

// Accepts JSON numbers and number-typed strings ("0.85"), which some models
// emit despite the schema.
double numeric_value(const nlohmann::json& value, const std::string& label) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    char* end = nullptr;
    const double parsed = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && end && *end == '\0') return parsed;
  }
  raise(ErrorCode::schema_mismatch, "non-numeric score for " + label);
}

double clamp_score(double value, const std::string& label,
                   std::vector<std::string>* warnings) {
  if (value >= 0.0 && value <= 1.0) return value;
  if (value > 1.0 && value <= 1.0 + kClampTolerance) {
    warn(warnings, "clamped " + label + " from " + std::to_string(value) + " to 1.0");
    return 1.0;
  }
  if (value < 0.0 && value >= -kClampTolerance) {
    warn(warnings, "clamped " + label + " from " + std::to_string(value) + " to 0.0");
    return 0.0;
  }
  raise(ErrorCode::out_of_range_score,
        label + " outside [0,1] beyond clamp tolerance: " + std::to_string(value));
}

}  // namespace

GeneralityVector parse_generality_response(const std::string& text,
                                           const CultureSet& set,
                                           std::vector<std::string>* warnings) {
  auto object = extract_first_json_object(text);
  if (!object) {
    raise(ErrorCode::no_json_found, "no JSON object in response");
  }
  auto scores_it = object->find("scores");
  if (scores_it == object->end() || !scores_it->is_object()) {
    raise(ErrorCode::schema_mismatch, "response object has no \"scores\" map");
  }
  std::map<std::string, double> scores;
  for (const auto& [name, value] : scores_it->items()) {
    if (!set.contains(name)) {
      warn(warnings, "dropped extra culture in response: " + name);
      continue;
    }
    scores[name] = clamp_score(numeric_value(value, name), name, warnings);
  }
  for (const auto& name : set.cultures()) {
    if (!scores.count(name)) {
      raise(ErrorCode::missing_culture, "response missing culture: " + name);
    }
  }
  return make_generality_vector(scores, set, VectorKind::single_run);
}

double parse_baseline_response(const std::string& text,
                               std::vector<std::string>* warnings) {
  auto object = extract_first_json_object(text);
  if (!object) {
    raise(ErrorCode::no_json_found, "no JSON object in response");
  }
  auto score_it = object->find("score");
  if (score_it == object->end()) {
    raise(ErrorCode::schema_mismatch, "response object has no \"score\" field");
  }
  return clamp_score(numeric_value(*score_it, "score"), "score", warnings);
}

}  // namespace cci
