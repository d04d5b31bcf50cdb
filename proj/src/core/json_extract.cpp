#include "core/json_extract.hpp"

namespace cci {

namespace {

// End index (one past the closing char) of a balanced candidate starting at
// `start`, tracking JSON string syntax so braces inside strings don't count.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t start,
                                        char open, char close) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == open) {
      ++depth;
    } else if (c == close) {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

std::optional<nlohmann::json> extract_first(std::string_view text, char open,
                                            char close) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != open) continue;
    auto end = balanced_end(text, i, open, close);
    if (!end) continue;  // unbalanced from here; a later candidate may close
    auto candidate = text.substr(i, *end - i);
    auto parsed = nlohmann::json::parse(candidate, nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  return std::nullopt;
}

}  // namespace

std::optional<nlohmann::json> extract_first_json_object(std::string_view text) {
  return extract_first(text, '{', '}');
}

std::optional<nlohmann::json> extract_first_json_array(std::string_view text) {
  return extract_first(text, '[', ']');
}

}  // namespace cci
