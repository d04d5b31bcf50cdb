#include "core/cultures.hpp"

#include <set>

#include "core/errors.hpp"

namespace cci {

std::optional<std::size_t> CultureSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < cultures_.size(); ++i) {
    if (cultures_[i] == name) return i;
  }
  return std::nullopt;
}

CultureSet validate_culture_set(std::vector<std::string> cultures,
                                std::string target) {
  if (cultures.size() < 2) {
    raise(ErrorCode::too_few_cultures,
          "culture set needs at least 2 entries, got " +
              std::to_string(cultures.size()));
  }
  std::set<std::string_view> seen;
  for (const auto& name : cultures) {
    if (!seen.insert(name).second) {
      raise(ErrorCode::duplicate_culture, "duplicate culture name: " + name);
    }
  }
  CultureSet set;
  set.cultures_ = std::move(cultures);
  set.target_ = std::move(target);
  auto idx = set.index_of(set.target_);
  if (!idx) {
    raise(ErrorCode::target_not_in_set,
          "target culture not in set: " + set.target_);
  }
  set.target_index_ = *idx;
  return set;
}

}  // namespace cci
