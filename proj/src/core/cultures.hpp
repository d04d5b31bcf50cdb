#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cci {

// Ordered comparison scope C plus the designated target t. Culture names are
// compared byte-for-byte; no case folding or normalization.
class CultureSet {
 public:
  // Empty placeholder; real sets come from validate_culture_set.
  CultureSet() = default;

  const std::vector<std::string>& cultures() const noexcept { return cultures_; }
  const std::string& target() const noexcept { return target_; }
  std::size_t size() const noexcept { return cultures_.size(); }
  std::size_t target_index() const noexcept { return target_index_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  bool operator==(const CultureSet&) const = default;

 private:
  friend CultureSet validate_culture_set(std::vector<std::string> cultures,
                                         std::string target);

  std::vector<std::string> cultures_;
  std::string target_;
  std::size_t target_index_ = 0;
};

// Checks the invariants (target membership, unique names, |C| >= 2) and
// returns the validated set. Throws TargetNotInSet, DuplicateCulture or
// TooFewCultures.
CultureSet validate_culture_set(std::vector<std::string> cultures,
                                std::string target);

}  // namespace cci
