#pragma once

#include <filesystem>
#include <string>

#include "core/cultures.hpp"

namespace cci {

enum class GenerationKind { general, cultural };

// The four prompt templates. Built-in defaults are the exact elicitation,
// direct-scoring and corpus-generation texts the scoring protocol is defined
// against; a templates directory can override any of them per file
// (generality.txt, baseline.txt, generate_general.txt, generate_cultural.txt).
//
// Placeholders: {sentence}, {cultures}, {target_culture}, and for the baseline
// template an optional {neighbor_rule} line that is removed or expanded
// depending on the neighbor-instruction flag.
class PromptTemplates {
 public:
  PromptTemplates();  // built-in defaults

  // Missing files fall back to the built-in text; a nonexistent directory is
  // a ConfigError.
  static PromptTemplates load(const std::filesystem::path& dir);

  // All cultures are queried within a single prompt; the culture list is
  // rendered as an ordered, quoted, bracketed list.
  std::string render_generality(const std::string& sentence,
                                const CultureSet& set) const;

  std::string render_baseline(const std::string& sentence,
                              const std::string& target,
                              bool neighbor_instruction) const;

  std::string render_generation(GenerationKind kind) const;

 private:
  std::string generality_;
  std::string baseline_;
  std::string generate_general_;
  std::string generate_cultural_;
};

// ["China", "Republic of Korea", ...] in culture-set order.
std::string format_culture_list(const CultureSet& set);

// The verbatim scope-narrowing instruction appended to the baseline rules
// under the +Neighbor condition.
extern const char* const kNeighborInstruction;

}  // namespace cci
