#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/backend.hpp"
#include "core/prompts.hpp"

namespace cci {

struct LabeledSentence {
  std::string id;
  std::string text;
  std::string label;  // "culture-specific" | "general"
};

inline constexpr const char* kLabelCultureSpecific = "culture-specific";
inline constexpr const char* kLabelGeneral = "general";

// JSON-lines of {id?, text, label}. Missing ids are assigned sequentially
// ("s1", "s2", ... by line position); duplicate texts are flagged as
// warnings. Throws MalformedLine (with line number) and UnknownLabel.
std::vector<LabeledSentence> load_labeled_sentences(const std::filesystem::path& path,
                                                    std::vector<std::string>* warnings);

struct McqItem {
  std::string id;
  std::string question;
  std::vector<std::string> choices;
  int gold_index = 0;
};

struct MoralItem {
  std::string id;
  std::string sentence;
  std::string gold_label;  // "acceptable" | "unacceptable"
};

// Field-name adapters: upstream benchmark schemas drift, so the mapping from
// our fields to theirs lives in config rather than code.
struct McqFieldMap {
  std::string id = "id";
  std::string question = "question";
  std::string choices = "choices";
  std::string gold_index = "gold_index";
};

struct MoralFieldMap {
  std::string id = "id";
  std::string sentence = "sentence";
  std::string gold_label = "gold_label";
};

std::vector<McqItem> load_mcq_items(const std::filesystem::path& path,
                                    const McqFieldMap& fields,
                                    std::vector<std::string>* warnings);

std::vector<MoralItem> load_moral_items(const std::filesystem::path& path,
                                        const MoralFieldMap& fields,
                                        std::vector<std::string>* warnings);

// Scoring input x for a multiple-choice item: question text, one space, the
// gold option text.
std::string build_jcqa_input(const McqItem& item);

// Scoring input x for a moral item: sentence, one space, then the rendered
// label phrase. The label → phrase map is configurable; defaults render
// "(judgment: acceptable)" / "(judgment: unacceptable)".
std::map<std::string, std::string> default_moral_label_map();
std::string build_jcm_input(const MoralItem& item,
                            const std::map<std::string, std::string>& label_map);

struct GeneratedCorpus {
  std::vector<LabeledSentence> sentences;
  nlohmann::json provenance;  // generator model, prompt hash, timestamp, review status
  std::vector<std::string> warnings;
};

// Renders the corpus-generation prompt for `kind`, completes it once and
// parses the JSON array of {"text": ...} objects. The prompt requests
// exactly 300 sentences; the actual parsed count is reported, with a
// ShortOutput warning when fewer arrive. Invalid records are dropped with a
// logged reason.
GeneratedCorpus generate_corpus(GenerationKind kind, Backend& backend,
                                const PromptTemplates& templates,
                                int requested_count = 300);

}  // namespace cci
