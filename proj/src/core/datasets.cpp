#include "core/datasets.hpp"

#include <ctime>
#include <fstream>
#include <set>
#include <utility>

#include "core/errors.hpp"
#include "core/json_extract.hpp"
#include "core/sha256.hpp"

namespace cci {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no,
                            const std::string& reason) {
  raise(ErrorCode::malformed_line,
        path.string() + ":" + std::to_string(line_no) + ": " + reason);
}

// Iterates non-empty JSONL records, skipping `_meta` provenance blocks.
// Callback receives (line number, record ordinal, parsed object).
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in.is_open())
    raise(ErrorCode::io_error, "cannot open dataset file: " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::size_t ordinal = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) malformed(path, line_no, "not valid JSON");
    if (!j.is_object()) malformed(path, line_no, "record is not a JSON object");
    if (j.contains("_meta")) continue;
    fn(line_no, ++ordinal, j);
  }
}

std::string string_field(const json& j, const std::string& field,
                         const std::filesystem::path& path, std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end()) malformed(path, line_no, "missing field \"" + field + "\"");
  if (!it->is_string()) malformed(path, line_no, "field \"" + field + "\" is not a string");
  return it->get<std::string>();
}

std::string optional_id(const json& j, const std::string& field, const char* prefix,
                        std::size_t ordinal) {
  if (auto it = j.find(field); it != j.end() && it->is_string() && !it->get<std::string>().empty())
    return it->get<std::string>();
  return prefix + std::to_string(ordinal);
}

std::string now_iso8601_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<LabeledSentence> load_labeled_sentences(const std::filesystem::path& path,
                                                    std::vector<std::string>* warnings) {
  std::vector<LabeledSentence> out;
  std::set<std::string> seen_texts;
  for_each_record(path, [&](std::size_t line_no, std::size_t ordinal, const json& j) {
    LabeledSentence s;
    s.id = optional_id(j, "id", "s", ordinal);
    s.text = string_field(j, "text", path, line_no);
    if (s.text.empty()) malformed(path, line_no, "empty text");
    s.label = string_field(j, "label", path, line_no);
    if (s.label != kLabelCultureSpecific && s.label != kLabelGeneral)
      raise(ErrorCode::unknown_label,
            path.string() + ":" + std::to_string(line_no) + ": unknown label \"" +
                s.label + "\" (expected \"culture-specific\" or \"general\")");
    if (!seen_texts.insert(s.text).second && warnings)
      warnings->push_back("duplicate text at " + path.string() + ":" +
                          std::to_string(line_no) + " (id " + s.id + ")");
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<McqItem> load_mcq_items(const std::filesystem::path& path,
                                    const McqFieldMap& fields,
                                    std::vector<std::string>* warnings) {
  (void)warnings;
  std::vector<McqItem> out;
  for_each_record(path, [&](std::size_t line_no, std::size_t ordinal, const json& j) {
    McqItem item;
    item.id = optional_id(j, fields.id, "q", ordinal);
    item.question = string_field(j, fields.question, path, line_no);

    auto it = j.find(fields.choices);
    if (it == j.end()) malformed(path, line_no, "missing field \"" + fields.choices + "\"");
    if (!it->is_array()) malformed(path, line_no, "field \"" + fields.choices + "\" is not an array");
    for (const auto& choice : *it) {
      if (!choice.is_string())
        malformed(path, line_no, "choice entries must be strings");
      item.choices.push_back(choice.get<std::string>());
    }
    if (item.choices.empty()) malformed(path, line_no, "empty choices array");

    auto gold = j.find(fields.gold_index);
    if (gold == j.end()) malformed(path, line_no, "missing field \"" + fields.gold_index + "\"");
    if (!gold->is_number_integer())
      malformed(path, line_no, "field \"" + fields.gold_index + "\" is not an integer");
    item.gold_index = gold->get<int>();
    if (item.gold_index < 0 || item.gold_index >= static_cast<int>(item.choices.size()))
      malformed(path, line_no, "gold_index " + std::to_string(item.gold_index) +
                                   " out of range for " + std::to_string(item.choices.size()) +
                                   " choices");
    out.push_back(std::move(item));
  });
  return out;
}

std::vector<MoralItem> load_moral_items(const std::filesystem::path& path,
                                        const MoralFieldMap& fields,
                                        std::vector<std::string>* warnings) {
  (void)warnings;
  std::vector<MoralItem> out;
  for_each_record(path, [&](std::size_t line_no, std::size_t ordinal, const json& j) {
    MoralItem item;
    item.id = optional_id(j, fields.id, "m", ordinal);
    item.sentence = string_field(j, fields.sentence, path, line_no);
    if (item.sentence.empty()) malformed(path, line_no, "empty sentence");
    item.gold_label = string_field(j, fields.gold_label, path, line_no);
    if (item.gold_label != "acceptable" && item.gold_label != "unacceptable")
      raise(ErrorCode::unknown_label,
            path.string() + ":" + std::to_string(line_no) + ": unknown moral label \"" +
                item.gold_label + "\"");
    out.push_back(std::move(item));
  });
  return out;
}

std::string build_jcqa_input(const McqItem& item) {
  return item.question + " " + item.choices.at(static_cast<std::size_t>(item.gold_index));
}

std::map<std::string, std::string> default_moral_label_map() {
  return {{"acceptable", "(judgment: acceptable)"},
          {"unacceptable", "(judgment: unacceptable)"}};
}

std::string build_jcm_input(const MoralItem& item,
                            const std::map<std::string, std::string>& label_map) {
  auto it = label_map.find(item.gold_label);
  if (it == label_map.end() || it->second.empty())
    raise(ErrorCode::config_error,
          "label map has no phrase for \"" + item.gold_label + "\"");
  return item.sentence + " " + it->second;
}

GeneratedCorpus generate_corpus(GenerationKind kind, Backend& backend,
                                const PromptTemplates& templates,
                                int requested_count) {
  GeneratedCorpus corpus;
  const std::string prompt = templates.render_generation(kind);
  const RawResponse raw = backend.complete(prompt, 1);

  auto array = extract_first_json_array(raw.text);
  if (!array)
    raise(ErrorCode::no_json_found, "no JSON array in corpus-generation response");

  const char* label = kind == GenerationKind::cultural ? kLabelCultureSpecific : kLabelGeneral;
  const char* prefix = kind == GenerationKind::cultural ? "c" : "g";
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < array->size(); ++i) {
    const json& element = (*array)[i];
    std::string text;
    if (element.is_object() && element.contains("text") && element["text"].is_string())
      text = element["text"].get<std::string>();
    else if (element.is_string())
      text = element.get<std::string>();
    if (text.empty()) {
      ++dropped;
      corpus.warnings.push_back("dropped element " + std::to_string(i + 1) +
                                ": no usable \"text\" field");
      continue;
    }
    LabeledSentence s;
    s.id = prefix + std::to_string(corpus.sentences.size() + 1);
    s.text = std::move(text);
    s.label = label;
    corpus.sentences.push_back(std::move(s));
  }

  if (static_cast<int>(corpus.sentences.size()) < requested_count)
    corpus.warnings.push_back(
        "ShortOutput: requested " + std::to_string(requested_count) + " sentences, parsed " +
        std::to_string(corpus.sentences.size()) +
        (dropped ? " (" + std::to_string(dropped) + " dropped)" : ""));

  corpus.provenance = {
      {"generator_model", backend.config().model_id},
      {"prompt_sha256", sha256_hex(prompt)},
      {"created_at", now_iso8601_utc()},
      {"kind", kind == GenerationKind::cultural ? "cultural" : "general"},
      {"requested", requested_count},
      {"produced", corpus.sentences.size()},
      {"review_status", "unreviewed"},
  };
  return corpus;
}

}  // namespace cci
