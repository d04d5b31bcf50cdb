#include "core/prompts.hpp"

#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace cci {

const char* const kNeighborInstruction =
    "If the practice is also common in neighboring or culturally adjacent "
    "countries, do not consider it specific to the target.";

namespace {

const char* const kGeneralityTemplate =
    R"(Task:
Rate how COMMON/FAMILIAR the following item is in each country (0.00 = not common, 1.00 = very common). Treat countries independently. Be language-agnostic: interpret the statement regardless of its language.

Statement: {sentence}
Countries: {cultures}

Rules:
- Use general knowledge; avoid stereotypes.
- If similarly common across many countries, use similar (even identical) scores.
- If unsure, use mid values (e.g., 0.50).
- Do NOT normalize across countries.

Output JSON ONLY (no prose):
Schema: {"scores": {"<country>": <float>}}
Constraints: use the country names exactly as provided; floats in [0.00, 1.00], rounded to two decimals.
)";

const char* const kBaselineTemplate =
    R"(Task:
Decide whether the following item is culturally specific to the TARGET country, and output a numeric specificity score only
(0.00 = globally common; 1.00 = unique to the target).

Statement: {sentence}
Target country: {target_culture}

Rules:
- Use general knowledge; avoid stereotypes.
- Be language-agnostic; interpret the statement regardless of its language.
- If unsure, use mid values (e.g., 0.50).
{neighbor_rule}

Output JSON ONLY (no prose):
{"score": <float in [0.00,1.00] rounded to two decimals>}
)";

const char* const kGenerateGeneralTemplate =
    R"(You are an assistant for creating a short-sentence corpus.
Strictly satisfy the requirements below.

Goal:
- Collect very ordinary events that could occur in any region of the world.

Output:
- Exactly one natural Japanese sentence, short in length (about 10-20 characters).
- Describe facts plainly without evaluations, impressions, or subjectivity.
- Avoid place names, specific store names, and personal names. Avoid excessive stereotypes.
- Vary expressions, vocabulary, and scenes so that the same sentence endings and the same constructions do not appear consecutively.

Strict requirements:
- The output must be a JSON array. Each element must have the form { "text": "<one sentence>" }.
- The number of items must be exactly 300.
- Do not include any additional explanations, labels, or numbering (do not output any strings other than JSON).

Example (format only):
[
  { "text": "Turn off the alarm in the morning." },
  { "text": "Wait for the train at the station." }
]
)";

const char* const kGenerateCulturalTemplate =
    R"(You are an assistant for creating a short-sentence corpus.
Strictly satisfy the requirements below.

Goal:
- Broadly collect, in short sentences, Japan-specific customs, daily life culture, annual events, food culture, public manners, etc.

Output:
- Exactly one natural Japanese sentence, short in length (about 10-20 characters).
- Describe events plainly without evaluations or impressions.
- Avoid place names, specific store names, and personal names. Avoid excessive stereotypes.
- Vary expressions, vocabulary, and scenes so that the same sentence endings and the same constructions do not appear consecutively.

Strict requirements:
- The output must be a JSON array. Each element must have the form { "text": "<one sentence>" }.
- The number of items must be exactly 300.
- Do not include any additional explanations, labels, or numbering (do not output any strings other than JSON).

Example (format only):
[
  { "text": "Take off your shoes at the entrance." },
  { "text": "Use the purification basin at a shrine." }
]
)";

void replace_all(std::string& text, std::string_view what, std::string_view with) {
  std::size_t pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
}

// The placeholder occupies a whole line; expanding it keeps the rule inside
// the Rules block, removing it leaves the surrounding text byte-identical to
// the plain template.
void render_neighbor_rule(std::string& text, bool enabled) {
  const std::string line_form = "{neighbor_rule}\n";
  if (enabled) {
    replace_all(text, line_form, std::string("- ") + kNeighborInstruction + "\n");
    replace_all(text, "{neighbor_rule}", std::string("- ") + kNeighborInstruction);
  } else {
    replace_all(text, line_form, "");
    replace_all(text, "{neighbor_rule}", "");
  }
}

std::string read_file_or(const std::filesystem::path& path,
                         const char* fallback) {
  if (!std::filesystem::exists(path)) return fallback;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCode::io_error, "cannot read template file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

PromptTemplates::PromptTemplates()
    : generality_(kGeneralityTemplate),
      baseline_(kBaselineTemplate),
      generate_general_(kGenerateGeneralTemplate),
      generate_cultural_(kGenerateCulturalTemplate) {}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    raise(ErrorCode::config_error,
          "templates directory does not exist: " + dir.string());
  }
  PromptTemplates t;
  t.generality_ = read_file_or(dir / "generality.txt", kGeneralityTemplate);
  t.baseline_ = read_file_or(dir / "baseline.txt", kBaselineTemplate);
  t.generate_general_ =
      read_file_or(dir / "generate_general.txt", kGenerateGeneralTemplate);
  t.generate_cultural_ =
      read_file_or(dir / "generate_cultural.txt", kGenerateCulturalTemplate);
  return t;
}

std::string format_culture_list(const CultureSet& set) {
  std::string out = "[";
  for (std::size_t i = 0; i < set.cultures().size(); ++i) {
    if (i > 0) out += ", ";
    out += '"';
    out += set.cultures()[i];
    out += '"';
  }
  out += "]";
  return out;
}

std::string PromptTemplates::render_generality(const std::string& sentence,
                                               const CultureSet& set) const {
  if (sentence.empty()) {
    raise(ErrorCode::empty_sentence, "generality prompt needs a sentence");
  }
  std::string text = generality_;
  replace_all(text, "{sentence}", sentence);
  replace_all(text, "{cultures}", format_culture_list(set));
  return text;
}

std::string PromptTemplates::render_baseline(const std::string& sentence,
                                             const std::string& target,
                                             bool neighbor_instruction) const {
  if (sentence.empty()) {
    raise(ErrorCode::empty_sentence, "baseline prompt needs a sentence");
  }
  std::string text = baseline_;
  render_neighbor_rule(text, neighbor_instruction);
  replace_all(text, "{sentence}", sentence);
  replace_all(text, "{target_culture}", target);
  return text;
}

std::string PromptTemplates::render_generation(GenerationKind kind) const {
  return kind == GenerationKind::general ? generate_general_
                                         : generate_cultural_;
}

}  // namespace cci
