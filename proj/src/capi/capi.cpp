#include "cci/cci.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/backend.hpp"
#include "core/cultures.hpp"
#include "core/datasets.hpp"
#include "core/errors.hpp"
#include "core/index.hpp"
#include "core/metrics.hpp"
#include "core/prompts.hpp"
#include "core/response_parse.hpp"
#include "core/score_cache.hpp"
#include "core/scorer.hpp"
#include "core/sha256.hpp"

using nlohmann::json;

/* ---- opaque handle definitions ---------------------------------------- */

struct cci_culture_set {
  cci::CultureSet set;
};

struct cci_result {
  cci::CciResult result;
  uint64_t backend_calls = 0;
  uint64_t cache_hits = 0;
  std::vector<std::string> warnings;
};

struct cci_templates {
  cci::PromptTemplates templates;
};

struct cci_backend {
  std::unique_ptr<cci::Backend> backend;
};

struct cci_cache {
  cci::ScoreCache cache;
};

struct cci_baseline_result {
  cci::BaselineOutcome outcome;
};

struct cci_report {
  bool separability = false;
  cci::SeparabilityReport sep;
  cci::StratificationTable strat;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cci_status status_from(const cci::Error& e) {
  return static_cast<cci_status>(static_cast<int>(e.code()));
}

// Runs `fn`, translating exceptions into status codes + the thread-local
// message. All exported functions funnel through here so no exception ever
// crosses the C boundary.
template <typename Fn>
cci_status guard(Fn&& fn) {
  try {
    fn();
    return CCI_OK;
  } catch (const cci::Error& e) {
    g_last_error = e.what();
    return status_from(e);
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CCI_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CCI_ERR_INTERNAL;
  }
}

cci_status invalid(const char* message) {
  g_last_error = message;
  return CCI_ERR_INVALID_ARGUMENT;
}

json parse_json_arg(const char* text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    cci::raise(cci::ErrorCode::invalid_argument, std::string(what) + " is not valid JSON");
  return j;
}

json warnings_to_json(const std::vector<std::string>& warnings) {
  json arr = json::array();
  for (const auto& w : warnings) arr.push_back(w);
  return arr;
}

cci::ScoreRecord record_from_json(const json& j) {
  cci::ScoreRecord r;
  r.key = j.at("key").get<std::string>();
  r.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
  r.model_id = j.at("model_id").get<std::string>();
  r.run_index = j.at("run_index").get<int>();
  r.temperature = j.at("temperature").get<double>();
  r.response_text = j.at("response_text").get<std::string>();
  r.parsed_ok = j.value("parsed_ok", true);
  r.created_at = j.value("created_at", std::string{});
  if (auto it = j.find("backend_metadata"); it != j.end() && it->is_object())
    for (const auto& [k, v] : it->items())
      r.backend_metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return r;
}

json record_to_json(const cci::ScoreRecord& r) {
  json meta = json::object();
  for (const auto& [k, v] : r.backend_metadata) meta[k] = v;
  return json{{"key", r.key},
              {"prompt_sha256", r.prompt_sha256},
              {"model_id", r.model_id},
              {"run_index", r.run_index},
              {"temperature", r.temperature},
              {"response_text", r.response_text},
              {"parsed_ok", r.parsed_ok},
              {"created_at", r.created_at},
              {"backend_metadata", std::move(meta)}};
}

json sentence_to_json(const cci::LabeledSentence& s) {
  return json{{"id", s.id}, {"text", s.text}, {"label", s.label}};
}

}  // namespace

/* ---- status / strings --------------------------------------------------- */

extern "C" {

const char* cci_status_name(cci_status status) {
  if (status == CCI_OK) return "Ok";
  if (status == CCI_ERR_INTERNAL) return "Internal";
  return cci::error_code_name(static_cast<cci::ErrorCode>(static_cast<int>(status)));
}

const char* cci_last_error_message(void) { return g_last_error.c_str(); }

const char* cci_version(void) { return CCI_VERSION_STRING; }

void cci_string_free(char* s) { std::free(s); }

/* ---- culture sets -------------------------------------------------------- */

cci_status cci_culture_set_create(const char* const* names, size_t n_names,
                                  const char* target, cci_culture_set** out) {
  if (!names || !target || !out) return invalid("names, target and out must be non-null");
  return guard([&] {
    std::vector<std::string> cultures;
    cultures.reserve(n_names);
    for (size_t i = 0; i < n_names; ++i) {
      if (!names[i]) cci::raise(cci::ErrorCode::invalid_argument, "null culture name");
      cultures.emplace_back(names[i]);
    }
    auto set = cci::validate_culture_set(std::move(cultures), target);
    *out = new cci_culture_set{std::move(set)};
  });
}

void cci_culture_set_free(cci_culture_set* set) { delete set; }

size_t cci_culture_set_size(const cci_culture_set* set) {
  return set ? set->set.size() : 0;
}

const char* cci_culture_set_name(const cci_culture_set* set, size_t index) {
  if (!set || index >= set->set.size()) return nullptr;
  return set->set.cultures()[index].c_str();
}

const char* cci_culture_set_target(const cci_culture_set* set) {
  return set ? set->set.target().c_str() : nullptr;
}

/* ---- index computation ---------------------------------------------------- */

cci_status cci_compute(const cci_culture_set* set, const double* values,
                       size_t n_values, int n_runs, cci_result** out) {
  if (!set || !values || !out) return invalid("set, values and out must be non-null");
  return guard([&] {
    if (n_values != set->set.size())
      cci::raise(cci::ErrorCode::culture_mismatch,
                 "value count does not match culture set size");
    cci::GeneralityVector vec{set->set,
                              std::vector<double>(values, values + n_values),
                              cci::VectorKind::aggregated};
    auto result = cci::compute_cci(vec, set->set, n_runs);
    result.cci_log = cci::compute_cci_log(vec, set->set);
    *out = new cci_result{std::move(result), 0, 0, {}};
  });
}

cci_status cci_compute_log(const cci_culture_set* set, const double* values,
                           size_t n_values, double* out) {
  if (!set || !values || !out) return invalid("set, values and out must be non-null");
  return guard([&] {
    if (n_values != set->set.size())
      cci::raise(cci::ErrorCode::culture_mismatch,
                 "value count does not match culture set size");
    cci::GeneralityVector vec{set->set,
                              std::vector<double>(values, values + n_values),
                              cci::VectorKind::aggregated};
    *out = cci::compute_cci_log(vec, set->set);
  });
}

cci_status cci_aggregate_runs(const cci_culture_set* set, const double* runs,
                              size_t n_runs, size_t n_cultures,
                              double* aggregated_out) {
  if (!set || !runs || !aggregated_out)
    return invalid("set, runs and aggregated_out must be non-null");
  return guard([&] {
    if (n_cultures != set->set.size())
      cci::raise(cci::ErrorCode::culture_mismatch,
                 "n_cultures does not match culture set size");
    std::vector<cci::GeneralityVector> vecs;
    vecs.reserve(n_runs);
    for (size_t r = 0; r < n_runs; ++r)
      vecs.push_back(cci::GeneralityVector{
          set->set,
          std::vector<double>(runs + r * n_cultures, runs + (r + 1) * n_cultures),
          cci::VectorKind::single_run});
    auto aggregated = cci::aggregate_runs(vecs, set->set);
    for (size_t i = 0; i < n_cultures; ++i) aggregated_out[i] = aggregated.values[i];
  });
}

double cci_result_cci(const cci_result* r) { return r ? r->result.cci : 0.0; }

int cci_result_has_log(const cci_result* r) {
  return r && r->result.cci_log.has_value() ? 1 : 0;
}

double cci_result_cci_log(const cci_result* r) {
  return r && r->result.cci_log ? *r->result.cci_log : 0.0;
}

const char* cci_result_target(const cci_result* r) {
  return r ? r->result.target.c_str() : nullptr;
}

int cci_result_n_runs(const cci_result* r) { return r ? r->result.n_runs : 0; }

size_t cci_result_n_cultures(const cci_result* r) {
  return r ? r->result.breakdown.values.size() : 0;
}

const char* cci_result_culture_name(const cci_result* r, size_t index) {
  if (!r || index >= r->result.breakdown.cultures.size()) return nullptr;
  return r->result.breakdown.cultures.cultures()[index].c_str();
}

double cci_result_culture_value(const cci_result* r, size_t index) {
  if (!r || index >= r->result.breakdown.values.size()) return 0.0;
  return r->result.breakdown.values[index];
}

uint64_t cci_result_backend_calls(const cci_result* r) {
  return r ? r->backend_calls : 0;
}

uint64_t cci_result_cache_hits(const cci_result* r) { return r ? r->cache_hits : 0; }

size_t cci_result_warning_count(const cci_result* r) {
  return r ? r->warnings.size() : 0;
}

const char* cci_result_warning(const cci_result* r, size_t index) {
  if (!r || index >= r->warnings.size()) return nullptr;
  return r->warnings[index].c_str();
}

void cci_result_free(cci_result* r) { delete r; }

/* ---- templates ------------------------------------------------------------ */

cci_status cci_templates_default(cci_templates** out) {
  if (!out) return invalid("out must be non-null");
  return guard([&] { *out = new cci_templates{cci::PromptTemplates()}; });
}

cci_status cci_templates_load(const char* dir, cci_templates** out) {
  if (!dir || !out) return invalid("dir and out must be non-null");
  return guard([&] { *out = new cci_templates{cci::PromptTemplates::load(dir)}; });
}

void cci_templates_free(cci_templates* templates) { delete templates; }

cci_status cci_render_generality(const cci_templates* templates,
                                 const char* sentence,
                                 const cci_culture_set* set, char** out) {
  if (!templates || !sentence || !set || !out)
    return invalid("templates, sentence, set and out must be non-null");
  return guard([&] {
    *out = dup_string(templates->templates.render_generality(sentence, set->set));
  });
}

cci_status cci_render_baseline(const cci_templates* templates,
                               const char* sentence, const char* target,
                               int neighbor_instruction, char** out) {
  if (!templates || !sentence || !target || !out)
    return invalid("templates, sentence, target and out must be non-null");
  return guard([&] {
    *out = dup_string(templates->templates.render_baseline(sentence, target,
                                                           neighbor_instruction != 0));
  });
}

cci_status cci_render_generation(const cci_templates* templates, int kind,
                                 char** out) {
  if (!templates || !out) return invalid("templates and out must be non-null");
  if (kind != CCI_GENERATE_GENERAL && kind != CCI_GENERATE_CULTURAL)
    return invalid("kind must be CCI_GENERATE_GENERAL or CCI_GENERATE_CULTURAL");
  return guard([&] {
    auto k = kind == CCI_GENERATE_CULTURAL ? cci::GenerationKind::cultural
                                           : cci::GenerationKind::general;
    *out = dup_string(templates->templates.render_generation(k));
  });
}

/* ---- response parsing ------------------------------------------------------ */

cci_status cci_parse_generality(const char* response_text,
                                const cci_culture_set* set,
                                char** scores_json_out,
                                char** warnings_json_out) {
  if (!response_text || !set) return invalid("response_text and set must be non-null");
  return guard([&] {
    std::vector<std::string> warnings;
    auto vec = cci::parse_generality_response(response_text, set->set, &warnings);
    if (scores_json_out) {
      json scores = json::object();
      for (size_t i = 0; i < vec.values.size(); ++i)
        scores[vec.cultures.cultures()[i]] = vec.values[i];
      *scores_json_out = dup_string(scores.dump());
    }
    if (warnings_json_out)
      *warnings_json_out = dup_string(warnings_to_json(warnings).dump());
  });
}

cci_status cci_parse_baseline(const char* response_text, double* score_out,
                              char** warnings_json_out) {
  if (!response_text || !score_out)
    return invalid("response_text and score_out must be non-null");
  return guard([&] {
    std::vector<std::string> warnings;
    *score_out = cci::parse_baseline_response(response_text, &warnings);
    if (warnings_json_out)
      *warnings_json_out = dup_string(warnings_to_json(warnings).dump());
  });
}

/* ---- backends --------------------------------------------------------------- */

cci_status cci_backend_create(const char* config_json, cci_backend** out) {
  if (!config_json || !out) return invalid("config_json and out must be non-null");
  return guard([&] {
    auto config = cci::BackendConfig::from_json(parse_json_arg(config_json, "config_json"));
    *out = new cci_backend{cci::make_backend(config)};
  });
}

void cci_backend_free(cci_backend* backend) { delete backend; }

uint64_t cci_backend_call_count(const cci_backend* backend) {
  return backend ? backend->backend->call_count() : 0;
}

cci_status cci_backend_complete(cci_backend* backend, const char* prompt,
                                int run_index, char** response_out) {
  if (!backend || !prompt || !response_out)
    return invalid("backend, prompt and response_out must be non-null");
  return guard([&] {
    *response_out = dup_string(backend->backend->complete(prompt, run_index).text);
  });
}

/* ---- score cache -------------------------------------------------------------- */

cci_status cci_cache_open(const char* directory, int read_only, cci_cache** out) {
  if (!directory || !out) return invalid("directory and out must be non-null");
  return guard([&] {
    *out = new cci_cache{cci::ScoreCache::open(directory, read_only != 0)};
  });
}

void cci_cache_close(cci_cache* cache) { delete cache; }

char* cci_cache_key(const char* prompt_text, const char* model_id,
                    int run_index, double temperature) {
  if (!prompt_text || !model_id) return nullptr;
  try {
    return dup_string(cci::cache_key({prompt_text, model_id, run_index, temperature}));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

cci_status cci_cache_get(const cci_cache* cache, const char* key,
                         char** record_json_out) {
  if (!cache || !key || !record_json_out)
    return invalid("cache, key and record_json_out must be non-null");
  return guard([&] {
    auto record = cache->cache.get(key);
    *record_json_out = record ? dup_string(record_to_json(*record).dump()) : nullptr;
  });
}

cci_status cci_cache_put(cci_cache* cache, const char* record_json) {
  if (!cache || !record_json) return invalid("cache and record_json must be non-null");
  return guard([&] {
    json j = parse_json_arg(record_json, "record_json");
    cci::ScoreRecord record;
    try {
      record = record_from_json(j);
    } catch (const json::exception& e) {
      cci::raise(cci::ErrorCode::invalid_argument,
                 std::string("record_json missing required field: ") + e.what());
    }
    cache->cache.put(record);
  });
}

char* cci_cache_stats_json(const cci_cache* cache) {
  if (!cache) return nullptr;
  auto stats = cache->cache.stats();
  json j{{"records", stats.records},
         {"corrupted_records", stats.corrupted_records},
         {"damaged_lines", stats.damaged_lines},
         {"read_only", stats.read_only}};
  return dup_string(j.dump());
}

/* ---- scoring pipeline ------------------------------------------------------------ */

cci_status cci_score_sentence(cci_backend* backend,
                              const cci_templates* templates, cci_cache* cache,
                              const char* sentence, const cci_culture_set* set,
                              int n_runs, cci_result** out) {
  if (!backend || !templates || !sentence || !set || !out)
    return invalid("backend, templates, sentence, set and out must be non-null");
  return guard([&] {
    auto outcome = cci::score_sentence(sentence, set->set, *backend->backend,
                                       templates->templates, n_runs,
                                       cache ? &cache->cache : nullptr);
    *out = new cci_result{std::move(outcome.result), outcome.backend_calls,
                          static_cast<uint64_t>(outcome.cache_hits),
                          std::move(outcome.warnings)};
  });
}

cci_status cci_score_baseline(cci_backend* backend,
                              const cci_templates* templates, cci_cache* cache,
                              const char* sentence, const char* target,
                              int neighbor_instruction,
                              cci_baseline_result** out) {
  if (!backend || !templates || !sentence || !target || !out)
    return invalid("backend, templates, sentence, target and out must be non-null");
  return guard([&] {
    auto outcome = cci::score_baseline(sentence, target, *backend->backend,
                                       templates->templates,
                                       neighbor_instruction != 0,
                                       cache ? &cache->cache : nullptr);
    *out = new cci_baseline_result{std::move(outcome)};
  });
}

double cci_baseline_result_score(const cci_baseline_result* r) {
  return r ? r->outcome.score : 0.0;
}

const char* cci_baseline_result_target(const cci_baseline_result* r) {
  return r ? r->outcome.target.c_str() : nullptr;
}

uint64_t cci_baseline_result_backend_calls(const cci_baseline_result* r) {
  return r ? r->outcome.backend_calls : 0;
}

uint64_t cci_baseline_result_cache_hits(const cci_baseline_result* r) {
  return r ? static_cast<uint64_t>(r->outcome.cache_hits) : 0;
}

size_t cci_baseline_result_warning_count(const cci_baseline_result* r) {
  return r ? r->outcome.warnings.size() : 0;
}

const char* cci_baseline_result_warning(const cci_baseline_result* r, size_t index) {
  if (!r || index >= r->outcome.warnings.size()) return nullptr;
  return r->outcome.warnings[index].c_str();
}

void cci_baseline_result_free(cci_baseline_result* r) { delete r; }

/* ---- evaluation --------------------------------------------------------------------- */

cci_status cci_evaluate_separability(const double* positives, size_t n_positives,
                                     const double* negatives, size_t n_negatives,
                                     cci_report** out) {
  if (!positives || !negatives || !out)
    return invalid("positives, negatives and out must be non-null");
  return guard([&] {
    auto report = cci::evaluate_separability(
        std::span<const double>(positives, n_positives),
        std::span<const double>(negatives, n_negatives));
    *out = new cci_report{true, std::move(report), {}};
  });
}

cci_status cci_stratify(const char* scored_items_json,
                        const char* predictions_json, double bin_width,
                        double lower_catchall, cci_report** out) {
  if (!scored_items_json || !predictions_json || !out)
    return invalid("scored_items_json, predictions_json and out must be non-null");
  return guard([&] {
    json items_j = parse_json_arg(scored_items_json, "scored_items_json");
    json preds_j = parse_json_arg(predictions_json, "predictions_json");
    if (!items_j.is_array())
      cci::raise(cci::ErrorCode::invalid_argument, "scored_items_json must be an array");
    if (!preds_j.is_object())
      cci::raise(cci::ErrorCode::invalid_argument, "predictions_json must be an object");

    std::vector<cci::ScoredItem> items;
    for (const auto& it : items_j) {
      cci::ScoredItem item;
      item.item_id = it.at("item_id").get<std::string>();
      item.score = it.at("score").get<double>();
      items.push_back(std::move(item));
    }
    std::map<std::string, std::map<std::string, bool>> predictions;
    for (const auto& [item_id, by_model] : preds_j.items()) {
      if (!by_model.is_object())
        cci::raise(cci::ErrorCode::invalid_argument,
                   "predictions for " + item_id + " must be an object");
      for (const auto& [model, flag] : by_model.items()) {
        if (!flag.is_boolean())
          cci::raise(cci::ErrorCode::invalid_argument,
                     "prediction flags must be booleans");
        predictions[item_id][model] = flag.get<bool>();
      }
    }

    auto bins = cci::bin_by_cci(items, bin_width, lower_catchall);
    auto table = cci::stratified_accuracy(items, bins, predictions);
    *out = new cci_report{false, {}, std::move(table)};
  });
}

char* cci_report_json(const cci_report* report) {
  if (!report) return nullptr;
  return dup_string(report->separability
                        ? cci::separability_to_json(report->sep).dump()
                        : cci::stratification_to_json(report->strat).dump());
}

char* cci_report_text(const cci_report* report) {
  if (!report) return nullptr;
  return dup_string(report->separability ? cci::separability_to_text(report->sep)
                                         : cci::stratification_to_text(report->strat));
}

char* cci_report_roc_csv(const cci_report* report) {
  if (!report || !report->separability) return nullptr;
  return dup_string(cci::roc_points_to_csv(report->sep.roc_points));
}

void cci_report_free(cci_report* report) { delete report; }

/* ---- datasets ---------------------------------------------------------------------------- */

cci_status cci_load_labeled_sentences(const char* path, char** json_out,
                                      char** warnings_json_out) {
  if (!path || !json_out) return invalid("path and json_out must be non-null");
  return guard([&] {
    std::vector<std::string> warnings;
    auto sentences = cci::load_labeled_sentences(path, &warnings);
    json arr = json::array();
    for (const auto& s : sentences) arr.push_back(sentence_to_json(s));
    *json_out = dup_string(arr.dump());
    if (warnings_json_out)
      *warnings_json_out = dup_string(warnings_to_json(warnings).dump());
  });
}

cci_status cci_load_mcq_items(const char* path, const char* field_map_json,
                              char** json_out, char** warnings_json_out) {
  if (!path || !json_out) return invalid("path and json_out must be non-null");
  return guard([&] {
    cci::McqFieldMap fields;
    if (field_map_json) {
      json fm = parse_json_arg(field_map_json, "field_map_json");
      fields.id = fm.value("id", fields.id);
      fields.question = fm.value("question", fields.question);
      fields.choices = fm.value("choices", fields.choices);
      fields.gold_index = fm.value("gold_index", fields.gold_index);
    }
    std::vector<std::string> warnings;
    auto items = cci::load_mcq_items(path, fields, &warnings);
    json arr = json::array();
    for (const auto& item : items)
      arr.push_back(json{{"id", item.id},
                         {"question", item.question},
                         {"choices", item.choices},
                         {"gold_index", item.gold_index}});
    *json_out = dup_string(arr.dump());
    if (warnings_json_out)
      *warnings_json_out = dup_string(warnings_to_json(warnings).dump());
  });
}

cci_status cci_load_moral_items(const char* path, const char* field_map_json,
                                char** json_out, char** warnings_json_out) {
  if (!path || !json_out) return invalid("path and json_out must be non-null");
  return guard([&] {
    cci::MoralFieldMap fields;
    if (field_map_json) {
      json fm = parse_json_arg(field_map_json, "field_map_json");
      fields.id = fm.value("id", fields.id);
      fields.sentence = fm.value("sentence", fields.sentence);
      fields.gold_label = fm.value("gold_label", fields.gold_label);
    }
    std::vector<std::string> warnings;
    auto items = cci::load_moral_items(path, fields, &warnings);
    json arr = json::array();
    for (const auto& item : items)
      arr.push_back(json{{"id", item.id},
                         {"sentence", item.sentence},
                         {"gold_label", item.gold_label}});
    *json_out = dup_string(arr.dump());
    if (warnings_json_out)
      *warnings_json_out = dup_string(warnings_to_json(warnings).dump());
  });
}

cci_status cci_mcq_input(const char* item_json, char** out) {
  if (!item_json || !out) return invalid("item_json and out must be non-null");
  return guard([&] {
    json j = parse_json_arg(item_json, "item_json");
    cci::McqItem item;
    try {
      item.id = j.value("id", std::string{});
      item.question = j.at("question").get<std::string>();
      item.choices = j.at("choices").get<std::vector<std::string>>();
      item.gold_index = j.at("gold_index").get<int>();
    } catch (const json::exception& e) {
      cci::raise(cci::ErrorCode::invalid_argument,
                 std::string("bad mcq item: ") + e.what());
    }
    if (item.gold_index < 0 || item.gold_index >= static_cast<int>(item.choices.size()))
      cci::raise(cci::ErrorCode::invalid_argument, "gold_index out of range");
    *out = dup_string(cci::build_jcqa_input(item));
  });
}

cci_status cci_moral_input(const char* item_json, const char* label_map_json,
                           char** out) {
  if (!item_json || !out) return invalid("item_json and out must be non-null");
  return guard([&] {
    json j = parse_json_arg(item_json, "item_json");
    cci::MoralItem item;
    try {
      item.id = j.value("id", std::string{});
      item.sentence = j.at("sentence").get<std::string>();
      item.gold_label = j.at("gold_label").get<std::string>();
    } catch (const json::exception& e) {
      cci::raise(cci::ErrorCode::invalid_argument,
                 std::string("bad moral item: ") + e.what());
    }
    auto label_map = cci::default_moral_label_map();
    if (label_map_json) {
      json lm = parse_json_arg(label_map_json, "label_map_json");
      label_map.clear();
      for (const auto& [k, v] : lm.items()) {
        if (!v.is_string())
          cci::raise(cci::ErrorCode::config_error, "label map values must be strings");
        label_map[k] = v.get<std::string>();
      }
    }
    *out = dup_string(cci::build_jcm_input(item, label_map));
  });
}

cci_status cci_generate_corpus(cci_backend* backend,
                               const cci_templates* templates, int kind,
                               int requested_count, char** json_out) {
  if (!backend || !templates || !json_out)
    return invalid("backend, templates and json_out must be non-null");
  if (kind != CCI_GENERATE_GENERAL && kind != CCI_GENERATE_CULTURAL)
    return invalid("kind must be CCI_GENERATE_GENERAL or CCI_GENERATE_CULTURAL");
  return guard([&] {
    auto k = kind == CCI_GENERATE_CULTURAL ? cci::GenerationKind::cultural
                                           : cci::GenerationKind::general;
    auto corpus = cci::generate_corpus(k, *backend->backend, templates->templates,
                                       requested_count);
    json sentences = json::array();
    for (const auto& s : corpus.sentences) sentences.push_back(sentence_to_json(s));
    json j{{"provenance", corpus.provenance},
           {"sentences", std::move(sentences)},
           {"warnings", warnings_to_json(corpus.warnings)}};
    *json_out = dup_string(j.dump());
  });
}

/* ---- misc ----------------------------------------------------------------------------------- */

char* cci_sha256_hex(const char* data, size_t len) {
  if (!data) return nullptr;
  return dup_string(cci::sha256_hex(std::string_view(data, len)));
}

}  // extern "C"
