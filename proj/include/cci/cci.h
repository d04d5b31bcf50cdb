/* Conceptual Cultural Index — C API.
 *
 * Sentence-level cultural-specificity scoring: per-culture generality
 * elicitation from an LLM backend, aggregation over independent runs, the
 * CCI and log-weighted CCI indices, ROC/AUC separability reports and
 * CCI-binned accuracy stratification, backed by a durable response cache.
 *
 * Conventions:
 *   - Every fallible call returns a cci_status; CCI_OK is 0. On failure the
 *     thread-local message from cci_last_error_message() describes the cause.
 *   - `char*` outputs are heap strings owned by the caller; release them with
 *     cci_string_free(). `const char*` returns are borrowed from the handle
 *     and live until it is freed.
 *   - Structured inputs/outputs use JSON strings; schemas are documented per
 *     function and in docs/file_formats.md.
 */
#ifndef CCI_CCI_H
#define CCI_CCI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ---- status codes ---------------------------------------------------- */

typedef enum cci_status {
  CCI_OK = 0,
  CCI_ERR_INVALID_ARGUMENT = 1,
  CCI_ERR_CONFIG = 2,
  CCI_ERR_IO = 3,

  CCI_ERR_TARGET_NOT_IN_SET = 10,
  CCI_ERR_DUPLICATE_CULTURE = 11,
  CCI_ERR_TOO_FEW_CULTURES = 12,
  CCI_ERR_DEGENERATE_CULTURE_SET = 13,
  CCI_ERR_EMPTY_RUN_LIST = 14,
  CCI_ERR_CULTURE_MISMATCH = 15,
  CCI_ERR_OUT_OF_RANGE_SCORE = 16,

  CCI_ERR_EMPTY_SENTENCE = 20,

  CCI_ERR_NO_JSON_FOUND = 30,
  CCI_ERR_SCHEMA_MISMATCH = 31,
  CCI_ERR_MISSING_CULTURE = 32,

  CCI_ERR_NETWORK = 40,
  CCI_ERR_TIMEOUT = 41,
  CCI_ERR_AUTH = 42,
  CCI_ERR_BACKEND_REFUSAL = 43,

  CCI_ERR_STORE_CORRUPTED = 50,
  CCI_ERR_CONFLICTING_RECORD = 51,
  CCI_ERR_STORE_UNWRITABLE = 52,

  CCI_ERR_EMPTY_CLASS = 60,
  CCI_ERR_MISSING_PREDICTION = 61,
  CCI_ERR_MALFORMED_LINE = 62,
  CCI_ERR_UNKNOWN_LABEL = 63,
  CCI_ERR_MISSING_LABEL = 64,
  CCI_ERR_JOIN_MISMATCH = 65,

  CCI_ERR_INTERNAL = 99
} cci_status;

/* Stable PascalCase name for a status ("TargetNotInSet", ...). */
const char* cci_status_name(cci_status status);

/* Thread-local message describing the most recent failure on this thread. */
const char* cci_last_error_message(void);

const char* cci_version(void);

void cci_string_free(char* s);

/* ---- culture sets ----------------------------------------------------- */

typedef struct cci_culture_set cci_culture_set;

/* Validated comparison set: >= 2 distinct names, target among them. */
cci_status cci_culture_set_create(const char* const* names, size_t n_names,
                                  const char* target, cci_culture_set** out);
void cci_culture_set_free(cci_culture_set* set);

size_t cci_culture_set_size(const cci_culture_set* set);
const char* cci_culture_set_name(const cci_culture_set* set, size_t index);
const char* cci_culture_set_target(const cci_culture_set* set);

/* ---- index computation ------------------------------------------------ */

typedef struct cci_result cci_result;

/* CCI of an aggregated generality vector (values in culture-set order, each
 * in [0,1]). Computes both the plain and the log-weighted variant. */
cci_status cci_compute(const cci_culture_set* set, const double* values,
                       size_t n_values, int n_runs, cci_result** out);

/* Log-weighted variant alone. */
cci_status cci_compute_log(const cci_culture_set* set, const double* values,
                           size_t n_values, double* out);

/* Element-wise mean of n_runs single-run vectors (row-major
 * runs[run][culture]); aggregated_out must hold n_cultures doubles. */
cci_status cci_aggregate_runs(const cci_culture_set* set, const double* runs,
                              size_t n_runs, size_t n_cultures,
                              double* aggregated_out);

double cci_result_cci(const cci_result* r);
int cci_result_has_log(const cci_result* r);
double cci_result_cci_log(const cci_result* r);
const char* cci_result_target(const cci_result* r);
int cci_result_n_runs(const cci_result* r);
size_t cci_result_n_cultures(const cci_result* r);
const char* cci_result_culture_name(const cci_result* r, size_t index);
double cci_result_culture_value(const cci_result* r, size_t index);
uint64_t cci_result_backend_calls(const cci_result* r);
uint64_t cci_result_cache_hits(const cci_result* r);
size_t cci_result_warning_count(const cci_result* r);
const char* cci_result_warning(const cci_result* r, size_t index);
void cci_result_free(cci_result* r);

/* ---- prompt templates -------------------------------------------------- */

typedef struct cci_templates cci_templates;

enum { CCI_GENERATE_GENERAL = 0, CCI_GENERATE_CULTURAL = 1 };

cci_status cci_templates_default(cci_templates** out);
/* Missing files fall back to built-ins; nonexistent dir is a config error. */
cci_status cci_templates_load(const char* dir, cci_templates** out);
void cci_templates_free(cci_templates* templates);

cci_status cci_render_generality(const cci_templates* templates,
                                 const char* sentence,
                                 const cci_culture_set* set, char** out);
cci_status cci_render_baseline(const cci_templates* templates,
                               const char* sentence, const char* target,
                               int neighbor_instruction, char** out);
cci_status cci_render_generation(const cci_templates* templates, int kind,
                                 char** out);

/* ---- response parsing -------------------------------------------------- */

/* Parses a per-culture scores response. On success *scores_json_out is a
 * {"culture": value} object in culture-set order and *warnings_json_out a
 * JSON array of strings (either may be NULL if not wanted). */
cci_status cci_parse_generality(const char* response_text,
                                const cci_culture_set* set,
                                char** scores_json_out,
                                char** warnings_json_out);
cci_status cci_parse_baseline(const char* response_text, double* score_out,
                              char** warnings_json_out);

/* ---- backends ---------------------------------------------------------- */

typedef struct cci_backend cci_backend;

/* config_json schema:
 *   {"backend": "scripted"|"http-chat", "model_id": "...",
 *    "endpoint": "https://...",        (http-chat)
 *    "fixture": "path.jsonl",          (scripted)
 *    "api_key_env": "CCI_API_KEY", "temperature": 0.7, "max_retries": 3,
 *    "max_tokens": 1024, "timeout_ms": 30000, "backoff_ms": 250,
 *    "requests_per_second": 0}
 */
cci_status cci_backend_create(const char* config_json, cci_backend** out);
void cci_backend_free(cci_backend* backend);

/* Total completions issued through this backend (includes failed attempts). */
uint64_t cci_backend_call_count(const cci_backend* backend);

/* One completion with the backend's own transient-failure retry loop. */
cci_status cci_backend_complete(cci_backend* backend, const char* prompt,
                                int run_index, char** response_out);

/* ---- score cache ------------------------------------------------------- */

typedef struct cci_cache cci_cache;

cci_status cci_cache_open(const char* directory, int read_only, cci_cache** out);
void cci_cache_close(cci_cache* cache);

/* sha256 over (prompt_text, model_id, run_index, temperature). */
char* cci_cache_key(const char* prompt_text, const char* model_id,
                    int run_index, double temperature);

/* CCI_OK with *record_json_out = NULL when the key was never written. */
cci_status cci_cache_get(const cci_cache* cache, const char* key,
                         char** record_json_out);
/* record_json requires key/prompt_sha256/model_id/run_index/temperature/
 * response_text; parsed_ok defaults to true, created_at to now. */
cci_status cci_cache_put(cci_cache* cache, const char* record_json);

/* {"records": n, "corrupted_records": n, "damaged_lines": [...],
 *  "read_only": bool} */
char* cci_cache_stats_json(const cci_cache* cache);

/* ---- scoring pipeline --------------------------------------------------- */

/* Full protocol: n_runs elicitations (cache-first), aggregation, both index
 * variants. cache may be NULL to disable caching. */
cci_status cci_score_sentence(cci_backend* backend,
                              const cci_templates* templates, cci_cache* cache,
                              const char* sentence, const cci_culture_set* set,
                              int n_runs, cci_result** out);

typedef struct cci_baseline_result cci_baseline_result;

/* Direct single-prompt specificity scoring of the target culture. */
cci_status cci_score_baseline(cci_backend* backend,
                              const cci_templates* templates, cci_cache* cache,
                              const char* sentence, const char* target,
                              int neighbor_instruction,
                              cci_baseline_result** out);

double cci_baseline_result_score(const cci_baseline_result* r);
const char* cci_baseline_result_target(const cci_baseline_result* r);
uint64_t cci_baseline_result_backend_calls(const cci_baseline_result* r);
uint64_t cci_baseline_result_cache_hits(const cci_baseline_result* r);
size_t cci_baseline_result_warning_count(const cci_baseline_result* r);
const char* cci_baseline_result_warning(const cci_baseline_result* r, size_t index);
void cci_baseline_result_free(cci_baseline_result* r);

/* ---- evaluation -------------------------------------------------------- */

typedef struct cci_report cci_report;

/* ROC/AUC + class medians over positive/negative score lists. */
cci_status cci_evaluate_separability(const double* positives, size_t n_positives,
                                     const double* negatives, size_t n_negatives,
                                     cci_report** out);

/* scored_items_json: [{"item_id": "...", "score": x}, ...]
 * predictions_json:  {"item_id": {"model_id": true|false, ...}, ...}
 * Bins scores (catch-all first bin, then half-open width-sized bins) and
 * computes per-bin and overall accuracy per model. */
cci_status cci_stratify(const char* scored_items_json,
                        const char* predictions_json, double bin_width,
                        double lower_catchall, cci_report** out);

char* cci_report_json(const cci_report* report);
char* cci_report_text(const cci_report* report);
/* ROC points as "fpr,tpr" CSV; NULL for stratification reports. */
char* cci_report_roc_csv(const cci_report* report);
void cci_report_free(cci_report* report);

/* ---- datasets ---------------------------------------------------------- */

/* Loads {id?, text, label} JSON-lines. *json_out is an array of records,
 * *warnings_json_out an array of strings (may be NULL if not wanted). */
cci_status cci_load_labeled_sentences(const char* path, char** json_out,
                                      char** warnings_json_out);

/* field_map_json (optional, NULL for defaults):
 *   {"id": "id", "question": "question", "choices": "choices",
 *    "gold_index": "gold_index"} */
cci_status cci_load_mcq_items(const char* path, const char* field_map_json,
                              char** json_out, char** warnings_json_out);

/* field_map_json defaults: {"id","sentence","gold_label"} */
cci_status cci_load_moral_items(const char* path, const char* field_map_json,
                                char** json_out, char** warnings_json_out);

/* item_json is one record as returned by the loaders. */
cci_status cci_mcq_input(const char* item_json, char** out);
/* label_map_json: {"acceptable": "(judgment: acceptable)", ...}; NULL for
 * the default map. */
cci_status cci_moral_input(const char* item_json, const char* label_map_json,
                           char** out);

/* One backend completion driving the corpus-generation prompt; returns
 * {"provenance": {...}, "sentences": [{id,text,label}...],
 *  "warnings": [...]}. kind is CCI_GENERATE_*. */
cci_status cci_generate_corpus(cci_backend* backend,
                               const cci_templates* templates, int kind,
                               int requested_count, char** json_out);

/* ---- misc --------------------------------------------------------------- */

/* Lowercase hex SHA-256; the hash used for prompt fixtures and cache keys. */
char* cci_sha256_hex(const char* data, size_t len);

#ifdef __cplusplus
}
#endif

#endif /* CCI_CCI_H */
