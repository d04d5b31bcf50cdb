#include "core/scorer.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <utility>

#include "core/errors.hpp"
#include "core/response_parse.hpp"
#include "core/sha256.hpp"

namespace cci {
namespace {

struct ElicitStats {
  std::uint64_t backend_calls = 0;
  int cache_hits = 0;
};

// Returns the response text for (prompt, run_index), consulting the cache
// first and persisting any response that parses. `try_parse` must throw a
// typed Error on bad responses; retryable ones consume the shared per-run
// budget of 1 + max_retries completions.
std::string elicit_response(Backend& backend, ScoreCache* cache,
                            const std::string& prompt, int run_index,
                            const std::function<void(const std::string&)>& try_parse,
                            ElicitStats& stats, std::vector<std::string>& warnings) {
  const BackendConfig& cfg = backend.config();
  const std::string key =
      cache_key({prompt, cfg.model_id, run_index, cfg.temperature});

  if (cache) {
    if (auto hit = cache->get(key)) {
      ++stats.cache_hits;
      return hit->response_text;
    }
  }

  const int budget = 1 + std::max(0, cfg.max_retries);
  for (int attempt = 1;; ++attempt) {
    if (attempt > 1) backend.sleep_backoff(attempt - 1);

    RawResponse raw;
    try {
      ++stats.backend_calls;
      raw = backend.complete_once(prompt, run_index);
    } catch (const Error& e) {
      if (is_retryable(e.code()) && attempt < budget) {
        warnings.push_back("run " + std::to_string(run_index) + " attempt " +
                           std::to_string(attempt) + " failed (" +
                           error_code_name(e.code()) + "), retrying");
        continue;
      }
      throw;
    }

    try {
      try_parse(raw.text);
    } catch (const Error& e) {
      if (is_retryable(e.code()) && attempt < budget) {
        warnings.push_back("run " + std::to_string(run_index) + " attempt " +
                           std::to_string(attempt) + " returned an unusable response (" +
                           error_code_name(e.code()) + "), retrying");
        continue;
      }
      throw;
    }

    if (cache && !cache->read_only()) {
      ScoreRecord record;
      record.key = key;
      record.prompt_sha256 = sha256_hex(prompt);
      record.model_id = cfg.model_id;
      record.run_index = run_index;
      record.temperature = cfg.temperature;
      record.response_text = raw.text;
      record.parsed_ok = true;
      record.backend_metadata = raw.metadata;
      try {
        cache->put(record);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::conflicting_record) throw;
        // Another worker scored the same prompt concurrently; the first
        // write wins so every consumer sees one canonical response.
        if (auto stored = cache->get(key)) return stored->response_text;
        throw;
      }
    }
    return raw.text;
  }
}

}  // namespace

ScoreOutcome score_sentence(const std::string& sentence, const CultureSet& cultures,
                            Backend& backend, const PromptTemplates& templates,
                            int n_runs, ScoreCache* cache) {
  if (n_runs < 1) raise(ErrorCode::invalid_argument, "n_runs must be >= 1");

  ScoreOutcome out;
  ElicitStats stats;
  const std::string prompt = templates.render_generality(sentence, cultures);

  std::vector<GeneralityVector> runs;
  runs.reserve(static_cast<std::size_t>(n_runs));
  for (int run = 1; run <= n_runs; ++run) {
    // Parse twice at most: once as the retry-gate validation, once on the
    // final text (which may come from the cache rather than this attempt).
    auto validate = [&](const std::string& text) {
      std::vector<std::string> scratch;
      parse_generality_response(text, cultures, &scratch);
    };
    const std::string text = elicit_response(backend, cache, prompt, run,
                                             validate, stats, out.warnings);
    runs.push_back(parse_generality_response(text, cultures, &out.warnings));
  }

  GeneralityVector aggregated = aggregate_runs(runs, cultures);
  out.result = compute_cci(aggregated, cultures, n_runs);
  out.result.cci_log = compute_cci_log(aggregated, cultures);
  out.backend_calls = stats.backend_calls;
  out.cache_hits = stats.cache_hits;
  return out;
}

BaselineOutcome score_baseline(const std::string& sentence, const std::string& target,
                               Backend& backend, const PromptTemplates& templates,
                               bool neighbor_instruction, ScoreCache* cache) {
  BaselineOutcome out;
  out.target = target;
  ElicitStats stats;
  const std::string prompt =
      templates.render_baseline(sentence, target, neighbor_instruction);

  auto validate = [&](const std::string& text) {
    std::vector<std::string> scratch;
    parse_baseline_response(text, &scratch);
  };
  const std::string text =
      elicit_response(backend, cache, prompt, 1, validate, stats, out.warnings);
  out.score = parse_baseline_response(text, &out.warnings);
  out.backend_calls = stats.backend_calls;
  out.cache_hits = stats.cache_hits;
  return out;
}

}  // namespace cci
