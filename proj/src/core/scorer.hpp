#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/backend.hpp"
#include "core/cultures.hpp"
#include "core/index.hpp"
#include "core/prompts.hpp"
#include "core/score_cache.hpp"

namespace cci {

struct ScoreOutcome {
  CciResult result;
  std::uint64_t backend_calls = 0;  // completions issued for this sentence
  int cache_hits = 0;               // runs satisfied without a backend call
  std::vector<std::string> warnings;
};

// Scores one sentence: for each run index 1..n_runs obtains a single-run
// generality vector (cache-first, otherwise complete + parse + cache the
// parsed response), aggregates the runs and computes both index variants.
//
// Each run has a fresh budget of 1 + max_retries completions shared between
// transport failures and unparseable responses, so backend calls never
// exceed n_runs * (1 + max_retries).
ScoreOutcome score_sentence(const std::string& sentence, const CultureSet& cultures,
                            Backend& backend, const PromptTemplates& templates,
                            int n_runs, ScoreCache* cache);

struct BaselineOutcome {
  double score = 0.0;
  std::string target;
  std::uint64_t backend_calls = 0;
  int cache_hits = 0;
  std::vector<std::string> warnings;
};

// Direct specificity scoring: one elicitation (run index 1) asking the model
// to judge the target culture alone, optionally with the neighbor rule.
BaselineOutcome score_baseline(const std::string& sentence, const std::string& target,
                               Backend& backend, const PromptTemplates& templates,
                               bool neighbor_instruction, ScoreCache* cache);

}  // namespace cci
