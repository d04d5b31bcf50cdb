#pragma once

#include <stdexcept>
#include <string>

namespace cci {

// Error taxonomy shared across the library. The values map 1:1 onto the C
// API's status codes, so keep this enum and include/cci/cci.h in sync.
enum class ErrorCode {
  invalid_argument = 1,
  config_error = 2,
  io_error = 3,

  // culture sets and core math
  target_not_in_set = 10,
  duplicate_culture = 11,
  too_few_cultures = 12,
  degenerate_culture_set = 13,
  empty_run_list = 14,
  culture_mismatch = 15,
  out_of_range_score = 16,

  // prompt rendering
  empty_sentence = 20,

  // response parsing
  no_json_found = 30,
  schema_mismatch = 31,
  missing_culture = 32,

  // backends
  network_error = 40,
  timeout = 41,
  auth_error = 42,
  backend_refusal = 43,

  // score cache
  store_corrupted = 50,
  conflicting_record = 51,
  store_unwritable = 52,

  // metrics and datasets
  empty_class = 60,
  missing_prediction = 61,
  malformed_line = 62,
  unknown_label = 63,
  missing_label = 64,
  join_mismatch = 65,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

// Transient transport failures and malformed model output are worth another
// completion attempt; everything else is not.
bool is_retryable(ErrorCode code);

}  // namespace cci
