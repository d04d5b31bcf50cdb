#include "core/errors.hpp"

namespace cci {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::target_not_in_set: return "TargetNotInSet";
    case ErrorCode::duplicate_culture: return "DuplicateCulture";
    case ErrorCode::too_few_cultures: return "TooFewCultures";
    case ErrorCode::degenerate_culture_set: return "DegenerateCultureSet";
    case ErrorCode::empty_run_list: return "EmptyRunList";
    case ErrorCode::culture_mismatch: return "CultureMismatch";
    case ErrorCode::out_of_range_score: return "OutOfRangeScore";
    case ErrorCode::empty_sentence: return "EmptySentence";
    case ErrorCode::no_json_found: return "NoJsonFound";
    case ErrorCode::schema_mismatch: return "SchemaMismatch";
    case ErrorCode::missing_culture: return "MissingCulture";
    case ErrorCode::network_error: return "NetworkError";
    case ErrorCode::timeout: return "Timeout";
    case ErrorCode::auth_error: return "AuthError";
    case ErrorCode::backend_refusal: return "BackendRefusal";
    case ErrorCode::store_corrupted: return "StoreCorrupted";
    case ErrorCode::conflicting_record: return "ConflictingRecord";
    case ErrorCode::store_unwritable: return "StoreUnwritable";
    case ErrorCode::empty_class: return "EmptyClass";
    case ErrorCode::missing_prediction: return "MissingPrediction";
    case ErrorCode::malformed_line: return "MalformedLine";
    case ErrorCode::unknown_label: return "UnknownLabel";
    case ErrorCode::missing_label: return "MissingLabel";
    case ErrorCode::join_mismatch: return "JoinMismatch";
  }
  return "Unknown";
}

bool is_retryable(ErrorCode code) {
  switch (code) {
    case ErrorCode::network_error:
    case ErrorCode::timeout:
    case ErrorCode::no_json_found:
    case ErrorCode::schema_mismatch:
    case ErrorCode::missing_culture:
    case ErrorCode::out_of_range_score:
      return true;
    default:
      return false;
  }
}

}  // namespace cci
