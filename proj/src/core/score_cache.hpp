#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace cci {

struct CacheKeyParts {
  std::string prompt_text;
  std::string model_id;
  int run_index = 1;
  double temperature = 0.0;
};

// Content address of one elicitation attempt: sha256 over the full prompt
// text (so template changes invalidate the cache), model id, run index and
// temperature.
std::string cache_key(const CacheKeyParts& parts);

struct ScoreRecord {
  std::string key;
  std::string prompt_sha256;
  std::string model_id;
  int run_index = 1;
  double temperature = 0.0;
  std::string response_text;
  bool parsed_ok = true;
  std::string created_at;  // ISO 8601 UTC, filled by put() when empty
  std::map<std::string, std::string> backend_metadata;
};

// Append-only JSONL store (<dir>/cache.jsonl) with a per-record checksum and
// a flock-guarded <dir>/cache.lock for cross-process write exclusion.
// Single-writer, multi-reader within one process; all methods are
// mutex-serialized.
class ScoreCache {
 public:
  static ScoreCache open(const std::filesystem::path& dir, bool read_only = false);
  ~ScoreCache();

  ScoreCache(ScoreCache&& other) noexcept;
  ScoreCache& operator=(ScoreCache&&) = delete;
  ScoreCache(const ScoreCache&) = delete;

  // Returns the stored record, or nullopt if the key was never written.
  // Throws StoreCorrupted if the record's line failed its checksum.
  std::optional<ScoreRecord> get(const std::string& key) const;

  // Durable before return (flush + fsync). Idempotent for identical
  // (key, response_text); a different response under an existing key is a
  // ConflictingRecord.
  void put(const ScoreRecord& record);

  struct Stats {
    std::size_t records = 0;
    std::size_t corrupted_records = 0;      // parseable lines failing checksum
    std::vector<std::size_t> damaged_lines; // unparseable line numbers
    bool read_only = false;
  };
  Stats stats() const;

  const std::filesystem::path& directory() const noexcept { return dir_; }
  bool read_only() const noexcept { return read_only_; }
  std::filesystem::path store_path() const { return dir_ / "cache.jsonl"; }

 private:
  ScoreCache() = default;
  void load();

  std::filesystem::path dir_;
  bool read_only_ = false;
  int lock_fd_ = -1;
  int append_fd_ = -1;

  struct Entry {
    ScoreRecord record;
    bool corrupted = false;
  };
  std::unordered_map<std::string, Entry> index_;
  std::vector<std::size_t> damaged_lines_;
  std::size_t corrupted_records_ = 0;
  mutable std::mutex mutex_;
};

}  // namespace cci
