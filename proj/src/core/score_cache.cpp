#include "core/score_cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/sha256.hpp"

namespace cci {
namespace {

using nlohmann::json;

std::string format_temperature(double temperature) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, temperature);
  if (ec != std::errc{}) raise(ErrorCode::invalid_argument, "unrepresentable temperature");
  return std::string(buf, end);
}

std::string now_iso8601_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json record_to_json(const ScoreRecord& r) {
  json meta = json::object();
  for (const auto& [k, v] : r.backend_metadata) meta[k] = v;
  return json{
      {"key", r.key},
      {"prompt_sha256", r.prompt_sha256},
      {"model_id", r.model_id},
      {"run_index", r.run_index},
      {"temperature", r.temperature},
      {"response_text", r.response_text},
      {"parsed_ok", r.parsed_ok},
      {"created_at", r.created_at},
      {"backend_metadata", std::move(meta)},
  };
}

// Checksum covers the record serialized with sorted keys and the checksum
// field absent; nlohmann's object dump is already key-sorted.
std::string record_checksum(const json& without_checksum) {
  return sha256_hex(without_checksum.dump());
}

bool parse_record(const json& j, ScoreRecord& out) {
  try {
    out.key = j.at("key").get<std::string>();
    out.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
    out.model_id = j.at("model_id").get<std::string>();
    out.run_index = j.at("run_index").get<int>();
    out.temperature = j.at("temperature").get<double>();
    out.response_text = j.at("response_text").get<std::string>();
    out.parsed_ok = j.at("parsed_ok").get<bool>();
    out.created_at = j.value("created_at", std::string{});
    out.backend_metadata.clear();
    if (auto it = j.find("backend_metadata"); it != j.end() && it->is_object()) {
      for (const auto& [k, v] : it->items())
        out.backend_metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return true;
  } catch (const json::exception&) {
    return false;
  }
}

}  // namespace

std::string cache_key(const CacheKeyParts& parts) {
  // \x1f separators make the concatenation injective for sane field values.
  std::string material = parts.prompt_text;
  material += '\x1f';
  material += parts.model_id;
  material += '\x1f';
  material += std::to_string(parts.run_index);
  material += '\x1f';
  material += format_temperature(parts.temperature);
  return sha256_hex(material);
}

ScoreCache ScoreCache::open(const std::filesystem::path& dir, bool read_only) {
  ScoreCache cache;
  cache.dir_ = dir;
  cache.read_only_ = read_only;

  std::error_code ec;
  if (!read_only) {
    std::filesystem::create_directories(dir, ec);
    if (ec) raise(ErrorCode::store_unwritable, "cannot create cache directory " + dir.string() + ": " + ec.message());

    const auto lock_path = dir / "cache.lock";
    cache.lock_fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (cache.lock_fd_ < 0)
      raise(ErrorCode::store_unwritable, "cannot open " + lock_path.string() + ": " + std::strerror(errno));
    if (::flock(cache.lock_fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(cache.lock_fd_);
      cache.lock_fd_ = -1;
      raise(ErrorCode::store_unwritable, "cache at " + dir.string() + " is locked by another process");
    }

    cache.append_fd_ = ::open(cache.store_path().c_str(), O_CREAT | O_WRONLY | O_APPEND | O_CLOEXEC, 0644);
    if (cache.append_fd_ < 0)
      raise(ErrorCode::store_unwritable, "cannot open " + cache.store_path().string() + " for append: " + std::strerror(errno));
  } else if (!std::filesystem::exists(dir, ec)) {
    raise(ErrorCode::io_error, "cache directory does not exist: " + dir.string());
  }

  cache.load();
  return cache;
}

ScoreCache::~ScoreCache() {
  if (append_fd_ >= 0) ::close(append_fd_);
  if (lock_fd_ >= 0) ::close(lock_fd_);  // closing releases the flock
}

ScoreCache::ScoreCache(ScoreCache&& other) noexcept {
  std::lock_guard lock(other.mutex_);
  dir_ = std::move(other.dir_);
  read_only_ = other.read_only_;
  lock_fd_ = other.lock_fd_;
  append_fd_ = other.append_fd_;
  index_ = std::move(other.index_);
  damaged_lines_ = std::move(other.damaged_lines_);
  corrupted_records_ = other.corrupted_records_;
  other.lock_fd_ = -1;
  other.append_fd_ = -1;
}

void ScoreCache::load() {
  std::ifstream in(store_path());
  if (!in.is_open()) return;  // empty store

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      damaged_lines_.push_back(line_no);  // e.g. a torn final write
      continue;
    }
    std::string stored_checksum = j.value("checksum", std::string{});
    j.erase("checksum");
    ScoreRecord record;
    if (!parse_record(j, record)) {
      damaged_lines_.push_back(line_no);
      continue;
    }
    bool corrupted = stored_checksum.empty() || record_checksum(j) != stored_checksum;
    if (corrupted) ++corrupted_records_;
    // Later lines win: a valid re-put repairs a previously corrupted key.
    // (Key is read before the move: the RHS of = is sequenced first.)
    const std::string key = record.key;
    index_[key] = Entry{std::move(record), corrupted};
  }
}

std::optional<ScoreRecord> ScoreCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  if (it->second.corrupted)
    raise(ErrorCode::store_corrupted, "cache record " + key + " failed its checksum");
  return it->second.record;
}

void ScoreCache::put(const ScoreRecord& record) {
  if (record.key.empty()) raise(ErrorCode::invalid_argument, "cache record has empty key");
  std::lock_guard lock(mutex_);
  if (read_only_) raise(ErrorCode::store_unwritable, "cache opened read-only");

  if (auto it = index_.find(record.key); it != index_.end() && !it->second.corrupted) {
    if (it->second.record.response_text == record.response_text) return;  // idempotent
    raise(ErrorCode::conflicting_record,
          "cache key " + record.key + " already holds a different response");
  }

  ScoreRecord stored = record;
  if (stored.created_at.empty()) stored.created_at = now_iso8601_utc();
  json j = record_to_json(stored);
  j["checksum"] = record_checksum(j);
  std::string line = j.dump();
  line.push_back('\n');

  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::write(append_fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      raise(ErrorCode::store_unwritable, std::string("cache append failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(append_fd_) != 0)
    raise(ErrorCode::store_unwritable, std::string("cache fsync failed: ") + std::strerror(errno));

  const std::string key = stored.key;
  index_[key] = Entry{std::move(stored), false};
}

ScoreCache::Stats ScoreCache::stats() const {
  std::lock_guard lock(mutex_);
  Stats s;
  s.records = index_.size();
  s.corrupted_records = 0;
  for (const auto& [key, entry] : index_)
    if (entry.corrupted) ++s.corrupted_records;
  s.damaged_lines = damaged_lines_;
  s.read_only = read_only_;
  return s;
}

}  // namespace cci
