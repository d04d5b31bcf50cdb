#include <doctest.h>

#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "core/errors.hpp"
#include "core/score_cache.hpp"
#include "support.hpp"

using cci::cache_key;
using cci::CacheKeyParts;
using cci::Error;
using cci::ErrorCode;
using cci::ScoreCache;
using cci::ScoreRecord;
using testutil::append_file;
using testutil::read_file;
using testutil::split_lines;
using testutil::TempDir;
using testutil::write_file;

namespace {

ScoreRecord sample_record(const std::string& prompt, int run,
                          const std::string& response) {
  CacheKeyParts parts{prompt, "model-x", run, 0.7};
  ScoreRecord r;
  r.key = cache_key(parts);
  r.prompt_sha256 = "unused-by-lookup";
  r.model_id = parts.model_id;
  r.run_index = run;
  r.temperature = parts.temperature;
  r.response_text = response;
  r.parsed_ok = true;
  r.backend_metadata = {{"backend", "scripted"}};
  return r;
}

}  // namespace

TEST_CASE("cache keys are deterministic and sensitive to every part") {
  CacheKeyParts base{"prompt", "model", 1, 0.7};
  CHECK(cache_key(base) == cache_key(base));
  CHECK(cache_key(base).size() == 64);

  auto changed = base;
  changed.prompt_text = "prompt!";
  CHECK(cache_key(changed) != cache_key(base));
  changed = base;
  changed.model_id = "model2";
  CHECK(cache_key(changed) != cache_key(base));
  changed = base;
  changed.run_index = 2;
  CHECK(cache_key(changed) != cache_key(base));
  changed = base;
  changed.temperature = 0.70000001;
  CHECK(cache_key(changed) != cache_key(base));
}

TEST_CASE("field concatenation cannot collide across boundaries") {
  // "ab" + "c" vs "a" + "bc" in adjacent fields
  CacheKeyParts a{"ab", "c", 1, 0.0};
  CacheKeyParts b{"a", "bc", 1, 0.0};
  CHECK(cache_key(a) != cache_key(b));
}

TEST_CASE("read-your-write round trip") {
  TempDir dir;
  auto cache = ScoreCache::open(dir.file("cache"));
  auto r = sample_record("p1", 1, "{\"score\": 0.5}");
  CHECK_FALSE(cache.get(r.key).has_value());
  cache.put(r);
  auto got = cache.get(r.key);
  REQUIRE(got.has_value());
  CHECK(got->response_text == r.response_text);
  CHECK(got->model_id == "model-x");
  CHECK(got->run_index == 1);
  CHECK(got->temperature == 0.7);
  CHECK(got->parsed_ok);
  CHECK_FALSE(got->created_at.empty());  // stamped by put
  CHECK(got->backend_metadata.at("backend") == "scripted");
}

TEST_CASE("records survive close and reopen") {
  TempDir dir;
  std::string key;
  std::string created_at;
  {
    auto cache = ScoreCache::open(dir.file("cache"));
    auto r = sample_record("p1", 1, "first");
    cache.put(r);
    cache.put(sample_record("p2", 1, "second"));
    key = r.key;
    created_at = cache.get(key)->created_at;
  }
  auto reopened = ScoreCache::open(dir.file("cache"));
  auto got = reopened.get(key);
  REQUIRE(got.has_value());
  CHECK(got->response_text == "first");
  CHECK(got->created_at == created_at);
  CHECK(reopened.stats().records == 2);
}

TEST_CASE("identical re-puts are idempotent on disk") {
  TempDir dir;
  auto cache = ScoreCache::open(dir.file("cache"));
  auto r = sample_record("p1", 1, "same");
  cache.put(r);
  cache.put(r);
  cache.put(r);
  CHECK(cache.stats().records == 1);
  const auto store = dir.file("cache") / "cache.jsonl";
  CHECK(split_lines(read_file(store)).size() == 1);
}

TEST_CASE("a different response under an existing key is a conflict") {
  TempDir dir;
  auto cache = ScoreCache::open(dir.file("cache"));
  cache.put(sample_record("p1", 1, "original"));
  auto conflicting = sample_record("p1", 1, "revised");
  try {
    cache.put(conflicting);
    FAIL("expected ConflictingRecord");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::conflicting_record);
  }
  // The original is untouched.
  CHECK(cache.get(conflicting.key)->response_text == "original");
}

TEST_CASE("a torn final line is reported damaged but does not block other records") {
  TempDir dir;
  std::string key;
  {
    auto cache = ScoreCache::open(dir.file("cache"));
    auto r = sample_record("p1", 1, "intact");
    cache.put(r);
    key = r.key;
  }
  append_file(dir.file("cache") / "cache.jsonl", "{\"key\": \"trunc");  // torn write
  auto cache = ScoreCache::open(dir.file("cache"));
  auto stats = cache.stats();
  CHECK(stats.records == 1);
  REQUIRE(stats.damaged_lines.size() == 1);
  CHECK(stats.damaged_lines[0] == 2);
  CHECK(cache.get(key)->response_text == "intact");
}

TEST_CASE("checksum corruption is detected per record and repairable") {
  TempDir dir;
  auto r1 = sample_record("p1", 1, "alpha");
  auto r2 = sample_record("p2", 1, "beta");
  {
    auto cache = ScoreCache::open(dir.file("cache"));
    cache.put(r1);
    cache.put(r2);
  }
  const auto store = dir.file("cache") / "cache.jsonl";
  auto lines = split_lines(read_file(store));
  REQUIRE(lines.size() == 2);
  // Flip r1's payload without updating its checksum.
  auto pos = lines[0].find("alpha");
  REQUIRE(pos != std::string::npos);
  lines[0].replace(pos, 5, "aXpha");
  write_file(store, lines[0] + "\n" + lines[1] + "\n");

  auto cache = ScoreCache::open(dir.file("cache"));
  CHECK(cache.stats().corrupted_records == 1);
  try {
    cache.get(r1.key);
    FAIL("expected StoreCorrupted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::store_corrupted);
  }
  // The sibling record is unaffected.
  CHECK(cache.get(r2.key)->response_text == "beta");

  // Re-putting the true response repairs the key; later lines win on reload.
  cache.put(r1);
  CHECK(cache.get(r1.key)->response_text == "alpha");
  CHECK(cache.stats().corrupted_records == 0);
  auto reopened_after_close = [&] {
    auto again = ScoreCache::open(dir.file("cache"), true);
    CHECK(again.get(r1.key)->response_text == "alpha");
    CHECK(again.stats().corrupted_records == 0);
  };
  // (read-only open works alongside the writer's flock)
  reopened_after_close();
}

TEST_CASE("read-only mode rejects writes and missing directories") {
  TempDir dir;
  {
    auto cache = ScoreCache::open(dir.file("cache"));
    cache.put(sample_record("p1", 1, "x"));
  }
  auto ro = ScoreCache::open(dir.file("cache"), true);
  CHECK(ro.read_only());
  CHECK(ro.stats().read_only);
  try {
    ro.put(sample_record("p9", 1, "y"));
    FAIL("expected StoreUnwritable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::store_unwritable);
  }
  try {
    ScoreCache::open(dir.file("never-created"), true);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }
}

TEST_CASE("the lock file grants one writer at a time") {
  TempDir dir;
  auto first = ScoreCache::open(dir.file("cache"));
  try {
    auto second = ScoreCache::open(dir.file("cache"));
    FAIL("expected StoreUnwritable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::store_unwritable);
  }
  // Readers are always admitted.
  auto reader = ScoreCache::open(dir.file("cache"), true);
  CHECK(reader.stats().records == 0);
}

TEST_CASE("the writer lock is released on destruction") {
  TempDir dir;
  { auto first = ScoreCache::open(dir.file("cache")); }
  auto second = ScoreCache::open(dir.file("cache"));
  second.put(sample_record("p1", 1, "x"));
  CHECK(second.stats().records == 1);
}

TEST_CASE("concurrent puts through one handle are serialized") {
  TempDir dir;
  auto cache = ScoreCache::open(dir.file("cache"));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&cache, t] {
      for (int i = 0; i < 25; ++i) {
        cache.put(sample_record("p" + std::to_string(t) + "_" + std::to_string(i), 1,
                                "resp"));
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(cache.stats().records == 200);
  auto probe = sample_record("p3_11", 1, "resp");
  CHECK(cache.get(probe.key)->response_text == "resp");
}

TEST_CASE("an empty store directory is valid") {
  TempDir dir;
  auto cache = ScoreCache::open(dir.file("cache"));
  auto stats = cache.stats();
  CHECK(stats.records == 0);
  CHECK(stats.corrupted_records == 0);
  CHECK(stats.damaged_lines.empty());
}
