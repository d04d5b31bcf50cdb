#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

namespace cci {

enum class BackendKind { http_chat, scripted };

struct BackendConfig {
  BackendKind kind = BackendKind::scripted;
  std::string model_id;
  std::string endpoint;        // http-chat: base URL or full /chat/completions URL
  std::string api_key_env = "CCI_API_KEY";
  std::string fixture_path;    // scripted: JSONL of {prompt_sha256, run_index, response_text}
  double temperature = 0.7;
  int max_retries = 3;
  int max_tokens = 1024;       // sized for 19-culture score maps
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds initial_backoff{250};
  double requests_per_second = 0.0;  // 0 disables throttling

  // Validates the per-kind requirements (endpoint+model for http-chat,
  // fixture for scripted). Throws ConfigError.
  static BackendConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RawResponse {
  std::string text;
  std::map<std::string, std::string> metadata;
};

// A scoring backend. complete() retries transient failures with exponential
// backoff; complete_once() performs exactly one attempt so callers that
// manage their own retry budget (the scoring pipeline) can keep the total
// number of backend calls bounded.
class Backend {
 public:
  explicit Backend(BackendConfig config) : config_(std::move(config)) {}
  virtual ~Backend() = default;

  RawResponse complete(const std::string& prompt, int run_index);
  RawResponse complete_once(const std::string& prompt, int run_index);

  std::uint64_t call_count() const noexcept {
    return calls_.load(std::memory_order_relaxed);
  }
  const BackendConfig& config() const noexcept { return config_; }

  void sleep_backoff(int attempt) const;

 protected:
  virtual RawResponse do_complete(const std::string& prompt, int run_index) = 0;

 private:
  void throttle();

  BackendConfig config_;
  std::atomic<std::uint64_t> calls_{0};
  std::mutex throttle_mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
};

// Deterministic fixture-driven backend: the response is a pure function of
// (prompt hash, run index).
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(BackendConfig config);

 protected:
  RawResponse do_complete(const std::string& prompt, int run_index) override;

 private:
  std::map<std::string, std::string> responses_;  // "<sha256>#<run>" -> text
};

// Chat-completion client for OpenAI-compatible inference servers. One
// user-role message carries the prompt.
class HttpChatBackend : public Backend {
 public:
  explicit HttpChatBackend(BackendConfig config);

 protected:
  RawResponse do_complete(const std::string& prompt, int run_index) override;

 private:
  std::string base_url_;
  std::string path_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

}  // namespace cci
