#include "core/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "core/errors.hpp"
#include "core/sha256.hpp"

namespace cci {

namespace {

std::chrono::milliseconds get_ms(const nlohmann::json& j, const char* key,
                                 std::chrono::milliseconds fallback) {
  if (!j.contains(key)) return fallback;
  return std::chrono::milliseconds(j.at(key).get<std::int64_t>());
}

}  // namespace

BackendConfig BackendConfig::from_json(const nlohmann::json& j) {
  BackendConfig c;
  const std::string kind = j.value("backend", "scripted");
  if (kind == "http-chat") {
    c.kind = BackendKind::http_chat;
  } else if (kind == "scripted") {
    c.kind = BackendKind::scripted;
  } else {
    raise(ErrorCode::config_error, "unknown backend kind: " + kind);
  }
  c.model_id = j.value("model_id", "");
  c.endpoint = j.value("endpoint", "");
  c.api_key_env = j.value("api_key_env", "CCI_API_KEY");
  c.fixture_path = j.value("fixture", "");
  c.temperature = j.value("temperature", 0.7);
  c.max_retries = j.value("max_retries", 3);
  c.max_tokens = j.value("max_tokens", 1024);
  c.timeout = get_ms(j, "timeout_ms", c.timeout);
  c.initial_backoff = get_ms(j, "backoff_ms", c.initial_backoff);
  c.requests_per_second = j.value("requests_per_second", 0.0);

  if (c.temperature < 0.0) {
    raise(ErrorCode::config_error, "temperature must be non-negative");
  }
  if (c.max_retries < 0) {
    raise(ErrorCode::config_error, "max_retries must be non-negative");
  }
  if (c.kind == BackendKind::http_chat && (c.endpoint.empty() || c.model_id.empty())) {
    raise(ErrorCode::config_error, "http-chat backend requires endpoint and model_id");
  }
  if (c.kind == BackendKind::scripted && c.fixture_path.empty()) {
    raise(ErrorCode::config_error, "scripted backend requires a fixture path");
  }
  return c;
}

nlohmann::json BackendConfig::to_json() const {
  return {
      {"backend", kind == BackendKind::http_chat ? "http-chat" : "scripted"},
      {"model_id", model_id},
      {"endpoint", endpoint},
      {"api_key_env", api_key_env},
      {"fixture", fixture_path},
      {"temperature", temperature},
      {"max_retries", max_retries},
      {"max_tokens", max_tokens},
      {"timeout_ms", timeout.count()},
      {"backoff_ms", initial_backoff.count()},
      {"requests_per_second", requests_per_second},
  };
}

void Backend::throttle() {
  if (config_.requests_per_second <= 0.0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / config_.requests_per_second));
  std::chrono::steady_clock::time_point my_slot;
  {
    std::lock_guard lock(throttle_mutex_);
    const auto now = std::chrono::steady_clock::now();
    if (next_slot_ < now) next_slot_ = now;
    my_slot = next_slot_;
    next_slot_ += interval;
  }
  std::this_thread::sleep_until(my_slot);
}

void Backend::sleep_backoff(int attempt) const {
  if (config_.initial_backoff.count() <= 0) return;
  auto delay = config_.initial_backoff * (1LL << std::min(attempt, 16));
  std::this_thread::sleep_for(delay);
}

RawResponse Backend::complete_once(const std::string& prompt, int run_index) {
  throttle();
  calls_.fetch_add(1, std::memory_order_relaxed);
  return do_complete(prompt, run_index);
}

RawResponse Backend::complete(const std::string& prompt, int run_index) {
  const int attempts = 1 + std::max(0, config_.max_retries);
  for (int attempt = 0;; ++attempt) {
    try {
      return complete_once(prompt, run_index);
    } catch (const Error& e) {
      if (!is_retryable(e.code()) || attempt + 1 >= attempts) throw;
      sleep_backoff(attempt);
    }
  }
}

ScriptedBackend::ScriptedBackend(BackendConfig config)
    : Backend(std::move(config)) {
  const auto& path = this->config().fixture_path;
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::config_error, "cannot open fixture file: " + path);
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("prompt_sha256") ||
        !j.contains("run_index") || !j.contains("response_text")) {
      raise(ErrorCode::config_error,
            "bad fixture record at " + path + ":" + std::to_string(line_no));
    }
    const auto key = j.at("prompt_sha256").get<std::string>() + "#" +
                     std::to_string(j.at("run_index").get<int>());
    responses_[key] = j.at("response_text").get<std::string>();
  }
}

RawResponse ScriptedBackend::do_complete(const std::string& prompt,
                                         int run_index) {
  const std::string sha = sha256_hex(prompt);
  auto it = responses_.find(sha + "#" + std::to_string(run_index));
  if (it == responses_.end()) {
    raise(ErrorCode::backend_refusal,
          "fixture has no entry for prompt " + sha.substr(0, 12) + "... run " +
              std::to_string(run_index));
  }
  RawResponse r;
  r.text = it->second;
  r.metadata = {{"backend", "scripted"}, {"prompt_sha256", sha}};
  return r;
}

HttpChatBackend::HttpChatBackend(BackendConfig config)
    : Backend(std::move(config)) {
  const std::string& url = this->config().endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    raise(ErrorCode::config_error, "endpoint must be an http(s) URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_url_ = url;
    path_.clear();
  } else {
    base_url_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  if (!path_.ends_with("/chat/completions")) path_ += "/chat/completions";
}

RawResponse HttpChatBackend::do_complete(const std::string& prompt,
                                         int run_index) {
  const auto& cfg = config();
  httplib::Client client(base_url_);
  const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  client.set_connection_timeout(timeout_s.count(), 0);
  client.set_read_timeout(timeout_s.count(), 0);
  client.set_write_timeout(timeout_s.count(), 0);

  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const nlohmann::json body = {
      {"model", cfg.model_id},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"temperature", cfg.temperature},
      {"max_tokens", cfg.max_tokens},
  };

  const auto start = std::chrono::steady_clock::now();
  auto result = client.Post(path_, headers, body.dump(), "application/json");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      raise(ErrorCode::timeout, "request timed out: " + httplib::to_string(err));
    }
    raise(ErrorCode::network_error,
          "request failed: " + httplib::to_string(err) + " (" + base_url_ + ")");
  }
  if (result->status == 401 || result->status == 403) {
    raise(ErrorCode::auth_error,
          "authentication rejected (HTTP " + std::to_string(result->status) +
              "); check $" + cfg.api_key_env);
  }
  if (result->status == 408 || result->status == 429 || result->status >= 500) {
    raise(ErrorCode::network_error,
          "server error HTTP " + std::to_string(result->status));
  }
  if (result->status < 200 || result->status >= 300) {
    raise(ErrorCode::backend_refusal,
          "HTTP " + std::to_string(result->status) + ": " + result->body);
  }

  auto j = nlohmann::json::parse(result->body, nullptr, false);
  if (j.is_discarded()) {
    raise(ErrorCode::backend_refusal, "malformed response body");
  }
  if (j.contains("error") && !j.at("error").is_null()) {
    raise(ErrorCode::backend_refusal, "backend error: " + j.at("error").dump());
  }
  if (!j.contains("choices") || !j.at("choices").is_array() ||
      j.at("choices").empty()) {
    raise(ErrorCode::backend_refusal, "response has no choices");
  }
  const auto& message = j.at("choices").at(0).at("message");

  RawResponse r;
  r.text = message.value("content", "");
  r.metadata["backend"] = "http-chat";
  r.metadata["latency_ms"] = std::to_string(elapsed.count());
  r.metadata["run_index"] = std::to_string(run_index);
  if (j.contains("usage") && j.at("usage").is_object()) {
    for (const auto& [k, v] : j.at("usage").items()) {
      if (v.is_number_integer()) {
        r.metadata[k] = std::to_string(v.get<std::int64_t>());
      }
    }
  }
  return r;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::scripted) {
    return std::make_unique<ScriptedBackend>(config);
  }
  return std::make_unique<HttpChatBackend>(config);
}

}  // namespace cci
