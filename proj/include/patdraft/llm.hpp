#pragma once

#include <deque>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "patdraft/errors.hpp"
#include "patdraft/hash.hpp"

namespace patdraft {

struct ChatRequest {
  std::string model;
  std::string system;
  std::string user;
  int max_tokens = 0;
  double temperature = 0.0;
};

/// Chat-style language model client. Implementations must be safe to call
/// from multiple threads.
class LanguageModelClient {
public:
  virtual ~LanguageModelClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Deterministic in-memory client for tests and offline pipeline runs.
/// Lookup order: exact request key, then the FIFO queue, then the default
/// completion, then the empty string.
///
/// Script file schema (JSON):
///   { "responses": {"<key>": "text", ...},
///     "queue": ["text", ...],
///     "default": "text" }
/// where <key> = request_key(request).
class ScriptedLlmClient : public LanguageModelClient {
public:
  static std::string request_key(const ChatRequest& request) {
    std::string material = request.system;
    material.push_back('\x1f');
    material += request.user;
    material.push_back('\x1f');
    material += std::to_string(request.max_tokens);
    return fnv1a64_hex(material);
  }

  /// Loads script entries from a JSON file into this client.
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw IoError("mock script is not valid JSON: " + path);
    std::lock_guard<std::mutex> lock(mutex_);
    if (j.contains("responses"))
      for (auto it = j["responses"].begin(); it != j["responses"].end(); ++it)
        responses_[it.key()] = it.value().get<std::string>();
    if (j.contains("queue"))
      for (const auto& entry : j["queue"]) queue_.push_back(entry.get<std::string>());
    if (j.contains("default")) default_ = j["default"].get<std::string>();
  }

  void add_response(const std::string& key, std::string completion) {
    std::lock_guard<std::mutex> lock(mutex_);
    responses_[key] = std::move(completion);
  }

  void push_response(std::string completion) {
    std::lock_guard<std::mutex> lock(mutex_);
    queue_.push_back(std::move(completion));
  }

  void set_default(std::string completion) {
    std::lock_guard<std::mutex> lock(mutex_);
    default_ = std::move(completion);
  }

  /// Makes the next `n` calls throw LlmTransportError.
  void fail_next(size_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    fail_next_ = n;
  }

  std::string complete(const ChatRequest& request) override {
    std::lock_guard<std::mutex> lock(mutex_);
    requests_.push_back(request);
    if (fail_next_ > 0) {
      --fail_next_;
      throw LlmTransportError("scripted transport failure");
    }
    auto it = responses_.find(request_key(request));
    if (it != responses_.end()) return it->second;
    if (!queue_.empty()) {
      std::string next = std::move(queue_.front());
      queue_.pop_front();
      return next;
    }
    if (default_) return *default_;
    return "";
  }

  const std::vector<ChatRequest>& requests() const { return requests_; }
  size_t call_count() const { return requests_.size(); }

private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> responses_;
  std::deque<std::string> queue_;
  std::optional<std::string> default_;
  size_t fail_next_ = 0;
  std::vector<ChatRequest> requests_;
};

}  // namespace patdraft
