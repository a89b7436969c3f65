#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "patdraft/embedding.hpp"
#include "patdraft/errors.hpp"
#include "patdraft/harvest.hpp"
#include "patdraft/llm.hpp"

namespace patdraft {

struct UrlParts {
  std::string base;  // scheme://host[:port]
  std::string path;  // /path, defaults to "/"
};

inline UrlParts split_url(const std::string& url) {
  UrlParts parts;
  size_t scheme_end = url.find("://");
  size_t path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    parts.base = url;
    parts.path = "/";
  } else {
    parts.base = url.substr(0, path_start);
    parts.path = url.substr(path_start);
  }
  return parts;
}

/// Chat-completions client over HTTP. Requests are retried with
/// exponential backoff and bounded by a configurable in-flight limit.
class HttpLlmClient : public LanguageModelClient {
public:
  explicit HttpLlmClient(const std::string& endpoint_url, int max_inflight = 4,
                         RetryPolicy retry = {}, int timeout_seconds = 300)
      : url_(split_url(endpoint_url)),
        retry_(retry),
        timeout_seconds_(timeout_seconds),
        inflight_(max_inflight) {}

  std::string complete(const ChatRequest& request) override {
    nlohmann::json body;
    body["model"] = request.model;
    body["messages"] = {{{"role", "system"}, {"content", request.system}},
                        {{"role", "user"}, {"content", request.user}}};
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    std::string payload = body.dump();

    inflight_.acquire();
    struct Release {
      std::counting_semaphore<>& sem;
      ~Release() { sem.release(); }
    } release{inflight_};

    int backoff = retry_.initial_backoff_ms;
    for (int attempt = 1;; ++attempt) {
      httplib::Client client(url_.base);
      client.set_read_timeout(timeout_seconds_, 0);
      client.set_connection_timeout(10, 0);
      auto res = client.Post(url_.path, payload, "application/json");
      if (res && res->status / 100 == 2) {
        nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded() || !j.contains("choices") || j["choices"].empty() ||
            !j["choices"][0].contains("message"))
          throw LlmTransportError("malformed completion response");
        return j["choices"][0]["message"]["content"].get<std::string>();
      }
      if (attempt >= retry_.max_attempts) {
        std::string status = res ? std::to_string(res->status) : "no response";
        throw LlmTransportError("endpoint unreachable after " + std::to_string(attempt) +
                                " attempts (" + status + "): " + url_.base + url_.path);
      }
      if (backoff > 0) std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }

private:
  UrlParts url_;
  RetryPolicy retry_;
  int timeout_seconds_;
  std::counting_semaphore<> inflight_;
};

class HttpSparqlClient : public SparqlClient {
public:
  explicit HttpSparqlClient(int timeout_seconds = 120) : timeout_seconds_(timeout_seconds) {}

  std::string post(const std::string& endpoint_url, const std::string& query) override {
    UrlParts url = split_url(endpoint_url);
    httplib::Client client(url.base);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_connection_timeout(10, 0);
    httplib::Headers headers = {{"Accept", "application/sparql-results+json"}};
    auto res = client.Post(url.path, headers, query, "application/sparql-query");
    if (!res || res->status / 100 != 2) {
      std::string status = res ? std::to_string(res->status) : "no response";
      throw TransportError("sparql endpoint returned " + status + ": " + endpoint_url);
    }
    return res->body;
  }

private:
  int timeout_seconds_;
};

/// Token embedding endpoint: POST {"tokens": [...]} -> {"vectors": [[...]]}.
class HttpEmbeddingClient : public EmbeddingClient {
public:
  explicit HttpEmbeddingClient(const std::string& endpoint_url, RetryPolicy retry = {},
                               int timeout_seconds = 120)
      : url_(split_url(endpoint_url)), retry_(retry), timeout_seconds_(timeout_seconds) {}

  std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) override {
    nlohmann::json body;
    body["tokens"] = tokens;
    std::string payload = body.dump();

    int backoff = retry_.initial_backoff_ms;
    for (int attempt = 1;; ++attempt) {
      httplib::Client client(url_.base);
      client.set_read_timeout(timeout_seconds_, 0);
      client.set_connection_timeout(10, 0);
      auto res = client.Post(url_.path, payload, "application/json");
      if (res && res->status / 100 == 2) {
        nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded() || !j.contains("vectors") || !j["vectors"].is_array())
          throw EmbeddingTransportError("malformed embedding response");
        std::vector<std::vector<double>> vectors;
        for (const auto& v : j["vectors"]) vectors.push_back(v.get<std::vector<double>>());
        if (vectors.size() != tokens.size())
          throw DimensionMismatch("embedder returned " + std::to_string(vectors.size()) +
                                  " vectors for " + std::to_string(tokens.size()) + " tokens");
        return vectors;
      }
      if (attempt >= retry_.max_attempts) {
        std::string status = res ? std::to_string(res->status) : "no response";
        throw EmbeddingTransportError("embedding endpoint unreachable after " +
                                      std::to_string(attempt) + " attempts (" + status + ")");
      }
      if (backoff > 0) std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }

private:
  UrlParts url_;
  RetryPolicy retry_;
  int timeout_seconds_;
};

}  // namespace patdraft
