#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "corepo/error.hpp"
#include "corepo/gateway.hpp"

namespace corepo {

// Client for OpenAI-compatible chat-completion endpoints. Each call is
// independent; a counting semaphore caps outstanding requests, so one client
// can be shared across threads.

struct GatewayClientConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080"
  std::string api_key;   // sent as a bearer token when non-empty
  std::string model = "default";
  int parallelism = 8;
  int timeout_ms = 120000;
  int max_attempts = 3;      // total tries per request
  int backoff_base_ms = 250; // doubles after each failed attempt
};

inline void validate_gateway_client_config(const GatewayClientConfig& cfg) {
  if (cfg.endpoint.empty()) raise(ErrorKind::Usage, "gateway endpoint is empty");
  if (cfg.parallelism < 1) raise(ErrorKind::Usage, "parallelism must be >= 1");
  if (cfg.timeout_ms < 1) raise(ErrorKind::Usage, "timeout must be positive");
  if (cfg.max_attempts < 1) raise(ErrorKind::Usage, "max_attempts must be >= 1");
  if (cfg.backoff_base_ms < 0) raise(ErrorKind::Usage, "backoff must be >= 0");
}

namespace http_detail {

enum class FailureClass { Timeout, Transport };

inline bool is_timeout(httplib::Error e) {
  return e == httplib::Error::ConnectionTimeout || e == httplib::Error::Read ||
         e == httplib::Error::Write;
}

struct SlotGuard {
  std::counting_semaphore<4096>& sem;
  explicit SlotGuard(std::counting_semaphore<4096>& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;
};

}  // namespace http_detail

class HttpGateway : public Gateway {
 public:
  explicit HttpGateway(GatewayClientConfig cfg)
      : cfg_(std::move(cfg)), slots_((std::ptrdiff_t)cfg_.parallelism) {
    validate_gateway_client_config(cfg_);
  }

  std::vector<Completion> generate(const std::string& prompt,
                                   const SamplingConfig& cfg) override {
    validate_sampling(cfg);
    nlohmann::json body = request_skeleton(prompt);
    body["temperature"] = cfg.temperature;
    body["top_p"] = cfg.top_p;
    body["n"] = cfg.n;
    body["max_tokens"] = cfg.max_tokens;
    if (cfg.seed) body["seed"] = *cfg.seed;

    nlohmann::json reply = post_with_retries(body);
    std::vector<Completion> out;
    auto choices = reply.find("choices");
    if (choices == reply.end() || !choices->is_array())
      raise(ErrorKind::GatewayMalformed, "response has no choices array");
    for (const auto& choice : *choices) {
      if (!choice.contains("message") || !choice["message"].contains("content") ||
          !choice["message"]["content"].is_string())
        raise(ErrorKind::GatewayMalformed, "choice has no message content");
      Completion c;
      c.text = choice["message"]["content"].get<std::string>();
      c.finish_reason = choice.value("finish_reason", "");
      out.push_back(std::move(c));
    }
    if ((int)out.size() != cfg.n)
      raise(ErrorKind::GatewayMalformed,
            "expected " + std::to_string(cfg.n) + " completions, got " +
                std::to_string(out.size()));
    return out;
  }

  std::vector<TokenLogprob> next_token_logprobs(const LogprobRequest& req) override {
    validate_logprob_request(req);
    nlohmann::json body = request_skeleton(req.prompt);
    body["temperature"] = 0.0;
    body["max_tokens"] = 1;
    body["n"] = 1;
    body["logprobs"] = true;
    body["top_logprobs"] = req.top_k;

    nlohmann::json reply = post_with_retries(body);
    const char* shape = "response lacks choices[0].logprobs.content[0].top_logprobs";
    if (!reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty())
      raise(ErrorKind::GatewayMalformed, shape);
    const auto& choice = reply["choices"][0];
    if (!choice.contains("logprobs") || !choice["logprobs"].contains("content") ||
        !choice["logprobs"]["content"].is_array() || choice["logprobs"]["content"].empty())
      raise(ErrorKind::GatewayMalformed, shape);
    const auto& slot = choice["logprobs"]["content"][0];
    if (!slot.contains("top_logprobs") || !slot["top_logprobs"].is_array())
      raise(ErrorKind::GatewayMalformed, shape);

    std::vector<TokenLogprob> out;
    for (const auto& entry : slot["top_logprobs"]) {
      if (!entry.contains("token") || !entry["token"].is_string() ||
          !entry.contains("logprob") || !entry["logprob"].is_number())
        raise(ErrorKind::GatewayMalformed, "malformed top_logprobs entry");
      out.push_back({entry["token"].get<std::string>(), entry["logprob"].get<double>()});
    }
    if ((int)out.size() > req.top_k) out.resize((std::size_t)req.top_k);
    normalize_logprobs(out);
    return out;
  }

  const GatewayClientConfig& config() const { return cfg_; }

 private:
  nlohmann::json request_skeleton(const std::string& prompt) const {
    return {
        {"model", cfg_.model},
        {"messages",
         {{{"role", "system"}, {"content", std::string(kSystemPrompt)}},
          {{"role", "user"}, {"content", prompt}}}},
    };
  }

  // One POST with up to max_attempts tries. Transport failures and 5xx are
  // transient and back off exponentially; auth and malformed responses are
  // final immediately.
  nlohmann::json post_with_retries(const nlohmann::json& body) {
    http_detail::SlotGuard slot(slots_);
    const std::string payload = body.dump();
    http_detail::FailureClass failure = http_detail::FailureClass::Transport;
    std::string last_detail;

    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
      if (attempt > 1) {
        long long delay = cfg_.backoff_base_ms;
        for (int i = 2; i < attempt; ++i) delay *= 2;
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      }

      httplib::Client client(cfg_.endpoint);
      client.set_connection_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
      client.set_read_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
      client.set_write_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
      httplib::Headers headers;
      if (!cfg_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + cfg_.api_key);

      auto res = client.Post("/v1/chat/completions", headers, payload, "application/json");
      if (!res) {
        failure = http_detail::is_timeout(res.error())
                      ? http_detail::FailureClass::Timeout
                      : http_detail::FailureClass::Transport;
        last_detail = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 401 || res->status == 403)
        raise(ErrorKind::GatewayAuth, "endpoint rejected credentials (HTTP " +
                                          std::to_string(res->status) + ")");
      if (res->status >= 500) {
        failure = http_detail::FailureClass::Transport;
        last_detail = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        raise(ErrorKind::GatewayMalformed,
              "unexpected HTTP " + std::to_string(res->status) + ": " + res->body);

      nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
      if (reply.is_discarded() || !reply.is_object())
        raise(ErrorKind::GatewayMalformed, "response body is not a JSON object");
      return reply;
    }

    if (failure == http_detail::FailureClass::Timeout)
      raise(ErrorKind::GatewayTimeout,
            "request timed out after " + std::to_string(cfg_.max_attempts) +
                " attempts: " + last_detail);
    raise(ErrorKind::GatewayTransport,
          "transport failed after " + std::to_string(cfg_.max_attempts) +
              " attempts: " + last_detail);
  }

  GatewayClientConfig cfg_;
  std::counting_semaphore<4096> slots_;
};

}  // namespace corepo
