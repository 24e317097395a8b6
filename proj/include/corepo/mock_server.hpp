#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "corepo/error.hpp"
#include "corepo/mock_gateway.hpp"
#include "corepo/sha256.hpp"

namespace corepo {

// Deterministic in-process chat-completions server. Responses come from a
// fixture map keyed by the sha256 of the user message, in the same JSONL
// format MockGateway reads, so the two stay interchangeable. Failure
// injection and request instrumentation make retry, timeout, and
// parallelism behavior observable from tests.
class MockServer {
 public:
  enum class FailMode { TimeoutSleep, Http500, Garbage, Auth401 };

  MockServer() {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) raise(ErrorKind::Internal, "mock server failed to bind");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  int port() const { return port_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  void add_fixture(const std::string& prompt, MockFixture fixture) {
    std::lock_guard<std::mutex> lock(mu_);
    fixtures_[sha256_hex(prompt)] = std::move(fixture);
  }

  // Same JSONL schema as MockGateway::load_fixture_file.
  void load_fixture_file(const std::string& path) {
    std::string content = read_file(path);
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < content.size()) {
      auto end = content.find('\n', pos);
      if (end == std::string::npos) end = content.size();
      std::string line = content.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("prompt_sha256"))
        raise(ErrorKind::InputMalformed,
              "bad fixture line " + std::to_string(line_no) + " in " + path);
      MockFixture f;
      for (const auto& c : j.value("completions", nlohmann::json::array()))
        f.completions.push_back(c.get<std::string>());
      for (const auto& p : j.value("logprobs", nlohmann::json::array()))
        f.logprobs.push_back({p.at(0).get<std::string>(), p.at(1).get<double>()});
      std::lock_guard<std::mutex> lock(mu_);
      fixtures_[j.at("prompt_sha256").get<std::string>()] = std::move(f);
    }
  }

  // The next n requests fail in the given mode before any fixture lookup.
  void fail_next(int n, FailMode mode) {
    std::lock_guard<std::mutex> lock(mu_);
    fail_remaining_ = n;
    fail_mode_ = mode;
  }

  // Requests must carry "Authorization: Bearer <key>"; empty disables the check.
  void set_expected_api_key(std::string key) {
    std::lock_guard<std::mutex> lock(mu_);
    expected_key_ = std::move(key);
  }

  // Sleep applied by TimeoutSleep mode; make it exceed the client timeout.
  void set_timeout_sleep_ms(int ms) {
    std::lock_guard<std::mutex> lock(mu_);
    timeout_sleep_ms_ = ms;
  }

  // Artificial per-request latency, for overlapping in-flight requests.
  void set_latency_ms(int ms) {
    std::lock_guard<std::mutex> lock(mu_);
    latency_ms_ = ms;
  }

  int request_count() const { return requests_.load(); }
  int generate_requests() const { return generate_requests_.load(); }
  int logprob_requests() const { return logprob_requests_.load(); }
  int max_in_flight() const { return max_in_flight_.load(); }

  // User-message payloads in arrival order.
  std::vector<std::string> prompts() const {
    std::lock_guard<std::mutex> lock(mu_);
    return prompts_;
  }

  // Raw request bodies in arrival order, for wire-format assertions.
  std::vector<std::string> request_bodies() const {
    std::lock_guard<std::mutex> lock(mu_);
    return bodies_;
  }

 private:
  struct InFlight {
    MockServer& s;
    explicit InFlight(MockServer& server) : s(server) {
      int now = ++s.in_flight_;
      int seen = s.max_in_flight_.load();
      while (now > seen && !s.max_in_flight_.compare_exchange_weak(seen, now)) {
      }
    }
    ~InFlight() { --s.in_flight_; }
  };

  void handle(const httplib::Request& req, httplib::Response& res) {
    InFlight guard(*this);
    ++requests_;

    int latency = 0;
    int fail_sleep = 0;
    bool fail_now = false;
    FailMode mode = FailMode::Http500;
    std::string expected_key;
    {
      std::lock_guard<std::mutex> lock(mu_);
      latency = latency_ms_;
      if (fail_remaining_ > 0) {
        --fail_remaining_;
        fail_now = true;
        mode = fail_mode_;
        fail_sleep = timeout_sleep_ms_;
      }
      expected_key = expected_key_;
      bodies_.push_back(req.body);
    }
    if (latency > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency));

    if (fail_now) {
      switch (mode) {
        case FailMode::TimeoutSleep:
          std::this_thread::sleep_for(std::chrono::milliseconds(fail_sleep));
          res.status = 200;
          res.set_content("{}", "application/json");
          return;
        case FailMode::Http500:
          res.status = 500;
          res.set_content("injected failure", "text/plain");
          return;
        case FailMode::Garbage:
          res.status = 200;
          res.set_content("not json {{{", "application/json");
          return;
        case FailMode::Auth401:
          res.status = 401;
          res.set_content("injected auth failure", "text/plain");
          return;
      }
    }

    if (!expected_key.empty()) {
      auto auth = req.get_header_value("Authorization");
      if (auth != "Bearer " + expected_key) {
        res.status = 401;
        res.set_content("bad credentials", "text/plain");
        return;
      }
    }

    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("messages") || !body["messages"].is_array() ||
        body["messages"].empty()) {
      res.status = 400;
      res.set_content("bad request body", "text/plain");
      return;
    }
    std::string prompt;
    for (const auto& m : body["messages"])
      if (m.value("role", "") == "user") prompt = m.value("content", "");

    MockFixture fixture;
    {
      std::lock_guard<std::mutex> lock(mu_);
      prompts_.push_back(prompt);
      auto it = fixtures_.find(sha256_hex(prompt));
      if (it == fixtures_.end()) {
        res.status = 404;
        res.set_content("no fixture for prompt", "text/plain");
        return;
      }
      fixture = it->second;
    }

    bool wants_logprobs = body.value("logprobs", false);
    if (wants_logprobs) {
      ++logprob_requests_;
      int top_k = body.value("top_logprobs", 20);
      nlohmann::json top = nlohmann::json::array();
      int emitted = 0;
      for (const auto& tl : fixture.logprobs) {
        if (emitted++ >= top_k) break;
        top.push_back({{"token", tl.token}, {"logprob", tl.logprob}});
      }
      nlohmann::json reply = {
          {"choices",
           {{{"message", {{"role", "assistant"}, {"content", ""}}},
             {"finish_reason", "stop"},
             {"logprobs",
              {{"content",
                {{{"token", fixture.logprobs.empty() ? "" : fixture.logprobs[0].token},
                  {"logprob", fixture.logprobs.empty() ? 0.0 : fixture.logprobs[0].logprob},
                  {"top_logprobs", top}}}}}}}}},
      };
      res.status = 200;
      res.set_content(reply.dump(), "application/json");
      return;
    }

    ++generate_requests_;
    int n = body.value("n", 1);
    if (fixture.completions.empty()) {
      res.status = 404;
      res.set_content("fixture has no completions", "text/plain");
      return;
    }
    nlohmann::json choices = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      const std::string& text = fixture.completions[(std::size_t)i % fixture.completions.size()];
      choices.push_back({{"message", {{"role", "assistant"}, {"content", text}}},
                         {"finish_reason", "stop"},
                         {"index", i}});
    }
    nlohmann::json reply = {{"choices", choices}};
    res.status = 200;
    res.set_content(reply.dump(), "application/json");
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex mu_;
  std::map<std::string, MockFixture> fixtures_;
  std::vector<std::string> prompts_;
  std::vector<std::string> bodies_;
  std::string expected_key_;
  int fail_remaining_ = 0;
  FailMode fail_mode_ = FailMode::Http500;
  int timeout_sleep_ms_ = 1000;
  int latency_ms_ = 0;

  std::atomic<int> requests_{0};
  std::atomic<int> generate_requests_{0};
  std::atomic<int> logprob_requests_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

}  // namespace corepo
