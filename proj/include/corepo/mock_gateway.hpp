#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "corepo/gateway.hpp"
#include "corepo/sha256.hpp"

namespace corepo {

// One deterministic response set for one prompt.
struct MockFixture {
  std::vector<std::string> completions;
  std::vector<TokenLogprob> logprobs;
};

// In-process deterministic gateway. Responses come from either a scripted
// FIFO (push_* methods, consumed call by call) or a fixture map keyed by the
// sha256 of the prompt. Scripted responses take priority so a test can
// override single calls. Every call is recorded for instrumentation.
class MockGateway : public Gateway {
 public:
  void add_fixture(const std::string& prompt, MockFixture fixture) {
    std::lock_guard<std::mutex> lock(mu_);
    fixtures_[sha256_hex(prompt)] = std::move(fixture);
  }

  void add_fixture_by_hash(const std::string& prompt_sha256, MockFixture fixture) {
    std::lock_guard<std::mutex> lock(mu_);
    fixtures_[prompt_sha256] = std::move(fixture);
  }

  // Fixture file: JSONL, one object per line with fields prompt_sha256,
  // completions (list of strings), logprobs (list of [token, lp] pairs).
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
      add_fixture_by_hash(j.at("prompt_sha256").get<std::string>(), std::move(f));
    }
  }

  void push_completions(std::vector<Completion> batch) {
    std::lock_guard<std::mutex> lock(mu_);
    scripted_completions_.push_back(std::move(batch));
  }

  void push_logprobs(std::vector<TokenLogprob> top) {
    std::lock_guard<std::mutex> lock(mu_);
    scripted_logprobs_.push_back(std::move(top));
  }

  std::vector<Completion> generate(const std::string& prompt,
                                   const SamplingConfig& cfg) override {
    validate_sampling(cfg);
    std::lock_guard<std::mutex> lock(mu_);
    ++generate_calls_;
    generate_prompts_.push_back(prompt);
    if (!scripted_completions_.empty()) {
      auto batch = std::move(scripted_completions_.front());
      scripted_completions_.pop_front();
      return take_n(batch, cfg.n);
    }
    auto it = fixtures_.find(sha256_hex(prompt));
    if (it == fixtures_.end() || it->second.completions.empty())
      raise(ErrorKind::GatewayMalformed, "no scripted completions for prompt");
    std::vector<Completion> batch;
    for (const auto& text : it->second.completions) batch.push_back({text, "stop"});
    return take_n(batch, cfg.n);
  }

  std::vector<TokenLogprob> next_token_logprobs(const LogprobRequest& req) override {
    validate_logprob_request(req);
    std::lock_guard<std::mutex> lock(mu_);
    ++logprob_calls_;
    logprob_prompts_.push_back(req.prompt);
    std::vector<TokenLogprob> top;
    if (!scripted_logprobs_.empty()) {
      top = std::move(scripted_logprobs_.front());
      scripted_logprobs_.pop_front();
    } else {
      auto it = fixtures_.find(sha256_hex(req.prompt));
      if (it == fixtures_.end() || it->second.logprobs.empty())
        raise(ErrorKind::GatewayMalformed, "no scripted logprobs for prompt");
      top = it->second.logprobs;
    }
    if ((int)top.size() > req.top_k) top.resize(req.top_k);
    normalize_logprobs(top);
    return top;
  }

  int generate_calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return generate_calls_;
  }
  int logprob_calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return logprob_calls_;
  }
  int total_calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return generate_calls_ + logprob_calls_;
  }
  std::vector<std::string> generate_prompts() const {
    std::lock_guard<std::mutex> lock(mu_);
    return generate_prompts_;
  }
  std::vector<std::string> logprob_prompts() const {
    std::lock_guard<std::mutex> lock(mu_);
    return logprob_prompts_;
  }

 private:
  // A fixture holding fewer completions than requested cycles through what
  // it has, so small fixtures can serve any n deterministically.
  static std::vector<Completion> take_n(const std::vector<Completion>& batch, int n) {
    if (batch.empty()) raise(ErrorKind::GatewayMalformed, "empty completion script");
    std::vector<Completion> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(batch[i % batch.size()]);
    return out;
  }

  mutable std::mutex mu_;
  std::map<std::string, MockFixture> fixtures_;
  std::deque<std::vector<Completion>> scripted_completions_;
  std::deque<std::vector<TokenLogprob>> scripted_logprobs_;
  int generate_calls_ = 0;
  int logprob_calls_ = 0;
  std::vector<std::string> generate_prompts_;
  std::vector<std::string> logprob_prompts_;
};

}  // namespace corepo
