#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corepo/error.hpp"

namespace corepo {

// System prompt applied to every request, task and confidence alike.
inline constexpr std::string_view kSystemPrompt = "Be a helpful assistant.";

struct Completion {
  std::string text;
  std::string finish_reason;  // "stop", "length", ...
};

struct TokenLogprob {
  std::string token;
  double logprob;
};

struct SamplingConfig {
  double temperature = 1.0;
  double top_p = 1.0;
  int n = 1;
  int max_tokens = 1024;
  std::optional<std::uint64_t> seed;

  // Sampling used when generating training candidates.
  static SamplingConfig train_preset() { return {1.0, 0.9, 5, 1024, std::nullopt}; }
  // Sampling used when generating candidates for inference-time selection.
  static SamplingConfig scale_preset() { return {0.7, 0.9, 8, 1024, std::nullopt}; }
  static SamplingConfig greedy_preset() { return {0.0, 1.0, 1, 1024, std::nullopt}; }
};

struct LogprobRequest {
  std::string prompt;
  int top_k = 20;  // invariant: >= 2
};

inline void validate_sampling(const SamplingConfig& cfg) {
  if (cfg.temperature < 0.0) raise(ErrorKind::Usage, "temperature must be nonnegative");
  if (!(cfg.top_p > 0.0 && cfg.top_p <= 1.0)) raise(ErrorKind::Usage, "top_p must be in (0,1]");
  if (cfg.n < 1) raise(ErrorKind::Usage, "n must be positive");
  if (cfg.max_tokens < 1) raise(ErrorKind::Usage, "max_tokens must be positive");
}

inline void validate_logprob_request(const LogprobRequest& req) {
  if (req.top_k < 2) raise(ErrorKind::Usage, "top_k must be at least 2");
}

// Enforces the response contract shared by every gateway implementation:
// all log-probabilities finite and <= 0, sorted descending.
inline void normalize_logprobs(std::vector<TokenLogprob>& top) {
  for (const auto& tl : top) {
    if (!std::isfinite(tl.logprob))
      raise(ErrorKind::GatewayMalformed, "non-finite logprob for token: " + tl.token);
    if (tl.logprob > 0.0)
      raise(ErrorKind::GatewayMalformed, "positive logprob for token: " + tl.token);
  }
  std::stable_sort(top.begin(), top.end(),
                   [](const TokenLogprob& a, const TokenLogprob& b) { return a.logprob > b.logprob; });
}

class Gateway {
 public:
  virtual ~Gateway() = default;

  // Returns exactly cfg.n completions for the prompt, or throws a typed
  // gateway error.
  virtual std::vector<Completion> generate(const std::string& prompt,
                                           const SamplingConfig& cfg) = 0;

  // Returns the top-k log-probabilities for the first token the model would
  // generate after the prompt, sorted descending. Fewer than top_k entries
  // may come back when the scripted vocabulary is smaller.
  virtual std::vector<TokenLogprob> next_token_logprobs(const LogprobRequest& req) = 0;
};

}  // namespace corepo
