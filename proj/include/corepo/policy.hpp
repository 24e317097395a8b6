#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "corepo/error.hpp"

namespace corepo {

// Context id used to pad positions before the sequence start.
inline constexpr int kStartToken = -1;

// Tabular softmax n-gram policy over a small vocabulary. Each context (the
// preceding context_order token ids, start-padded) owns a row of logits;
// next-token probabilities are the softmax of that row. Rows are stored
// sparsely: a missing row means all-zero logits, i.e. a uniform
// distribution.
class ToyPolicy {
 public:
  using Context = std::vector<int>;
  using Table = std::map<Context, std::vector<double>>;

  ToyPolicy() = default;
  ToyPolicy(std::vector<std::string> vocab, int context_order = 1)
      : vocab_(std::move(vocab)), order_(context_order) {
    if (vocab_.empty()) raise(ErrorKind::Usage, "vocabulary must be non-empty");
    if (order_ < 0) raise(ErrorKind::Usage, "context_order must be nonnegative");
  }

  int vocab_size() const { return (int)vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  int context_order() const { return order_; }
  const Table& params() const { return params_; }

  bool operator==(const ToyPolicy& o) const {
    return vocab_ == o.vocab_ && order_ == o.order_ && params_ == o.params_;
  }

  Context context_at(const std::vector<int>& tokens, std::size_t pos) const {
    Context ctx;
    ctx.reserve(order_);
    for (int back = order_; back >= 1; --back) {
      std::ptrdiff_t i = (std::ptrdiff_t)pos - back;
      ctx.push_back(i < 0 ? kStartToken : tokens[i]);
    }
    return ctx;
  }

  std::vector<double>& row(const Context& ctx) {
    auto it = params_.find(ctx);
    if (it == params_.end())
      it = params_.emplace(ctx, std::vector<double>(vocab_.size(), 0.0)).first;
    return it->second;
  }

  std::vector<double> row_copy(const Context& ctx) const {
    auto it = params_.find(ctx);
    if (it != params_.end()) return it->second;
    return std::vector<double>(vocab_.size(), 0.0);
  }

  // Softmax of the context's logit row, max-subtracted for stability.
  std::vector<double> token_distribution(const Context& ctx) const {
    std::vector<double> logits = row_copy(ctx);
    double m = logits[0];
    for (double v : logits)
      if (v > m) m = v;
    double sum = 0.0;
    std::vector<double> probs(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
      probs[j] = std::exp(logits[j] - m);
      sum += probs[j];
    }
    for (double& p : probs) p /= sum;
    return probs;
  }

  double sequence_logprob(const std::vector<int>& tokens) const {
    double total = 0.0;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      check_token(tokens[t]);
      auto probs = token_distribution(context_at(tokens, t));
      total += std::log(probs[tokens[t]]);
    }
    return total;
  }

  // d log pi(tokens) / d logits: (one-hot - softmax) accumulated over the
  // visited contexts. Keys are exactly the contexts the sequence visits.
  Table grad_log_prob(const std::vector<int>& tokens) const {
    Table grad;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      check_token(tokens[t]);
      Context ctx = context_at(tokens, t);
      auto probs = token_distribution(ctx);
      auto it = grad.find(ctx);
      if (it == grad.end())
        it = grad.emplace(ctx, std::vector<double>(vocab_.size(), 0.0)).first;
      for (std::size_t j = 0; j < probs.size(); ++j) it->second[j] -= probs[j];
      it->second[tokens[t]] += 1.0;
    }
    return grad;
  }

  // params += scale * grad, creating rows as needed.
  void apply_gradient(const Table& grad, double scale) {
    for (const auto& [ctx, g] : grad) {
      auto& r = row(ctx);
      for (std::size_t j = 0; j < g.size(); ++j) r[j] += scale * g[j];
    }
  }

  // Inverse-CDF sampling with a fully specified uniform draw, so sequences
  // are reproducible across platforms for a given mt19937_64 state.
  std::vector<int> sample(std::mt19937_64& rng, int length) const {
    std::vector<int> tokens;
    tokens.reserve(length);
    for (int t = 0; t < length; ++t) {
      auto probs = token_distribution(context_at(tokens, tokens.size()));
      double u = (double)(rng() >> 11) * 0x1.0p-53;
      double acc = 0.0;
      int chosen = (int)probs.size() - 1;
      for (std::size_t j = 0; j < probs.size(); ++j) {
        acc += probs[j];
        if (u < acc) {
          chosen = (int)j;
          break;
        }
      }
      tokens.push_back(chosen);
    }
    return tokens;
  }

  // Argmax decoding; logit ties resolve to the lowest token id.
  std::vector<int> greedy(int length) const {
    std::vector<int> tokens;
    tokens.reserve(length);
    for (int t = 0; t < length; ++t) {
      auto probs = token_distribution(context_at(tokens, tokens.size()));
      int best = 0;
      for (std::size_t j = 1; j < probs.size(); ++j)
        if (probs[j] > probs[best]) best = (int)j;
      tokens.push_back(best);
    }
    return tokens;
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [ctx, logits] : params_)
      rows.push_back({{"context", ctx}, {"logits", logits}});
    return {{"vocab", vocab_}, {"context_order", order_}, {"params", rows}};
  }

  static ToyPolicy from_json(const nlohmann::json& j) {
    ToyPolicy p(j.at("vocab").get<std::vector<std::string>>(), j.at("context_order").get<int>());
    for (const auto& r : j.at("params")) {
      auto ctx = r.at("context").get<std::vector<int>>();
      auto logits = r.at("logits").get<std::vector<double>>();
      if ((int)logits.size() != p.vocab_size())
        raise(ErrorKind::InputMalformed, "logit row size does not match vocabulary");
      p.params_[ctx] = logits;
    }
    return p;
  }

 private:
  void check_token(int id) const {
    if (id < 0 || id >= (int)vocab_.size())
      raise(ErrorKind::InputMalformed, "token id out of range: " + std::to_string(id));
  }

  std::vector<std::string> vocab_;
  int order_ = 1;
  Table params_;
};

}  // namespace corepo
