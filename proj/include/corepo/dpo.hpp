#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "corepo/error.hpp"
#include "corepo/pair_builder.hpp"
#include "corepo/policy.hpp"

namespace corepo {

enum class LossForm { Canonical, AsPrinted };

inline const char* loss_form_name(LossForm f) {
  return f == LossForm::Canonical ? "canonical" : "as_printed";
}

inline LossForm parse_loss_form(std::string_view name) {
  if (name == "canonical") return LossForm::Canonical;
  if (name == "as_printed") return LossForm::AsPrinted;
  raise(ErrorKind::Usage, "unknown loss form: " + std::string(name));
}

struct DpoConfig {
  double beta = 0.1;
  LossForm loss_form = LossForm::Canonical;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

inline void validate_dpo_config(const DpoConfig& cfg) {
  if (!(cfg.beta > 0.0)) raise(ErrorKind::Usage, "beta must be positive");
  if (!(cfg.learning_rate > 0.0)) raise(ErrorKind::Usage, "learning_rate must be positive");
}

// Sequence log-probabilities of the winner/loser under the trained policy
// and the frozen reference.
struct PairLogprobs {
  double theta_w;
  double theta_l;
  double ref_w;
  double ref_l;
};

inline void validate_pair_logprobs(const PairLogprobs& lp) {
  if (!std::isfinite(lp.theta_w) || !std::isfinite(lp.theta_l) || !std::isfinite(lp.ref_w) ||
      !std::isfinite(lp.ref_l))
    raise(ErrorKind::InvalidLogprob, "pair logprobs must be finite");
}

// ln(1 + e^x) without overflow for large |x|.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Preference margin z = beta * ((theta_w - ref_w) - (theta_l - ref_l)).
inline double dpo_margin(const PairLogprobs& lp, double beta) {
  return beta * ((lp.theta_w - lp.ref_w) - (lp.theta_l - lp.ref_l));
}

// Canonical form: -log sigmoid(z), bounded below by 0. The as_printed form
// log sigmoid(-z) differs by sign and offset but descends in the same
// direction: both are strictly decreasing in z.
inline double dpo_loss(const PairLogprobs& lp, const DpoConfig& cfg) {
  validate_pair_logprobs(lp);
  validate_dpo_config(cfg);
  double z = dpo_margin(lp, cfg.beta);
  if (cfg.loss_form == LossForm::Canonical) return softplus(-z);
  return -softplus(z);
}

using GradTable = ToyPolicy::Table;

inline PairLogprobs pair_logprobs(const ToyPolicy& policy, const ToyPolicy& reference,
                                  const std::vector<int>& winner,
                                  const std::vector<int>& loser) {
  return {policy.sequence_logprob(winner), policy.sequence_logprob(loser),
          reference.sequence_logprob(winner), reference.sequence_logprob(loser)};
}

// Analytic gradient of the canonical loss with respect to the policy's logit
// table: dL/dtheta = (sigmoid(z) - 1) * beta * (dlogpi(winner) - dlogpi(loser)).
inline GradTable dpo_grad(const ToyPolicy& policy, const ToyPolicy& reference,
                          const std::vector<int>& winner, const std::vector<int>& loser,
                          const DpoConfig& cfg) {
  validate_dpo_config(cfg);
  if (cfg.loss_form != LossForm::Canonical)
    raise(ErrorKind::Usage, "analytic gradient is defined for the canonical loss form");
  PairLogprobs lp = pair_logprobs(policy, reference, winner, loser);
  validate_pair_logprobs(lp);
  double coef = (sigmoid(dpo_margin(lp, cfg.beta)) - 1.0) * cfg.beta;

  GradTable grad = policy.grad_log_prob(winner);
  for (const auto& [ctx, g] : policy.grad_log_prob(loser)) {
    auto it = grad.find(ctx);
    if (it == grad.end())
      it = grad.emplace(ctx, std::vector<double>(g.size(), 0.0)).first;
    for (std::size_t j = 0; j < g.size(); ++j) it->second[j] -= g[j];
  }
  for (auto& [ctx, g] : grad)
    for (double& v : g) v *= coef;
  return grad;
}

struct UpdateResult {
  bool applied = false;
  double loss_before = 0.0;
  double loss_after = 0.0;
  double margin_before = 0.0;
  double margin_after = 0.0;
  double step_scale = 0.0;  // learning rate actually used after backtracking
};

// One gradient-descent step on the pair, halving the learning rate until the
// canonical loss strictly decreases (equivalently, the margin strictly
// increases; both loss forms are monotone in the margin, so the choice of
// reported form does not affect acceptance of a step).
inline UpdateResult apply_pair_update(ToyPolicy& policy, const ToyPolicy& reference,
                                      const std::vector<int>& winner,
                                      const std::vector<int>& loser, const DpoConfig& cfg) {
  validate_dpo_config(cfg);
  DpoConfig canon = cfg;
  canon.loss_form = LossForm::Canonical;

  UpdateResult result;
  PairLogprobs before = pair_logprobs(policy, reference, winner, loser);
  result.margin_before = dpo_margin(before, cfg.beta);
  result.loss_before = dpo_loss(before, cfg);
  double canon_before = dpo_loss(before, canon);

  GradTable grad = dpo_grad(policy, reference, winner, loser, canon);
  bool all_zero = true;
  for (const auto& [ctx, g] : grad)
    for (double v : g)
      if (v != 0.0) all_zero = false;
  if (all_zero) {
    result.loss_after = result.loss_before;
    result.margin_after = result.margin_before;
    return result;  // winner and loser identical: nothing to move
  }

  double lr = cfg.learning_rate;
  for (int attempt = 0; attempt < 64; ++attempt, lr *= 0.5) {
    ToyPolicy candidate = policy;
    candidate.apply_gradient(grad, -lr);
    PairLogprobs after = pair_logprobs(candidate, reference, winner, loser);
    if (dpo_loss(after, canon) < canon_before) {
      policy = std::move(candidate);
      result.applied = true;
      result.step_scale = lr;
      result.margin_after = dpo_margin(after, cfg.beta);
      result.loss_after = dpo_loss(after, cfg);
      return result;
    }
  }
  result.loss_after = result.loss_before;
  result.margin_after = result.margin_before;
  return result;
}

// One iteration of the online self-training loop: sample N outputs from the
// current policy, score them, pick the highest-vs-lowest pair, and take one
// backtracked gradient step. The reference stays frozen throughout.
using ToySampler =
    std::function<std::vector<std::vector<int>>(const ToyPolicy&, std::mt19937_64&)>;
using ToyScorer = std::function<double(const std::vector<int>&)>;

struct StepReport {
  bool applied = false;
  std::string noop_reason;  // "score_tie" | "no_descent" | "" when applied
  double loss_before = 0.0;
  double loss_after = 0.0;
  double margin_before = 0.0;
  double margin_after = 0.0;
  std::vector<double> scores;
  int winner_index = -1;
  int loser_index = -1;
};

inline StepReport online_dpo_step(ToyPolicy& policy, const ToyPolicy& reference,
                                  const ToySampler& sampler, const ToyScorer& scorer,
                                  const DpoConfig& cfg, std::mt19937_64& rng) {
  validate_dpo_config(cfg);
  auto sequences = sampler(policy, rng);
  if (sequences.size() < 2)
    raise(ErrorKind::EmptySample, "sampler must draw at least two sequences");

  StepReport report;
  std::vector<ScoredSample> scored;
  scored.reserve(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    double s = scorer(sequences[i]);
    report.scores.push_back(s);
    scored.push_back({(int)i, s, ScoreKind::CombinedPtrue});
  }

  auto pair = build_core_pair(scored);
  if (!pair) {
    report.noop_reason = "score_tie";
    return report;
  }
  report.winner_index = pair->winner;
  report.loser_index = pair->loser;

  UpdateResult update = apply_pair_update(policy, reference, sequences[pair->winner],
                                          sequences[pair->loser], cfg);
  report.applied = update.applied;
  report.loss_before = update.loss_before;
  report.loss_after = update.loss_after;
  report.margin_before = update.margin_before;
  report.margin_after = update.margin_after;
  if (!update.applied) report.noop_reason = "no_descent";
  return report;
}

}  // namespace corepo
