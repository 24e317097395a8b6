#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "corepo/dpo.hpp"
#include "corepo/policy.hpp"

namespace corepo {

// Minimal two-token world for exercising the online training loop. A
// sequence is [reasoning token, answer token]. "R+" is sound reasoning,
// "R-" flawed reasoning; "A+" is the correct answer, "A-" a wrong one.
// [R+, A+] is the genuinely correct output; [R-, A+] reaches the correct
// answer through flawed reasoning, so any scorer that looks only at the
// answer cannot tell the two apart.
namespace synthetic {

inline constexpr int kSoundReasoning = 0;
inline constexpr int kFlawedReasoning = 1;
inline constexpr int kCorrectAnswer = 2;
inline constexpr int kWrongAnswer = 3;
inline constexpr int kSequenceLength = 2;

inline const std::vector<int> kCorrectReasoningSeq = {kSoundReasoning, kCorrectAnswer};
inline const std::vector<int> kLuckyAnswerSeq = {kFlawedReasoning, kCorrectAnswer};

inline ToyPolicy initial_policy() {
  return ToyPolicy({"R+", "R-", "A+", "A-"}, 1);
}

// Oracle playing the role of the combined confidence score C(a,r|x):
// sound reasoning with the correct answer scores high, flawed reasoning
// with the correct answer scores mid, wrong answers score low.
inline double confidence_score(const std::vector<int>& seq) {
  if (seq == kCorrectReasoningSeq) return 0.9;
  if (seq == kLuckyAnswerSeq) return 0.3;
  return 0.1;
}

// Oracle playing the role of an answer-only score C(a|x): it ties on the
// two correct-answer families by construction.
inline double answer_only_score(const std::vector<int>& seq) {
  return seq[1] == kCorrectAnswer ? 0.9 : 0.1;
}

inline double sequence_probability(const ToyPolicy& policy, const std::vector<int>& seq) {
  return std::exp(policy.sequence_logprob(seq));
}

inline ToySampler make_sampler(int n) {
  return [n](const ToyPolicy& policy, std::mt19937_64& rng) {
    std::vector<std::vector<int>> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(policy.sample(rng, kSequenceLength));
    return out;
  };
}

struct RunResult {
  double p_correct_initial = 0.0;
  double p_correct_final = 0.0;
  double p_lucky_initial = 0.0;
  double p_lucky_final = 0.0;
  int applied_steps = 0;
  int noop_steps = 0;
  ToyPolicy final_policy;
};

inline RunResult run_training(const ToyScorer& scorer, int steps, int samples_per_step,
                              const DpoConfig& cfg) {
  ToyPolicy policy = initial_policy();
  const ToyPolicy reference = initial_policy();
  std::mt19937_64 rng(cfg.seed);
  ToySampler sampler = make_sampler(samples_per_step);

  RunResult result;
  result.p_correct_initial = sequence_probability(policy, kCorrectReasoningSeq);
  result.p_lucky_initial = sequence_probability(policy, kLuckyAnswerSeq);
  for (int step = 0; step < steps; ++step) {
    StepReport report = online_dpo_step(policy, reference, sampler, scorer, cfg, rng);
    if (report.applied)
      ++result.applied_steps;
    else
      ++result.noop_steps;
  }
  result.p_correct_final = sequence_probability(policy, kCorrectReasoningSeq);
  result.p_lucky_final = sequence_probability(policy, kLuckyAnswerSeq);
  result.final_policy = std::move(policy);
  return result;
}

}  // namespace synthetic
}  // namespace corepo
