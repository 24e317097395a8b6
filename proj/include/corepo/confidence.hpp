#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corepo/error.hpp"
#include "corepo/gateway.hpp"
#include "corepo/prompts.hpp"
#include "corepo/text.hpp"

namespace corepo {

inline constexpr double kProbabilityFloor = 1e-9;
inline constexpr int kDefaultTopK = 20;
inline constexpr int kDefaultMaxDistractors = 4;

struct TrueFalseLogprobs {
  double logprob_true;   // log-probability of the "A" continuation
  double logprob_false;  // log-probability of the "B" continuation
};

// Two-logit softmax, computed with the max subtracted before exponentiating.
// Returns the raw value; scoring entry points clamp via clamp_probability.
inline double p_true(const TrueFalseLogprobs& lp) {
  if (!std::isfinite(lp.logprob_true) || !std::isfinite(lp.logprob_false))
    raise(ErrorKind::InvalidLogprob, "non-finite true/false logprob");
  double m = lp.logprob_true > lp.logprob_false ? lp.logprob_true : lp.logprob_false;
  double et = std::exp(lp.logprob_true - m);
  double ef = std::exp(lp.logprob_false - m);
  return et / (et + ef);
}

// Keeps scores usable in logs and products: floored fallbacks must not
// produce exact 0 or 1.
inline double clamp_probability(double p) {
  if (p < kProbabilityFloor) return kProbabilityFloor;
  if (p > 1.0 - kProbabilityFloor) return 1.0 - kProbabilityFloor;
  return p;
}

// Fraction of answers equal to target. Inputs are canonical answer strings;
// equality is exact.
inline double vote_confidence(const std::vector<std::string>& answers,
                              const std::string& target) {
  if (answers.empty()) raise(ErrorKind::EmptySample, "no answers to vote over");
  std::size_t count = 0;
  for (const auto& a : answers)
    if (a == target) ++count;
  return (double)count / (double)answers.size();
}

enum class ConfidenceMethod { Monolithic, StatementWise };

inline const char* confidence_method_name(ConfidenceMethod m) {
  return m == ConfidenceMethod::Monolithic ? "monolithic" : "statement_wise";
}

inline ConfidenceMethod parse_confidence_method(std::string_view name) {
  if (name == "monolithic") return ConfidenceMethod::Monolithic;
  if (name == "statement_wise") return ConfidenceMethod::StatementWise;
  raise(ErrorKind::Usage, "unknown confidence method: " + std::string(name));
}

struct ConfidenceReport {
  double reasoning_confidence = 0.0;       // C(r|x)
  double answer_confidence = 0.0;          // C(a|x,r)
  double vote_confidence = 0.0;            // C(a|x)
  double combined = 0.0;                   // C(a,r|x) = C(r|x) * C(a|x,r)
  ConfidenceMethod method = ConfidenceMethod::Monolithic;
  std::optional<std::vector<double>> per_statement;
};

inline double combined_confidence(const ConfidenceReport& report) {
  if (!(report.reasoning_confidence >= 0.0 && report.reasoning_confidence <= 1.0) ||
      !(report.answer_confidence >= 0.0 && report.answer_confidence <= 1.0))
    raise(ErrorKind::InconsistentScores, "confidence fields must be in [0,1]");
  return report.reasoning_confidence * report.answer_confidence;
}

inline ConfidenceReport make_report(ConfidenceMethod method, double reasoning_conf,
                                    double answer_conf, double vote_conf,
                                    std::optional<std::vector<double>> per_statement =
                                        std::nullopt) {
  ConfidenceReport r;
  r.method = method;
  r.reasoning_confidence = reasoning_conf;
  r.answer_confidence = answer_conf;
  r.vote_confidence = vote_conf;
  r.per_statement = std::move(per_statement);
  r.combined = combined_confidence(r);
  return r;
}

// Reads the A/B answer slot from a top-k next-token distribution. Tokens
// whose trimmed text is exactly "A" or "B" count; with several matches the
// highest log-probability wins. A side absent from the list gets the floor
// (min observed logprob - 1.0); with both sides absent the score degrades
// to 0.5 by symmetry.
inline TrueFalseLogprobs extract_true_false(const std::vector<TokenLogprob>& top) {
  if (top.empty()) raise(ErrorKind::GatewayMalformed, "empty top-logprob list");
  double min_lp = top.front().logprob;
  std::optional<double> lp_a;
  std::optional<double> lp_b;
  for (const auto& tl : top) {
    if (tl.logprob < min_lp) min_lp = tl.logprob;
    std::string_view t = trim(tl.token);
    if (t == "A") {
      if (!lp_a || tl.logprob > *lp_a) lp_a = tl.logprob;
    } else if (t == "B") {
      if (!lp_b || tl.logprob > *lp_b) lp_b = tl.logprob;
    }
  }
  double floor = min_lp - 1.0;
  return {lp_a.value_or(floor), lp_b.value_or(floor)};
}

inline double score_true_false_prompt(const std::string& prompt, Gateway& gateway,
                                      int top_k = kDefaultTopK) {
  auto top = gateway.next_token_logprobs({prompt, top_k});
  return clamp_probability(p_true(extract_true_false(top)));
}

// One query judging the whole reasoning path at once, with up to
// max_distractors other sampled reasonings shown first.
inline double monolithic_reasoning_confidence(std::string_view question,
                                              std::string_view reasoning,
                                              const std::vector<std::string>& distractors,
                                              Gateway& gateway, int top_k = kDefaultTopK,
                                              int max_distractors = kDefaultMaxDistractors) {
  if ((int)distractors.size() > max_distractors)
    raise(ErrorKind::InputMalformed, "more distractors than the configured maximum");
  return score_true_false_prompt(render_monolithic_prompt(question, reasoning, distractors),
                                 gateway, top_k);
}

// Per-statement conditional judgments, averaged. Statement t is scored with
// statements 1..t-1 as context, so the loop is inherently sequential.
inline std::pair<double, std::vector<double>> statementwise_reasoning_confidence(
    std::string_view question, const std::vector<std::string>& statements, Gateway& gateway,
    int top_k = kDefaultTopK) {
  if (statements.empty()) raise(ErrorKind::EmptyReasoning, "no statements to score");
  std::vector<double> per_statement;
  per_statement.reserve(statements.size());
  std::vector<std::string> previous;
  for (const auto& statement : statements) {
    per_statement.push_back(score_true_false_prompt(
        render_statementwise_prompt(question, previous, statement), gateway, top_k));
    previous.push_back(statement);
  }
  double sum = 0.0;
  for (double p : per_statement) sum += p;
  return {sum / (double)per_statement.size(), per_statement};
}

inline double answer_confidence(std::string_view question, std::string_view reasoning,
                                std::string_view answer, Gateway& gateway,
                                int top_k = kDefaultTopK) {
  return score_true_false_prompt(render_answer_prompt(question, reasoning, answer), gateway,
                                 top_k);
}

// Splits a reasoning block into statements: newline boundaries first, lines
// under 3 characters merged into their predecessor, and a sentence-level
// fallback when everything lands in one statement.
inline std::vector<std::string> segment_statements(std::string_view reasoning) {
  std::vector<std::string> out;
  for (const auto& line : split_lines(reasoning)) {
    std::string t{trim(line)};
    if (t.empty()) continue;
    if (t.size() < 3 && !out.empty()) {
      out.back().push_back(' ');
      out.back().append(t);
    } else {
      out.push_back(std::move(t));
    }
  }
  if (out.size() == 1) {
    auto sentences = split_sentences(out.front());
    if (sentences.size() > 1) out = std::move(sentences);
  }
  return out;
}

}  // namespace corepo
