#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <string>
#include <vector>

#include "corepo/confidence.hpp"
#include "corepo/error.hpp"
#include "corepo/gateway.hpp"

namespace corepo {

// Inference-time selection over a batch of samples for one question, plus the
// confidence-vs-accuracy curve used for observational analysis.

struct VotedSample {
  int sample_id = 0;
  std::string answer_key;  // canonical answer class
};

struct ConfidenceSample {
  int sample_id = 0;
  ConfidenceReport report;
};

inline constexpr int kDefaultBestOfK = 16;

// Majority voting: a sample whose answer class is modal; the lowest
// sample_id among samples of maximal class size breaks every tie, so all
// singleton classes degrade to the lowest id overall.
inline int select_sc(const std::vector<VotedSample>& samples) {
  if (samples.empty()) raise(ErrorKind::EmptySample, "select_sc needs samples");
  std::size_t best_count = 0;
  for (const auto& s : samples) {
    std::size_t count = 0;
    for (const auto& o : samples)
      if (o.answer_key == s.answer_key) ++count;
    best_count = std::max(best_count, count);
  }
  int chosen = -1;
  for (const auto& s : samples) {
    std::size_t count = 0;
    for (const auto& o : samples)
      if (o.answer_key == s.answer_key) ++count;
    if (count == best_count && (chosen < 0 || s.sample_id < chosen)) chosen = s.sample_id;
  }
  return chosen;
}

namespace selector_detail {

template <typename Metric>
int argmax_by(const std::vector<ConfidenceSample>& samples, Metric metric) {
  int chosen = -1;
  double best = 0.0;
  for (const auto& s : samples) {
    double v = metric(s.report);
    if (v < 0.0 || v > 1.0)
      raise(ErrorKind::InconsistentScores, "selector metric outside [0, 1]");
    if (chosen < 0 || v > best || (v == best && s.sample_id < chosen)) {
      chosen = s.sample_id;
      best = v;
    }
  }
  return chosen;
}

}  // namespace selector_detail

// Argmax of combined confidence; ties go to the lowest sample_id.
inline int select_ptrue(const std::vector<ConfidenceSample>& samples) {
  if (samples.empty()) raise(ErrorKind::EmptySample, "select_ptrue needs samples");
  return selector_detail::argmax_by(samples,
                                    [](const ConfidenceReport& r) { return r.combined; });
}

enum class SelectionMetric { AnswerLevel, ReasoningLevel };

inline const char* selection_metric_name(SelectionMetric m) {
  switch (m) {
    case SelectionMetric::AnswerLevel: return "answer_level";
    case SelectionMetric::ReasoningLevel: return "reasoning_level";
  }
  return "unknown";
}

inline SelectionMetric parse_selection_metric(std::string_view name) {
  if (name == "answer_level") return SelectionMetric::AnswerLevel;
  if (name == "reasoning_level") return SelectionMetric::ReasoningLevel;
  raise(ErrorKind::Usage, "unknown selection metric: " + std::string(name));
}

// Best-of-k by one confidence metric. Only the k lowest-numbered samples
// compete; ties go to the lowest sample_id.
inline int select_best_by(const std::vector<ConfidenceSample>& samples,
                          SelectionMetric metric, int k = kDefaultBestOfK) {
  if (samples.empty()) raise(ErrorKind::EmptySample, "select_best_by needs samples");
  if (k < 1) raise(ErrorKind::Usage, "select_best_by needs k >= 1");

  std::vector<ConfidenceSample> pool = samples;
  std::sort(pool.begin(), pool.end(),
            [](const ConfidenceSample& a, const ConfidenceSample& b) {
              return a.sample_id < b.sample_id;
            });
  if ((int)pool.size() > k) pool.resize((std::size_t)k);

  auto answer = [](const ConfidenceReport& r) { return r.answer_confidence; };
  auto reasoning = [](const ConfidenceReport& r) { return r.reasoning_confidence; };
  return metric == SelectionMetric::AnswerLevel
             ? selector_detail::argmax_by(pool, answer)
             : selector_detail::argmax_by(pool, reasoning);
}

// Greedy decoding is one n=1, T=0 completion through the gateway.
inline std::string select_greedy(Gateway& gateway, const std::string& prompt) {
  auto completions = gateway.generate(prompt, SamplingConfig::greedy_preset());
  if (completions.empty())
    raise(ErrorKind::GatewayMalformed, "greedy generation returned no completion");
  return completions.front().text;
}

// --- Confidence vs. accuracy curve -----------------------------------------

struct JudgedSample {
  double bin_score = 0.0;  // confidence used for binning, in [0, 1]
  bool answer_correct = false;
  bool reasoning_correct = false;
};

struct CurveBin {
  double lo = 0.0;
  double hi = 0.0;
  double answer_acc = 0.0;  // 0 when the bin is empty
  double reason_acc = 0.0;
  int count = 0;
};

// Membership rule shared with any recomputation: bins are equal-width over
// [0, 1], closed on the left, and the last bin closed on both ends.
inline bool curve_bin_contains(double lo, double hi, bool last, double score) {
  if (score < lo) return false;
  return last ? score <= hi : score < hi;
}

inline std::vector<CurveBin> confidence_accuracy_curve(
    const std::vector<JudgedSample>& samples, int bins = 10) {
  if (bins < 1) raise(ErrorKind::Usage, "curve needs at least one bin");
  for (const auto& s : samples)
    if (!(s.bin_score >= 0.0 && s.bin_score <= 1.0))
      raise(ErrorKind::InconsistentScores, "bin score outside [0, 1]");

  std::vector<CurveBin> out((std::size_t)bins);
  for (int i = 0; i < bins; ++i) {
    out[(std::size_t)i].lo = (double)i / bins;
    out[(std::size_t)i].hi = (double)(i + 1) / bins;
  }
  std::vector<int> answer_sum((std::size_t)bins, 0);
  std::vector<int> reason_sum((std::size_t)bins, 0);
  for (const auto& s : samples) {
    for (int i = 0; i < bins; ++i) {
      auto& b = out[(std::size_t)i];
      if (!curve_bin_contains(b.lo, b.hi, i == bins - 1, s.bin_score)) continue;
      ++b.count;
      answer_sum[(std::size_t)i] += s.answer_correct ? 1 : 0;
      reason_sum[(std::size_t)i] += s.reasoning_correct ? 1 : 0;
      break;
    }
  }
  for (int i = 0; i < bins; ++i) {
    auto& b = out[(std::size_t)i];
    if (b.count > 0) {
      b.answer_acc = (double)answer_sum[(std::size_t)i] / b.count;
      b.reason_acc = (double)reason_sum[(std::size_t)i] / b.count;
    }
  }
  return out;
}

namespace selector_detail {

inline std::string shortest_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace selector_detail

inline std::string curve_csv(const std::vector<CurveBin>& curve) {
  std::string out = "bin_lo,bin_hi,answer_acc,reason_acc,count\n";
  for (const auto& b : curve) {
    out += selector_detail::shortest_double(b.lo);
    out += ',';
    out += selector_detail::shortest_double(b.hi);
    out += ',';
    out += selector_detail::shortest_double(b.answer_acc);
    out += ',';
    out += selector_detail::shortest_double(b.reason_acc);
    out += ',';
    out += std::to_string(b.count);
    out += '\n';
  }
  return out;
}

}  // namespace corepo
