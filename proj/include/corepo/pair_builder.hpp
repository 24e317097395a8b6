#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corepo/error.hpp"

namespace corepo {

enum class ScoreKind { CombinedPtrue, MajorityVote };

inline const char* score_kind_name(ScoreKind k) {
  return k == ScoreKind::CombinedPtrue ? "combined_ptrue" : "majority_vote";
}

struct ScoredSample {
  int sample_id;
  double score;  // in [0,1]
  ScoreKind kind;
};

enum class PairRule { CorePo, ScPo };

inline const char* pair_rule_name(PairRule r) { return r == PairRule::CorePo ? "core_po" : "sc_po"; }

struct PreferencePair {
  int winner;  // sample_id
  int loser;   // sample_id
  double score_gap;
  PairRule rule;
};

inline constexpr double kCorePairEpsilon = 1e-6;
inline constexpr int kScPairMinGap = 3;

namespace pair_detail {

inline void check_samples(const std::vector<ScoredSample>& samples, ScoreKind expected) {
  if (samples.size() < 2) raise(ErrorKind::EmptySample, "need at least two scored samples");
  for (const auto& s : samples) {
    if (s.kind != expected)
      raise(ErrorKind::InconsistentScores,
            std::string("expected score kind ") + score_kind_name(expected) + ", got " +
                score_kind_name(s.kind));
    if (!(s.score >= 0.0 && s.score <= 1.0))
      raise(ErrorKind::InconsistentScores, "score outside [0,1]");
  }
}

}  // namespace pair_detail

// Highest-scored sample versus lowest-scored sample; score ties break toward
// the lowest sample_id on both ends. Clamped probabilities can collide
// exactly, so gaps under epsilon yield no pair.
inline std::optional<PreferencePair> build_core_pair(const std::vector<ScoredSample>& samples,
                                                     double epsilon = kCorePairEpsilon) {
  pair_detail::check_samples(samples, ScoreKind::CombinedPtrue);
  const ScoredSample* best = &samples.front();
  const ScoredSample* worst = &samples.front();
  for (const auto& s : samples) {
    if (s.score > best->score || (s.score == best->score && s.sample_id < best->sample_id))
      best = &s;
    if (s.score < worst->score || (s.score == worst->score && s.sample_id < worst->sample_id))
      worst = &s;
  }
  double gap = best->score - worst->score;
  if (gap < epsilon) return std::nullopt;
  return PreferencePair{best->sample_id, worst->sample_id, gap, PairRule::CorePo};
}

// Majority-vote pairing: winner represents the modal answer class, loser the
// least-voted class, and the pair exists only when the vote-count gap is at
// least min_gap. canonical_answers[i] is the answer class of samples[i]; the
// representative of a class is its lowest sample_id, and class ties resolve
// toward the class with the smallest representative.
inline std::optional<PreferencePair> build_sc_pair(
    const std::vector<ScoredSample>& samples, const std::vector<std::string>& canonical_answers,
    int min_gap = kScPairMinGap) {
  pair_detail::check_samples(samples, ScoreKind::MajorityVote);
  if (canonical_answers.size() != samples.size())
    raise(ErrorKind::InconsistentScores, "answers and samples must align");

  struct ClassInfo {
    int count = 0;
    int representative = 0;
  };
  std::map<std::string, ClassInfo> classes;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto [it, inserted] = classes.try_emplace(canonical_answers[i]);
    ClassInfo& c = it->second;
    ++c.count;
    if (inserted || samples[i].sample_id < c.representative)
      c.representative = samples[i].sample_id;
  }
  if (classes.size() < 2) return std::nullopt;

  const ClassInfo* modal = nullptr;
  const ClassInfo* least = nullptr;
  for (const auto& [answer, c] : classes) {
    if (!modal || c.count > modal->count ||
        (c.count == modal->count && c.representative < modal->representative))
      modal = &c;
    if (!least || c.count < least->count ||
        (c.count == least->count && c.representative < least->representative))
      least = &c;
  }
  int gap = modal->count - least->count;
  if (gap < min_gap) return std::nullopt;
  return PreferencePair{modal->representative, least->representative, (double)gap,
                        PairRule::ScPo};
}

}  // namespace corepo
