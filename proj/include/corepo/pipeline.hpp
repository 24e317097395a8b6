#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "corepo/confidence.hpp"
#include "corepo/dpo.hpp"
#include "corepo/gateway.hpp"
#include "corepo/jsonl.hpp"
#include "corepo/pair_builder.hpp"
#include "corepo/selector.hpp"
#include "corepo/synthetic.hpp"
#include "corepo/tasks.hpp"

namespace corepo {

// Pipeline stages behind the command-line front end. Each stage reads JSONL,
// writes JSONL (or CSV/JSON for reports), and drops a run manifest next to
// every artifact it produces. Output order always follows input order, no
// matter how the work was scheduled.

// --- Question files --------------------------------------------------------

struct QuestionRecord {
  std::string id;
  TaskQuestion question;
  ReferenceAnswer reference;
};

namespace pipeline_detail {

[[noreturn]] inline void bad_question(const std::string& path, int line_no,
                                      const std::string& what) {
  raise(ErrorKind::InputMalformed,
        path + ": line " + std::to_string(line_no) + ": " + what);
}

inline std::string require_string(const nlohmann::json& j, const char* field,
                                  const std::string& path, int line_no) {
  if (!j.contains(field) || !j.at(field).is_string())
    bad_question(path, line_no, std::string("missing string field '") + field + "'");
  return j.at(field).get<std::string>();
}

}  // namespace pipeline_detail

inline QuestionRecord parse_question_record(const nlohmann::json& j, TaskKind kind,
                                            const std::string& path, int line_no) {
  using pipeline_detail::bad_question;
  using pipeline_detail::require_string;
  if (!j.is_object()) bad_question(path, line_no, "question record must be a JSON object");

  QuestionRecord q;
  q.id = require_string(j, "id", path, line_no);
  switch (kind) {
    case TaskKind::Numeric:
    case TaskKind::MultipleChoice:
      q.question.text = require_string(j, "text", path, line_no);
      if (j.contains("reference")) q.reference.text = require_string(j, "reference", path, line_no);
      break;
    case TaskKind::Game24: {
      if (!j.contains("numbers") || !j.at("numbers").is_array() || j.at("numbers").size() != 4)
        bad_question(path, line_no, "game24 questions need a 'numbers' array of four integers");
      for (const auto& n : j.at("numbers")) {
        if (!n.is_number_integer())
          bad_question(path, line_no, "game24 'numbers' entries must be integers");
        q.question.numbers.push_back(n.get<std::int64_t>());
      }
      q.reference.numbers = q.question.numbers;
      break;
    }
    case TaskKind::CruxOut:
      q.question.code = require_string(j, "code", path, line_no);
      q.question.input = require_string(j, "input", path, line_no);
      if (j.contains("reference")) q.reference.text = require_string(j, "reference", path, line_no);
      break;
  }
  return q;
}

inline std::vector<QuestionRecord> load_questions(const std::string& path, TaskKind kind) {
  auto raw = read_jsonl(path);
  std::vector<QuestionRecord> out;
  out.reserve(raw.size());
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    int line_no = (int)i + 1;
    QuestionRecord q = parse_question_record(raw[i], kind, path, line_no);
    auto [it, inserted] = seen.emplace(q.id, line_no);
    if (!inserted)
      pipeline_detail::bad_question(path, line_no,
                                    "duplicate question id '" + q.id + "' (first on line " +
                                        std::to_string(it->second) + ")");
    out.push_back(std::move(q));
  }
  return out;
}

// The question text a confidence or judge prompt sees. For word problems it
// is the question itself; for game24 the full instruction the task prompt
// embeds; for crux the code plus the assertion to complete.
inline std::string task_question_text(TaskKind kind, const TaskQuestion& q) {
  switch (kind) {
    case TaskKind::Numeric:
    case TaskKind::MultipleChoice:
      return q.text;
    case TaskKind::Game24:
      return std::string(prompt_detail::kGame24QuestionHead) +
             format_game24_numbers(q.numbers) + std::string(prompt_detail::kGame24QuestionTail);
    case TaskKind::CruxOut:
      return q.code + "\n\nassert f(" + q.input + ") == ??";
  }
  raise(ErrorKind::Internal, "unknown task kind");
}

// --- Ordered parallel scheduling -------------------------------------------

// Runs fn(0..count-1) on up to `workers` threads. fn(i) must touch only its
// own slot; the caller's output array keeps input order by construction.
template <typename Fn>
inline void parallel_for_ordered(std::size_t count, int workers, Fn&& fn) {
  if (count == 0) return;
  if (workers < 1) workers = 1;
  if ((std::size_t)workers > count) workers = (int)count;

  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&] {
    while (!failed.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// --- generate --------------------------------------------------------------

struct GenerateOptions {
  TaskKind task = TaskKind::Numeric;
  std::string questions_path;
  std::string out_path;
  std::string preset = "train";  // train | scale | greedy
  std::uint64_t seed = 0;
  int parallelism = 8;
};

inline SamplingConfig sampling_for_preset(const std::string& preset, std::uint64_t seed) {
  SamplingConfig cfg;
  if (preset == "train")
    cfg = SamplingConfig::train_preset();
  else if (preset == "scale")
    cfg = SamplingConfig::scale_preset();
  else if (preset == "greedy")
    cfg = SamplingConfig::greedy_preset();
  else
    raise(ErrorKind::Usage, "unknown sampling preset: " + preset);
  if (seed != 0) cfg.seed = seed;
  return cfg;
}

inline nlohmann::json generate_options_json(const GenerateOptions& opt) {
  nlohmann::json j;
  j["task"] = task_kind_name(opt.task);
  j["questions"] = opt.questions_path;
  j["out"] = opt.out_path;
  j["preset"] = opt.preset;
  j["parallelism"] = opt.parallelism;
  return j;
}

inline void cmd_generate(const GenerateOptions& opt, Gateway& gateway, std::ostream& err) {
  auto questions = load_questions(opt.questions_path, opt.task);
  SamplingConfig sampling = sampling_for_preset(opt.preset, opt.seed);
  TaskSpec spec = task_spec(opt.task);

  std::vector<std::vector<nlohmann::json>> slots(questions.size());
  parallel_for_ordered(questions.size(), opt.parallelism, [&](std::size_t qi) {
    const QuestionRecord& q = questions[qi];
    std::string prompt = render_task_prompt(spec, q.question);
    std::string question_text = task_question_text(opt.task, q.question);
    auto completions = gateway.generate(prompt, sampling);
    for (std::size_t i = 0; i < completions.size(); ++i) {
      OutputSample s = make_output_sample(opt.task, q.id, (int)i, completions[i].text);
      slots[qi].push_back(
          sample_to_json(s, task_kind_name(opt.task), question_text, prompt));
    }
  });

  std::vector<nlohmann::json> records;
  for (auto& slot : slots)
    for (auto& r : slot) records.push_back(std::move(r));

  if (questions.empty())
    err << "warning: no questions in " << opt.questions_path << "; wrote empty output\n";

  write_jsonl(opt.out_path, records);
  write_manifest(opt.out_path, make_manifest("generate", generate_options_json(opt),
                                             {opt.questions_path}, opt.seed));
}

// --- score -----------------------------------------------------------------

struct ScoreOptions {
  std::string in_path;
  std::string out_path;
  ConfidenceMethod method = ConfidenceMethod::Monolithic;
  int parallelism = 8;
};

inline nlohmann::json score_options_json(const ScoreOptions& opt) {
  nlohmann::json j;
  j["in"] = opt.in_path;
  j["out"] = opt.out_path;
  j["method"] = confidence_method_name(opt.method);
  j["parallelism"] = opt.parallelism;
  return j;
}

inline void cmd_score(const ScoreOptions& opt, Gateway& gateway, std::ostream& err) {
  auto records = read_jsonl(opt.in_path);

  // Group record indices by question, in first-seen order.
  std::vector<std::string> question_order;
  std::map<std::string, std::vector<std::size_t>> by_question;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string qid = records[i].at("question_id").get<std::string>();
    auto [it, inserted] = by_question.try_emplace(qid);
    if (inserted) question_order.push_back(qid);
    it->second.push_back(i);
  }

  std::atomic<int> skipped{0};
  std::atomic<int> unparsed{0};
  parallel_for_ordered(question_order.size(), opt.parallelism, [&](std::size_t gi) {
    const auto& indices = by_question.at(question_order[gi]);

    // Majority vote over this question's parsed samples.
    std::vector<std::string> keys;
    for (std::size_t i : indices) {
      const auto& r = records[i];
      if (r.at("parse_status").get<std::string>() == "ok")
        keys.push_back(r.at("canonical_answer").get<std::string>());
    }

    for (std::size_t i : indices) {
      nlohmann::json& r = records[i];
      if (r.contains("confidence")) {
        skipped.fetch_add(1);
        continue;
      }
      if (r.at("parse_status").get<std::string>() != "ok") {
        unparsed.fetch_add(1);
        continue;
      }
      std::string question = r.at("question_text").get<std::string>();
      std::string reasoning = r.at("reasoning_text").get<std::string>();
      std::string answer = r.at("answer_text").get<std::string>();
      std::string key = r.at("canonical_answer").get<std::string>();

      double reasoning_conf = 0.0;
      std::optional<std::vector<double>> per_statement;
      int reasoning_calls = 0;
      if (opt.method == ConfidenceMethod::Monolithic) {
        // Distractors: the question's other parsed reasonings, in sample
        // order, up to the configured maximum.
        std::vector<std::string> distractors;
        for (std::size_t j : indices) {
          if (j == i) continue;
          if ((int)distractors.size() >= kDefaultMaxDistractors) break;
          const auto& other = records[j];
          if (other.at("parse_status").get<std::string>() == "ok")
            distractors.push_back(other.at("reasoning_text").get<std::string>());
        }
        reasoning_conf =
            monolithic_reasoning_confidence(question, reasoning, distractors, gateway);
        reasoning_calls = 1;
      } else {
        auto statements = r.at("statements").get<std::vector<std::string>>();
        auto [mean, per] = statementwise_reasoning_confidence(question, statements, gateway);
        reasoning_conf = mean;
        per_statement = std::move(per);
        reasoning_calls = (int)statements.size();
      }
      double answer_conf = answer_confidence(question, reasoning, answer, gateway);
      double vote = vote_confidence(keys, key);

      ConfidenceReport report =
          make_report(opt.method, reasoning_conf, answer_conf, vote, std::move(per_statement));
      r["confidence"] = confidence_to_json(report);
      r["gateway_calls"] = {{"reasoning", reasoning_calls}, {"answer", 1}};
    }
  });

  if (skipped.load() > 0)
    err << "notice: skipped " << skipped.load() << " already-scored record"
        << (skipped.load() == 1 ? "" : "s") << "\n";
  if (unparsed.load() > 0)
    err << "notice: left " << unparsed.load() << " unparsed record"
        << (unparsed.load() == 1 ? "" : "s") << " unscored\n";

  write_jsonl(opt.out_path, records);
  write_manifest(opt.out_path,
                 make_manifest("score", score_options_json(opt), {opt.in_path}, 0));
}

// --- pairs -----------------------------------------------------------------

struct PairsOptions {
  std::string in_path;
  std::string out_path;
  PairRule rule = PairRule::CorePo;
};

inline nlohmann::json pairs_options_json(const PairsOptions& opt) {
  nlohmann::json j;
  j["in"] = opt.in_path;
  j["out"] = opt.out_path;
  j["rule"] = pair_rule_name(opt.rule);
  return j;
}

inline void cmd_pairs(const PairsOptions& opt, std::ostream& err) {
  auto records = read_jsonl(opt.in_path);

  std::vector<std::string> question_order;
  std::map<std::string, std::vector<std::size_t>> by_question;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string qid = records[i].at("question_id").get<std::string>();
    auto [it, inserted] = by_question.try_emplace(qid);
    if (inserted) question_order.push_back(qid);
    it->second.push_back(i);
  }

  std::vector<nlohmann::json> pairs;
  int skipped_questions = 0;
  for (const auto& qid : question_order) {
    const auto& indices = by_question.at(qid);

    std::vector<ScoredSample> scored;
    std::vector<std::string> answers;
    std::vector<std::size_t> record_of;  // scored[k] came from records[record_of[k]]
    for (std::size_t i : indices) {
      const auto& r = records[i];
      if (r.at("parse_status").get<std::string>() != "ok" || !r.contains("confidence")) continue;
      const auto& conf = r.at("confidence");
      int sample_index = r.at("sample_index").get<int>();
      if (opt.rule == PairRule::CorePo)
        scored.push_back(
            {sample_index, conf.at("combined").get<double>(), ScoreKind::CombinedPtrue});
      else
        scored.push_back(
            {sample_index, conf.at("vote_confidence").get<double>(), ScoreKind::MajorityVote});
      answers.push_back(r.at("canonical_answer").get<std::string>());
      record_of.push_back(i);
    }
    if (scored.size() < 2) {
      ++skipped_questions;
      continue;
    }

    std::optional<PreferencePair> pair;
    if (opt.rule == PairRule::CorePo)
      pair = build_core_pair(scored);
    else
      pair = build_sc_pair(scored, answers);
    if (!pair) {
      ++skipped_questions;
      continue;
    }

    auto record_for = [&](int sample_index) -> const nlohmann::json& {
      for (std::size_t k = 0; k < scored.size(); ++k)
        if (scored[k].sample_id == sample_index) return records[record_of[k]];
      raise(ErrorKind::Internal, "pair references a sample that was not scored");
    };
    const nlohmann::json& winner = record_for(pair->winner);
    const nlohmann::json& loser = record_for(pair->loser);

    nlohmann::json p;
    p["question_id"] = qid;
    p["rule"] = pair_rule_name(pair->rule);
    p["prompt"] = winner.at("prompt").get<std::string>();
    p["chosen"] = winner.at("raw_text").get<std::string>();
    p["rejected"] = loser.at("raw_text").get<std::string>();
    p["winner_index"] = pair->winner;
    p["loser_index"] = pair->loser;
    p["score_gap"] = pair->score_gap;
    pairs.push_back(std::move(p));
  }

  if (skipped_questions > 0)
    err << "notice: " << skipped_questions << " question"
        << (skipped_questions == 1 ? "" : "s") << " produced no pair\n";

  write_jsonl(opt.out_path, pairs);
  write_manifest(opt.out_path,
                 make_manifest("pairs", pairs_options_json(opt), {opt.in_path}, 0));
}

// --- train-toy -------------------------------------------------------------

struct TrainToyOptions {
  int steps = 200;
  int samples_per_step = 8;
  std::string scorer = "confidence";  // confidence | answer_only
  double learning_rate = 0.5;
  double beta = 0.1;
  std::uint64_t seed = 0;
  std::string log_path;
  std::string policy_path;  // optional
};

inline nlohmann::json train_toy_options_json(const TrainToyOptions& opt) {
  nlohmann::json j;
  j["steps"] = opt.steps;
  j["samples_per_step"] = opt.samples_per_step;
  j["scorer"] = opt.scorer;
  j["learning_rate"] = opt.learning_rate;
  j["beta"] = opt.beta;
  j["log"] = opt.log_path;
  if (!opt.policy_path.empty()) j["policy"] = opt.policy_path;
  return j;
}

inline void cmd_train_toy(const TrainToyOptions& opt, std::ostream& err) {
  if (opt.steps < 0) raise(ErrorKind::Usage, "steps must be nonnegative");
  if (opt.samples_per_step < 2) raise(ErrorKind::Usage, "samples-per-step must be at least 2");

  ToyScorer scorer;
  if (opt.scorer == "confidence")
    scorer = synthetic::confidence_score;
  else if (opt.scorer == "answer_only")
    scorer = synthetic::answer_only_score;
  else
    raise(ErrorKind::Usage, "unknown scorer: " + opt.scorer);

  DpoConfig cfg;
  cfg.beta = opt.beta;
  cfg.learning_rate = opt.learning_rate;
  cfg.seed = opt.seed;
  validate_dpo_config(cfg);

  std::vector<nlohmann::json> log;
  ToyPolicy policy = synthetic::initial_policy();
  const ToyPolicy reference = synthetic::initial_policy();

  if (opt.steps == 0) {
    err << "notice: zero training steps requested; nothing to do\n";
  } else {
    std::mt19937_64 rng(cfg.seed);
    ToySampler sampler = synthetic::make_sampler(opt.samples_per_step);
    double p_correct_initial =
        synthetic::sequence_probability(policy, synthetic::kCorrectReasoningSeq);
    double p_lucky_initial = synthetic::sequence_probability(policy, synthetic::kLuckyAnswerSeq);

    int applied = 0;
    int pairs_formed = 0;
    for (int step = 0; step < opt.steps; ++step) {
      StepReport report = online_dpo_step(policy, reference, sampler, scorer, cfg, rng);
      nlohmann::json rec;
      rec["step"] = step;
      rec["applied"] = report.applied;
      if (!report.applied) rec["noop_reason"] = report.noop_reason;
      if (report.winner_index >= 0) {
        rec["winner_index"] = report.winner_index;
        rec["loser_index"] = report.loser_index;
        rec["loss_before"] = report.loss_before;
        rec["loss_after"] = report.loss_after;
        rec["margin_before"] = report.margin_before;
        rec["margin_after"] = report.margin_after;
        ++pairs_formed;
      }
      rec["scores"] = report.scores;
      log.push_back(std::move(rec));
      if (report.applied) ++applied;
    }

    nlohmann::json summary;
    summary["summary"] = true;
    summary["steps"] = opt.steps;
    summary["applied_steps"] = applied;
    summary["pairs_formed"] = pairs_formed;
    summary["p_correct_reasoning_initial"] = p_correct_initial;
    summary["p_correct_reasoning_final"] =
        synthetic::sequence_probability(policy, synthetic::kCorrectReasoningSeq);
    summary["p_lucky_answer_initial"] = p_lucky_initial;
    summary["p_lucky_answer_final"] =
        synthetic::sequence_probability(policy, synthetic::kLuckyAnswerSeq);
    log.push_back(std::move(summary));

    if (pairs_formed == 0)
      err << "notice: no preference pairs formed; policy unchanged\n";
  }

  write_jsonl(opt.log_path, log);
  write_manifest(opt.log_path,
                 make_manifest("train-toy", train_toy_options_json(opt), {}, opt.seed));
  if (!opt.policy_path.empty()) {
    write_text_file(opt.policy_path, policy.to_json().dump(2) + "\n");
    write_manifest(opt.policy_path,
                   make_manifest("train-toy", train_toy_options_json(opt), {}, opt.seed));
  }
}

// --- eval ------------------------------------------------------------------

struct EvalOptions {
  TaskKind task = TaskKind::Numeric;
  std::string questions_path;
  std::string in_path;  // scored samples; unused by the greedy selector
  std::string out_path;
  std::string selector = "sc";  // sc | ptrue | best_answer | best_reasoning | greedy
  int best_of_k = kDefaultBestOfK;
  int parallelism = 8;
};

inline nlohmann::json eval_options_json(const EvalOptions& opt) {
  nlohmann::json j;
  j["task"] = task_kind_name(opt.task);
  j["questions"] = opt.questions_path;
  if (!opt.in_path.empty()) j["in"] = opt.in_path;
  j["out"] = opt.out_path;
  j["selector"] = opt.selector;
  j["k"] = opt.best_of_k;
  return j;
}

inline void cmd_eval(const EvalOptions& opt, Gateway* gateway, std::ostream& err) {
  bool greedy = opt.selector == "greedy";
  if (opt.selector != "sc" && opt.selector != "ptrue" && opt.selector != "best_answer" &&
      opt.selector != "best_reasoning" && !greedy)
    raise(ErrorKind::Usage, "unknown selector: " + opt.selector);
  if (greedy && gateway == nullptr)
    raise(ErrorKind::Usage, "the greedy selector needs a gateway endpoint");
  if (!greedy && opt.in_path.empty())
    raise(ErrorKind::Usage, "selector '" + opt.selector + "' needs scored samples (--in)");

  auto questions = load_questions(opt.questions_path, opt.task);
  std::map<std::string, const QuestionRecord*> question_by_id;
  for (const auto& q : questions) question_by_id[q.id] = &q;

  struct Row {
    bool evaluated = false;
    std::string question_id;
    int chosen_sample_index = -1;
    bool correct = false;
  };
  std::vector<Row> rows(questions.size());

  if (greedy) {
    TaskSpec spec = task_spec(opt.task);
    parallel_for_ordered(questions.size(), opt.parallelism, [&](std::size_t qi) {
      const QuestionRecord& q = questions[qi];
      std::string text = select_greedy(*gateway, render_task_prompt(spec, q.question));
      OutputSample s = make_output_sample(opt.task, q.id, 0, text);
      rows[qi] = {true, q.id, 0, answer_correct(opt.task, s, q.reference)};
    });
  } else {
    auto records = read_jsonl(opt.in_path);
    std::map<std::string, std::vector<std::size_t>> by_question;
    for (std::size_t i = 0; i < records.size(); ++i)
      by_question[records[i].at("question_id").get<std::string>()].push_back(i);

    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
      const QuestionRecord& q = questions[qi];
      auto it = by_question.find(q.id);
      if (it == by_question.end()) continue;

      std::vector<VotedSample> voted;
      std::vector<ConfidenceSample> scored;
      std::map<int, std::size_t> record_by_sample;
      for (std::size_t i : it->second) {
        const auto& r = records[i];
        if (r.at("parse_status").get<std::string>() != "ok") continue;
        int sample_index = r.at("sample_index").get<int>();
        record_by_sample[sample_index] = i;
        voted.push_back({sample_index, r.at("canonical_answer").get<std::string>()});
        if (r.contains("confidence"))
          scored.push_back({sample_index, confidence_from_json(r.at("confidence"))});
      }

      int chosen = -1;
      if (opt.selector == "sc") {
        if (voted.empty()) continue;
        chosen = select_sc(voted);
      } else {
        if (scored.empty()) continue;
        if (opt.selector == "ptrue")
          chosen = select_ptrue(scored);
        else
          chosen = select_best_by(scored,
                                  opt.selector == "best_answer" ? SelectionMetric::AnswerLevel
                                                                : SelectionMetric::ReasoningLevel,
                                  opt.best_of_k);
      }

      OutputSample s = sample_from_json(records[record_by_sample.at(chosen)]);
      rows[qi] = {true, q.id, chosen, answer_correct(opt.task, s, q.reference)};
    }
  }

  int evaluated = 0;
  int correct = 0;
  nlohmann::json details = nlohmann::json::array();
  for (std::size_t qi = 0; qi < questions.size(); ++qi) {
    if (!rows[qi].evaluated) continue;
    ++evaluated;
    if (rows[qi].correct) ++correct;
    nlohmann::json d;
    d["question_id"] = rows[qi].question_id;
    d["chosen_sample_index"] = rows[qi].chosen_sample_index;
    d["correct"] = rows[qi].correct;
    details.push_back(std::move(d));
  }
  int excluded = (int)questions.size() - evaluated;
  if (excluded > 0)
    err << "notice: " << excluded << " question" << (excluded == 1 ? "" : "s")
        << " had no usable samples\n";

  nlohmann::json report;
  report["selector"] = opt.selector;
  report["task"] = task_kind_name(opt.task);
  report["total_questions"] = (int)questions.size();
  report["evaluated"] = evaluated;
  report["excluded"] = excluded;
  report["correct"] = correct;
  report["accuracy"] = evaluated == 0 ? 0.0 : (double)correct / (double)evaluated;
  report["details"] = std::move(details);
  write_text_file(opt.out_path, report.dump(2) + "\n");

  std::vector<std::string> inputs = {opt.questions_path};
  if (!greedy) inputs.push_back(opt.in_path);
  write_manifest(opt.out_path, make_manifest("eval", eval_options_json(opt), inputs, 0));
}

// --- judge -----------------------------------------------------------------

struct JudgeOptions {
  TaskKind task = TaskKind::Numeric;
  std::string questions_path;
  std::string in_path;
  std::string out_path;
  int parallelism = 8;
};

inline nlohmann::json judge_options_json(const JudgeOptions& opt) {
  nlohmann::json j;
  j["task"] = task_kind_name(opt.task);
  j["questions"] = opt.questions_path;
  j["in"] = opt.in_path;
  j["out"] = opt.out_path;
  return j;
}

// Adds answer_correct and reasoning_verdict to every parsed record. Wrong
// answers are judged incorrect without a gateway call; correct answers get
// one judge query each.
inline void cmd_judge(const JudgeOptions& opt, Gateway& gateway, std::ostream& err) {
  auto questions = load_questions(opt.questions_path, opt.task);
  std::map<std::string, const QuestionRecord*> question_by_id;
  for (const auto& q : questions) question_by_id[q.id] = &q;

  auto records = read_jsonl(opt.in_path);
  std::atomic<int> judge_errors{0};
  parallel_for_ordered(records.size(), opt.parallelism, [&](std::size_t i) {
    nlohmann::json& r = records[i];
    if (r.at("parse_status").get<std::string>() != "ok") return;
    auto it = question_by_id.find(r.at("question_id").get<std::string>());
    if (it == question_by_id.end())
      raise(ErrorKind::InputMalformed,
            "sample references unknown question id: " + r.at("question_id").get<std::string>());

    OutputSample s = sample_from_json(r);
    bool correct = answer_correct(opt.task, s, it->second->reference);
    JudgeVerdict verdict = judge_reasoning(task_question_text(opt.task, it->second->question),
                                           s.reasoning_text, correct, gateway);
    r["answer_correct"] = correct;
    r["reasoning_verdict"] = judge_verdict_name(verdict);
    if (verdict == JudgeVerdict::JudgeError) judge_errors.fetch_add(1);
  });

  if (judge_errors.load() > 0)
    err << "notice: " << judge_errors.load() << " record"
        << (judge_errors.load() == 1 ? "" : "s") << " got an unusable judge verdict\n";

  write_jsonl(opt.out_path, records);
  write_manifest(opt.out_path, make_manifest("judge", judge_options_json(opt),
                                             {opt.questions_path, opt.in_path}, 0));
}

// --- curves ----------------------------------------------------------------

struct CurvesOptions {
  std::string in_path;
  std::string out_path;
  int bins = 10;
};

inline nlohmann::json curves_options_json(const CurvesOptions& opt) {
  nlohmann::json j;
  j["in"] = opt.in_path;
  j["out"] = opt.out_path;
  j["bins"] = opt.bins;
  return j;
}

// Bins judged samples by answer confidence and writes per-bin answer and
// reasoning accuracies as CSV. Unparsed, unscored, and judge-error records
// are excluded and counted.
inline void cmd_curves(const CurvesOptions& opt, std::ostream& err) {
  auto records = read_jsonl(opt.in_path);
  std::vector<JudgedSample> samples;
  int excluded = 0;
  for (const auto& r : records) {
    if (r.at("parse_status").get<std::string>() != "ok" || !r.contains("confidence") ||
        !r.contains("reasoning_verdict")) {
      ++excluded;
      continue;
    }
    std::string verdict = r.at("reasoning_verdict").get<std::string>();
    if (verdict == "judge_error") {
      ++excluded;
      continue;
    }
    samples.push_back({r.at("confidence").at("answer_confidence").get<double>(),
                       r.at("answer_correct").get<bool>(), verdict == "correct"});
  }
  if (excluded > 0)
    err << "notice: excluded " << excluded << " record" << (excluded == 1 ? "" : "s")
        << " without a usable verdict\n";

  auto curve = confidence_accuracy_curve(samples, opt.bins);
  write_text_file(opt.out_path, curve_csv(curve));
  write_manifest(opt.out_path,
                 make_manifest("curves", curves_options_json(opt), {opt.in_path}, 0));
}

}  // namespace corepo
