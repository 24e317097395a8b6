// Release acceptance runner. Each gate states one end-to-end claim about
// the library and checks it against an independent oracle where one exists:
// finite differences for the DPO gradient, a brute-force solver for the
// 24-game verifier, golden files for prompt rendering, and a from-scratch
// recount for the confidence curve. Prints one PASS/FAIL line per gate and
// exits nonzero if any gate fails. Wall-clock budgets are asserted inside
// the gates that carry them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corepo/cli.hpp"
#include "corepo/mock_server.hpp"
#include "corepo/synthetic.hpp"

#include "../support/fd_oracle.hpp"
#include "../support/game24_oracle.hpp"
#include "../support/golden_inputs.hpp"

using namespace corepo;
namespace fs = std::filesystem;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_under(Clock::time_point start, double budget_s, const std::string& gate) {
  double t = seconds_since(start);
  require(t < budget_s,
          gate + " took " + fmt(t) + " s, over the " + fmt(budget_s) + " s budget");
}

// --- CLI helpers (mirrors how a shell would drive the tool) ----------------

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("corepo_acceptance_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string completion_text(const std::string& reasoning, const std::string& value) {
  return "**Reasoning:** " + reasoning + "\n\n**Final answer:** \"The answer is $" + value +
         "$\"";
}

MockFixture logprob_fixture(double lp_a, double lp_b) {
  MockFixture f;
  f.logprobs = {{"A", lp_a}, {"B", lp_b}};
  return f;
}

std::string jsonl_of(const std::vector<nlohmann::json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

// --- Gate 1: analytic DPO gradient vs central finite differences -----------

void gate_gradient_vs_finite_differences() {
  auto start = Clock::now();
  std::mt19937_64 rng(101);
  const int kInstances = 128;
  double worst = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    fd::RandomInstance inst = fd::random_instance(rng);
    GradTable analytic =
        dpo_grad(inst.policy, inst.reference, inst.winner, inst.loser, inst.cfg);
    GradTable numeric =
        fd::fd_grad(inst.policy, inst.reference, inst.winner, inst.loser, inst.cfg);
    worst = std::max(worst, fd::max_rel_error(analytic, numeric));
  }
  require(worst < 1e-4, "worst gradient relative error " + fmt(worst) +
                            " over " + std::to_string(kInstances) + " instances");
  require_under(start, 10.0, "gradient check");
}

// --- Gate 2: one backtracked step raises the margin; zero ratios give ln 2 --

void gate_step_semantics() {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 200; ++i) {
    fd::RandomInstance inst = fd::random_instance(rng);
    ToyPolicy policy = inst.policy;
    UpdateResult r =
        apply_pair_update(policy, inst.reference, inst.winner, inst.loser, inst.cfg);
    require(r.applied, "step " + std::to_string(i) + " found no descent");
    require(r.margin_after > r.margin_before,
            "margin did not increase on instance " + std::to_string(i) + ": " +
                fmt(r.margin_before) + " -> " + fmt(r.margin_after));
    require(r.loss_after < r.loss_before,
            "loss did not decrease on instance " + std::to_string(i));
  }

  DpoConfig cfg;
  double at_zero = dpo_loss({0.0, 0.0, 0.0, 0.0}, cfg);
  require(std::abs(at_zero - std::log(2.0)) <= 1e-12,
          "loss at zero logprobs is " + fmt(at_zero) + ", expected ln 2");
  // Equal policy/reference logprobs cancel to the same point.
  double at_cancel = dpo_loss({-1.25, -0.5, -1.25, -0.5}, cfg);
  require(std::abs(at_cancel - std::log(2.0)) <= 1e-12,
          "loss with zero log-ratios is " + fmt(at_cancel) + ", expected ln 2");
}

// --- Gate 3: confidence-scored self-training separates the two families ----

void gate_toy_training_separation() {
  auto start = Clock::now();
  DpoConfig cfg;
  cfg.beta = 0.1;
  cfg.learning_rate = 0.5;
  cfg.seed = 7;

  auto conf = synthetic::run_training(synthetic::confidence_score, 200, 8, cfg);
  require(conf.p_correct_final >= 2.0 * conf.p_correct_initial,
          "confidence scorer only moved p(correct reasoning) from " +
              fmt(conf.p_correct_initial) + " to " + fmt(conf.p_correct_final));
  require(conf.p_correct_final > 2.0 * conf.p_lucky_final,
          "confidence scorer did not separate the families: correct " +
              fmt(conf.p_correct_final) + " vs lucky " + fmt(conf.p_lucky_final));

  // An answer-only scorer gives both correct-answer families the same score,
  // so the extreme-score pairing cannot even form a pair between them.
  double s_correct = synthetic::answer_only_score(synthetic::kCorrectReasoningSeq);
  double s_lucky = synthetic::answer_only_score(synthetic::kLuckyAnswerSeq);
  require(s_correct == s_lucky, "answer-only scores differ between the families");
  std::vector<ScoredSample> two = {{0, s_correct, ScoreKind::CombinedPtrue},
                                   {1, s_lucky, ScoreKind::CombinedPtrue}};
  require(!build_core_pair(two).has_value(),
          "a pair formed from the two tied correct-answer families");

  auto ans = synthetic::run_training(synthetic::answer_only_score, 200, 8, cfg);
  double ratio = ans.p_correct_final / ans.p_lucky_final;
  require(ratio < 2.0 && ratio > 0.5,
          "answer-only training separated the families anyway: correct " +
              fmt(ans.p_correct_final) + " vs lucky " + fmt(ans.p_lucky_final));
  require_under(start, 60.0, "toy training");
}

// --- Gate 4: confidence algebra ---------------------------------------------

void gate_confidence_algebra() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int i = 0; i < 500; ++i) {
    double r = unit(rng);
    double a = unit(rng);
    auto method = i % 2 ? ConfidenceMethod::Monolithic : ConfidenceMethod::StatementWise;
    auto rep = make_report(method, r, a, unit(rng));
    require(std::abs(rep.combined - r * a) <= 1e-12,
            "combined " + fmt(rep.combined) + " != product " + fmt(r * a));
  }

  {
    MockGateway gw;
    std::vector<std::string> statements = {"Line one holds.", "Line two holds.",
                                           "Line three holds.", "Line four holds."};
    gw.push_logprobs({{"A", -0.1}, {"B", -1.2}});
    gw.push_logprobs({{"A", -0.8}, {"B", -0.4}});
    gw.push_logprobs({{"A", -2.0}, {"B", -0.2}});
    gw.push_logprobs({{"A", -0.3}, {"B", -0.9}});
    auto [mean, per] = statementwise_reasoning_confidence("q", statements, gw);
    require(per.size() == statements.size(), "one score per statement");
    double sum = 0.0;
    for (double p : per) sum += p;
    require(std::abs(mean - sum / (double)per.size()) <= 1e-12,
            "statement-wise mean " + fmt(mean) + " != average of per-statement scores");
    require(gw.logprob_calls() == (int)statements.size(), "one gateway call per statement");
  }

  std::uniform_real_distribution<double> lp(-8.0, 0.0);
  for (int i = 0; i < 500; ++i) {
    double la = lp(rng);
    double lb = lp(rng);
    double p = p_true({la, lb});
    double q = p_true({lb, la});
    require(std::abs(p + q - 1.0) <= 1e-12, "p_true not symmetric: " + fmt(p + q));
    require(p > 0.0 && p < 1.0, "p_true out of range: " + fmt(p));
  }

  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> votes;
    int n = 1 + (int)(rng() % 12);
    for (int j = 0; j < n; ++j) votes.push_back(std::to_string(rng() % 5));
    std::set<std::string> classes(votes.begin(), votes.end());
    double total = 0.0;
    for (const auto& c : classes) total += vote_confidence(votes, c);
    require(std::abs(total - 1.0) <= 1e-12,
            "vote shares sum to " + fmt(total) + " over " + std::to_string(n) + " votes");
  }
}

// --- Gate 5: 24-game verifier vs the brute-force solver ---------------------

void gate_game24_vs_oracle() {
  auto start = Clock::now();
  std::mt19937_64 rng(505);
  auto rand_num = [&] { return (std::int64_t)(1 + rng() % 13); };

  {
    auto v = verify_game24("(4 + 8) * (6 - 4) = 24", {4, 4, 6, 8});
    require(v.valid && v.reason == Game24Reason::Valid,
            "the worked example was rejected with reason " +
                std::string(game24_reason_name(v.reason)));
  }

  int solvable = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::int64_t> nums = {rand_num(), rand_num(), rand_num(), rand_num()};
    auto sol = oracle24::solve(nums);
    if (!sol) continue;
    ++solvable;
    auto v = verify_game24(*sol, nums);
    require(v.valid && v.reason == Game24Reason::Valid,
            "solver expression rejected: " + *sol + " (reason " +
                game24_reason_name(v.reason) + ")");
  }
  require(solvable > 100, "only " + std::to_string(solvable) +
                              " of 200 random multisets were solvable; generator suspect");

  // 1000 invalid expressions across the failure categories, each expected to
  // land on its exact reason code.
  const char ops[] = {'+', '-', '*'};
  auto pick_op = [&] { return ops[rng() % 3]; };
  auto build = [](const std::vector<std::int64_t>& n, char o0, char o1, char o2) {
    auto s = [](std::int64_t v) { return std::to_string(v); };
    return "(" + s(n[0]) + " " + o0 + " " + s(n[1]) + ") " + o1 + " (" + s(n[2]) + " " +
           o2 + " " + s(n[3]) + ")";
  };
  auto eval = [](std::int64_t a, std::int64_t b, char op) {
    return op == '+' ? a + b : op == '-' ? a - b : a * b;
  };
  int fuzzed = 0;
  while (fuzzed < 1000) {
    std::vector<std::int64_t> nums = {rand_num(), rand_num(), rand_num(), rand_num()};
    int category = fuzzed % 4;
    std::string expr;
    Game24Reason expected;
    if (category == 0) {
      // Malformed: break the grammar itself.
      std::string base = build(nums, pick_op(), pick_op(), pick_op());
      switch (rng() % 5) {
        case 0: expr = base + " +"; break;
        case 1: expr = "(" + base; break;
        case 2: expr = base + ")"; break;
        case 3: expr = base; expr[expr.find_first_of("0123456789")] = '#'; break;
        default: expr = "twenty four"; break;
      }
      expected = Game24Reason::ParseError;
    } else if (category == 1) {
      // Wrong multiset: one leaf nudged off the given numbers.
      std::vector<std::int64_t> other = nums;
      other[rng() % 4] += 1;
      expr = build(other, pick_op(), pick_op(), pick_op());
      expected = Game24Reason::MultisetMismatch;
    } else if (category == 2) {
      // Right multiset, wrong value. Division-free operators keep the value
      // an integer we can check directly; re-roll the rare accidental 24.
      char o0 = pick_op();
      char o1 = pick_op();
      char o2 = pick_op();
      std::int64_t value =
          eval(eval(nums[0], nums[1], o0), eval(nums[2], nums[3], o2), o1);
      if (value == 24) continue;
      expr = build(nums, o0, o1, o2);
      expected = Game24Reason::WrongValue;
    } else {
      // Division by a planted zero; the duplicate keeps the multiset intact.
      std::int64_t a = rand_num();
      std::int64_t b = rand_num();
      std::int64_t c = rand_num();
      nums = {a, b, b, c};
      auto s = [](std::int64_t v) { return std::to_string(v); };
      expr = "(" + s(a) + " + " + s(c) + ") / (" + s(b) + " - " + s(b) + ")";
      expected = Game24Reason::DivisionByZero;
    }
    auto v = verify_game24(expr, nums);
    require(!v.valid, "fuzzed expression accepted: " + expr);
    require(v.reason == expected,
            "fuzzed expression \"" + expr + "\" got reason " +
                game24_reason_name(v.reason) + ", expected " +
                game24_reason_name(expected));
    ++fuzzed;
  }
  require_under(start, 30.0, "verifier check");
}

// --- Gate 6: rendered prompts match the golden fixtures ---------------------

void gate_prompt_golden_fixtures() {
  auto golden_file = [](const std::string& name) {
    return read_file(std::string(COREPO_GOLDEN_DIR) + "/" + name);
  };
  auto check = [&](const std::string& rendered, const std::string& name) {
    require(rendered + "\n" == golden_file(name), name + " drifted from the rendered prompt");
  };

  check(render_numeric_prompt(golden::kQuestion), "golden_task_numeric.txt");
  check(render_multiple_choice_prompt(golden::kQuestion), "golden_task_multiple_choice.txt");
  check(render_game24_prompt(golden::kGame24Numbers), "golden_task_game24.txt");
  check(render_crux_prompt(golden::kCruxCode, golden::kCruxInput), "golden_task_crux_out.txt");

  check(render_monolithic_prompt(golden::kQuestion, golden::kReasoning, golden::kDistractors),
        "golden_confidence_monolithic_m4.txt");
  require(golden::kDistractors.size() == 4, "the distractor fixture must exercise four slots");
  check(render_monolithic_prompt(golden::kQuestion, golden::kReasoning, {}),
        "golden_confidence_monolithic_m0.txt");
  check(render_statementwise_prompt(golden::kQuestion, {}, golden::kStatements[0]),
        "golden_confidence_statementwise_k1.txt");
  check(render_statementwise_prompt(golden::kQuestion,
                                    {golden::kStatements[0], golden::kStatements[1]},
                                    golden::kStatements[2]),
        "golden_confidence_statementwise_k3.txt");
  check(render_answer_prompt(golden::kQuestion, golden::kReasoning, golden::kAnswer),
        "golden_confidence_answer.txt");
  check(render_judge_prompt(golden::kQuestion, golden::kReasoning), "golden_judge.txt");
}

// --- Gate 7: the sampling pipeline is byte-reproducible ---------------------

void gate_pipeline_reproducibility() {
  fs::path dir = fresh_dir("e2e");
  fs::path qfile = dir / "questions.jsonl";
  write_file(qfile, R"({"id": "q1", "text": "Add 2 and 2.", "reference": "4"})"
                    "\n"
                    R"({"id": "q2", "text": "Multiply 2 by 3.", "reference": "6"})"
                    "\n");

  MockServer server;
  struct Q {
    std::string text;
    std::vector<std::vector<std::string>> lines;  // two statements per reasoning
    std::vector<std::string> values;
  };
  std::vector<Q> qs = {
      {"Add 2 and 2.",
       {{"Write the operands down.", "Two plus two is four."},
        {"Model it on a number line.", "Two steps past two lands on four."},
        {"Guess without checking.", "Call it five."}},
       {"4", "4", "5"}},
      {"Multiply 2 by 3.",
       {{"Lay out three pairs.", "Three twos make six."},
        {"Use repeated addition.", "Two plus two plus two is six."},
        {"Slip by one.", "Call it seven."}},
       {"6", "6", "7"}},
  };
  for (const auto& q : qs) {
    MockFixture f;
    std::vector<std::string> reasonings;
    for (const auto& lines : q.lines) reasonings.push_back(lines[0] + "\n" + lines[1]);
    for (std::size_t i = 0; i < reasonings.size(); ++i)
      f.completions.push_back(completion_text(reasonings[i], q.values[i]));
    server.add_fixture(render_numeric_prompt(q.text), std::move(f));

    // The train preset draws five samples cycling through the three
    // completions; monolithic scoring shows each sample the other samples'
    // reasonings (capped at four) as distractors.
    std::vector<std::string> sample_reasonings;
    std::vector<std::string> sample_values;
    for (int i = 0; i < 5; ++i) {
      sample_reasonings.push_back(reasonings[(std::size_t)i % 3]);
      sample_values.push_back(q.values[(std::size_t)i % 3]);
    }
    for (int i = 0; i < 5; ++i) {
      std::vector<std::string> distractors;
      for (int j = 0; j < 5 && (int)distractors.size() < 4; ++j)
        if (j != i) distractors.push_back(sample_reasonings[(std::size_t)j]);
      double strength = -0.2 * (double)((std::size_t)i % 3) - 0.1;
      server.add_fixture(
          render_monolithic_prompt(q.text, sample_reasonings[(std::size_t)i], distractors),
          logprob_fixture(strength, -1.5));
      server.add_fixture(
          render_answer_prompt(q.text, sample_reasonings[(std::size_t)i],
                               "\"The answer is $" + sample_values[(std::size_t)i] + "$\""),
          logprob_fixture(strength - 0.05, -1.5));
    }
    for (std::size_t i = 0; i < q.lines.size(); ++i) {
      double strength = -0.15 * (double)(i + 1);
      server.add_fixture(render_statementwise_prompt(q.text, {}, q.lines[i][0]),
                         logprob_fixture(strength, -1.1));
      server.add_fixture(
          render_statementwise_prompt(q.text, {q.lines[i][0]}, q.lines[i][1]),
          logprob_fixture(strength - 0.1, -1.1));
    }
  }

  auto run_chain = [&](const std::string& tag) {
    fs::path sub = dir / tag;
    fs::create_directories(sub);
    fs::path samples = sub / "samples.jsonl";
    fs::path mono = sub / "scored_monolithic.jsonl";
    fs::path stmt = sub / "scored_statementwise.jsonl";
    fs::path pairs = sub / "pairs.jsonl";
    auto step = [&](std::vector<std::string> args, const char* what) {
      auto res = run(std::move(args));
      require(res.code == 0, std::string(what) + " failed: " + res.err);
    };
    step({"generate", "--task", "numeric", "--questions", qfile.string(), "--out",
          samples.string(), "--preset", "train", "--endpoint", server.endpoint()},
         "generate");
    step({"score", "--in", samples.string(), "--out", mono.string(), "--method",
          "monolithic", "--endpoint", server.endpoint()},
         "monolithic score");
    step({"score", "--in", samples.string(), "--out", stmt.string(), "--method",
          "statement_wise", "--endpoint", server.endpoint()},
         "statement-wise score");
    step({"pairs", "--in", mono.string(), "--out", pairs.string(), "--rule", "core_po"},
         "pair export");
    return std::vector<std::string>{read_file(samples.string()), read_file(mono.string()),
                                    read_file(stmt.string()), read_file(pairs.string())};
  };

  auto first = run_chain("a");
  auto second = run_chain("b");
  const char* names[] = {"samples", "monolithic scores", "statement-wise scores", "pairs"};
  for (std::size_t i = 0; i < first.size(); ++i) {
    require(!first[i].empty(), std::string(names[i]) + " artifact came out empty");
    require(first[i] == second[i],
            std::string(names[i]) + " differ between identical runs");
  }

  // A reasoning with T statements costs exactly T+1 logprob calls to score:
  // one per statement plus one for the answer.
  fs::path q2file = dir / "question_single.jsonl";
  write_file(q2file, R"({"id": "h1", "text": "Halve 14.", "reference": "7"})"
                     "\n");
  std::vector<std::string> lines = {"Take the number.", "Split it evenly.",
                                    "Each half is seven."};
  std::string reasoning = lines[0] + "\n" + lines[1] + "\n" + lines[2];
  {
    MockFixture f;
    f.completions.push_back(completion_text(reasoning, "7"));
    server.add_fixture(render_numeric_prompt("Halve 14."), std::move(f));
  }
  std::vector<std::string> previous;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    server.add_fixture(render_statementwise_prompt("Halve 14.", previous, lines[i]),
                       logprob_fixture(-0.2, -1.0));
    previous.push_back(lines[i]);
  }
  server.add_fixture(render_answer_prompt("Halve 14.", reasoning, "\"The answer is $7$\""),
                     logprob_fixture(-0.25, -1.0));

  fs::path single = dir / "single.jsonl";
  fs::path single_scored = dir / "single_scored.jsonl";
  auto gen = run({"generate", "--task", "numeric", "--questions", q2file.string(), "--out",
                  single.string(), "--preset", "greedy", "--endpoint", server.endpoint()});
  require(gen.code == 0, "single-question generate failed: " + gen.err);
  int before = server.logprob_requests();
  auto score = run({"score", "--in", single.string(), "--out", single_scored.string(),
                    "--method", "statement_wise", "--endpoint", server.endpoint()});
  require(score.code == 0, "single-question score failed: " + score.err);
  int calls = server.logprob_requests() - before;
  require(calls == (int)lines.size() + 1,
          "scoring 3 statements issued " + std::to_string(calls) +
              " logprob calls, expected 4");
}

// --- Gate 8: the confidence curve matches a from-scratch recount ------------

nlohmann::json judged_record(const std::string& qid, double answer_conf, bool answer_ok,
                             bool reason_ok) {
  OutputSample s = make_output_sample(TaskKind::Numeric, qid, 0,
                                      completion_text("Reasoning for " + qid + ".", "4"));
  require(s.parsed, "synthetic record failed to parse");
  nlohmann::json j = sample_to_json(s, "numeric", "Question " + qid, "PROMPT " + qid);
  j["confidence"] = confidence_to_json(
      make_report(ConfidenceMethod::Monolithic, 0.5, answer_conf, 0.5));
  j["answer_correct"] = answer_ok;
  j["reasoning_verdict"] = reason_ok ? "correct" : "incorrect";
  return j;
}

void gate_curve_recount() {
  fs::path dir = fresh_dir("curves");
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Planted {
    double conf;
    bool answer_ok;
    bool reason_ok;
  };
  std::vector<Planted> planted;
  std::vector<nlohmann::json> records;
  for (int i = 0; i < 1000; ++i) {
    double conf = unit(rng);
    bool answer_ok;
    bool reason_ok;
    if (conf >= 0.9) {
      // High answer confidence: mostly correct answers, with ~30% of the
      // correct ones reached through flawed reasoning.
      answer_ok = unit(rng) < 0.9;
      reason_ok = answer_ok && unit(rng) >= 0.3;
    } else {
      answer_ok = unit(rng) < conf;
      reason_ok = answer_ok;
    }
    planted.push_back({conf, answer_ok, reason_ok});
    records.push_back(judged_record("q" + std::to_string(i), conf, answer_ok, reason_ok));
  }
  fs::path judged = dir / "judged.jsonl";
  write_file(judged, jsonl_of(records));

  fs::path csv = dir / "curve.csv";
  auto res = run({"curves", "--in", judged.string(), "--out", csv.string(), "--bins", "10"});
  require(res.code == 0, "curves command failed: " + res.err);

  // Recount from the planted population: ten equal-width bins over [0, 1],
  // closed on the left, the last bin closed on both ends.
  const int kBins = 10;
  int count[kBins] = {};
  int answer_sum[kBins] = {};
  int reason_sum[kBins] = {};
  for (const auto& p : planted) {
    for (int b = 0; b < kBins; ++b) {
      double lo = (double)b / kBins;
      double hi = (double)(b + 1) / kBins;
      bool inside = p.conf >= lo && (b == kBins - 1 ? p.conf <= hi : p.conf < hi);
      if (!inside) continue;
      ++count[b];
      answer_sum[b] += p.answer_ok ? 1 : 0;
      reason_sum[b] += p.reason_ok ? 1 : 0;
      break;
    }
  }

  std::string text = read_file(csv.string());
  std::istringstream in(text);
  std::string line;
  require(std::getline(in, line) && line == "bin_lo,bin_hi,answer_acc,reason_acc,count",
          "unexpected CSV header: " + line);
  double top_answer_acc = 0.0;
  double top_reason_acc = 0.0;
  for (int b = 0; b < kBins; ++b) {
    require(!!std::getline(in, line), "CSV ended before bin " + std::to_string(b));
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    require(fields.size() == 5, "bin row has " + std::to_string(fields.size()) + " fields");

    double lo = std::strtod(fields[0].c_str(), nullptr);
    double hi = std::strtod(fields[1].c_str(), nullptr);
    double answer_acc = std::strtod(fields[2].c_str(), nullptr);
    double reason_acc = std::strtod(fields[3].c_str(), nullptr);
    int n = std::atoi(fields[4].c_str());

    require(lo == (double)b / kBins && hi == (double)(b + 1) / kBins,
            "bin " + std::to_string(b) + " edges drifted: " + line);
    require(n == count[b], "bin " + std::to_string(b) + " count " + std::to_string(n) +
                               " != recount " + std::to_string(count[b]));
    double want_answer = count[b] > 0 ? (double)answer_sum[b] / count[b] : 0.0;
    double want_reason = count[b] > 0 ? (double)reason_sum[b] / count[b] : 0.0;
    require(answer_acc == want_answer,
            "bin " + std::to_string(b) + " answer accuracy " + fmt(answer_acc) +
                " != recount " + fmt(want_answer));
    require(reason_acc == want_reason,
            "bin " + std::to_string(b) + " reasoning accuracy " + fmt(reason_acc) +
                " != recount " + fmt(want_reason));
    if (b == kBins - 1) {
      top_answer_acc = answer_acc;
      top_reason_acc = reason_acc;
    }
  }
  require(count[kBins - 1] > 50, "top decile holds only " +
                                     std::to_string(count[kBins - 1]) + " samples");
  require(top_reason_acc < top_answer_acc,
          "top decile shows no reasoning gap: answer " + fmt(top_answer_acc) +
              ", reasoning " + fmt(top_reason_acc));
}

struct Gate {
  const char* name;
  std::function<void()> body;
};

}  // namespace

int main() {
  std::vector<Gate> gates = {
      {"dpo-gradient-vs-finite-differences", gate_gradient_vs_finite_differences},
      {"dpo-step-semantics", gate_step_semantics},
      {"toy-self-training-separation", gate_toy_training_separation},
      {"confidence-algebra", gate_confidence_algebra},
      {"game24-verifier-vs-oracle", gate_game24_vs_oracle},
      {"prompt-golden-fixtures", gate_prompt_golden_fixtures},
      {"pipeline-byte-reproducibility", gate_pipeline_reproducibility},
      {"curve-recount", gate_curve_recount},
  };

  int failures = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    auto start = Clock::now();
    try {
      gates[i].body();
      std::printf("PASS %zu %s (%.2f s)\n", i + 1, gates[i].name, seconds_since(start));
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL %zu %s: %s\n", i + 1, gates[i].name, e.what());
    }
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu gates failed\n", failures, gates.size());
    return 1;
  }
  std::printf("all %zu gates passed\n", gates.size());
  return 0;
}
