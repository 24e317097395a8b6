#pragma once

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corepo/http_gateway.hpp"
#include "corepo/pipeline.hpp"
#include "corepo/version.hpp"

namespace corepo {

// Command-line front end. Exit codes: 0 success, 2 usage, 3 malformed input,
// 4 gateway failure, 5 internal invariant breach.

inline constexpr const char* kApiKeyEnvVar = "COREPO_API_KEY";

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::InputMalformed: return 3;
    case ErrorKind::GatewayAuth:
    case ErrorKind::GatewayTimeout:
    case ErrorKind::GatewayTransport:
    case ErrorKind::GatewayMalformed: return 4;
    default: return 5;
  }
}

// --- Config file -----------------------------------------------------------

// Documented key set; anything else is rejected so typos fail loudly.
struct FileConfig {
  std::string endpoint;
  std::string model;
  std::string api_key;
  int parallelism = 0;    // 0: not set
  int timeout_ms = 0;     // 0: not set
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::map<std::string, std::string> paths;
};

inline FileConfig load_file_config(const std::string& path) {
  FileConfig cfg;
  if (path.empty()) return cfg;
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(ErrorKind::InputMalformed, path + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "endpoint")
      cfg.endpoint = value.get<std::string>();
    else if (key == "model")
      cfg.model = value.get<std::string>();
    else if (key == "api_key")
      cfg.api_key = value.get<std::string>();
    else if (key == "parallelism")
      cfg.parallelism = value.get<int>();
    else if (key == "timeout_ms")
      cfg.timeout_ms = value.get<int>();
    else if (key == "preset")
      cfg.preset = value.get<std::string>();
    else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
      cfg.seed_set = true;
    } else if (key == "paths") {
      if (!value.is_object())
        raise(ErrorKind::InputMalformed, path + ": 'paths' must be an object");
      for (const auto& [pk, pv] : value.items()) cfg.paths[pk] = pv.get<std::string>();
    } else {
      raise(ErrorKind::InputMalformed, path + ": unknown config key '" + key + "'");
    }
  }
  return cfg;
}

// --- Flag resolution -------------------------------------------------------

// Connection and defaults shared by the gateway-using subcommands. Precedence
// is flags > environment (API key only) > config file > built-in default.
struct CommonFlags {
  std::string config_path;
  std::string endpoint;
  std::string model;
  std::string api_key;
  int parallelism = 0;
  int timeout_ms = 0;
  std::string preset;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

inline void add_common_flags(CLI::App* sub, CommonFlags& f, bool with_sampling) {
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--endpoint", f.endpoint, "gateway base URL, e.g. http://127.0.0.1:8000");
  sub->add_option("--model", f.model, "model name sent with each request");
  sub->add_option("--api-key", f.api_key, "bearer token (overrides " +
                                              std::string(kApiKeyEnvVar) + ")");
  sub->add_option("--parallelism", f.parallelism, "max in-flight gateway requests");
  sub->add_option("--timeout-ms", f.timeout_ms, "per-request timeout");
  if (with_sampling) {
    sub->add_option("--preset", f.preset, "sampling preset: train | scale | greedy");
    sub->add_option("--seed", f.seed, "sampling seed forwarded to the gateway")
        ->each([&f](const std::string&) { f.seed_set = true; });
  }
}

struct ResolvedCommon {
  GatewayClientConfig gateway;
  std::string preset = "train";
  std::uint64_t seed = 0;
  std::map<std::string, std::string> paths;
};

inline ResolvedCommon resolve_common(const CommonFlags& f) {
  FileConfig file = load_file_config(f.config_path);
  ResolvedCommon r;
  r.gateway.endpoint = !f.endpoint.empty() ? f.endpoint : file.endpoint;
  if (!f.api_key.empty()) {
    r.gateway.api_key = f.api_key;
  } else if (const char* env = std::getenv(kApiKeyEnvVar); env && *env) {
    r.gateway.api_key = env;
  } else {
    r.gateway.api_key = file.api_key;
  }
  if (!f.model.empty())
    r.gateway.model = f.model;
  else if (!file.model.empty())
    r.gateway.model = file.model;
  if (f.parallelism > 0)
    r.gateway.parallelism = f.parallelism;
  else if (file.parallelism > 0)
    r.gateway.parallelism = file.parallelism;
  if (f.timeout_ms > 0)
    r.gateway.timeout_ms = f.timeout_ms;
  else if (file.timeout_ms > 0)
    r.gateway.timeout_ms = file.timeout_ms;
  if (!f.preset.empty())
    r.preset = f.preset;
  else if (!file.preset.empty())
    r.preset = file.preset;
  if (f.seed_set)
    r.seed = f.seed;
  else if (file.seed_set)
    r.seed = file.seed;
  r.paths = file.paths;
  return r;
}

inline std::string resolve_path(const std::string& flag_value,
                                const std::map<std::string, std::string>& config_paths,
                                const char* key, const char* flag_name, bool required) {
  if (!flag_value.empty()) return flag_value;
  auto it = config_paths.find(key);
  if (it != config_paths.end()) return it->second;
  if (required)
    raise(ErrorKind::Usage, std::string("missing ") + flag_name + " (or config paths." + key + ")");
  return {};
}

inline HttpGateway make_gateway(const ResolvedCommon& r) {
  if (r.gateway.endpoint.empty())
    raise(ErrorKind::Usage, "no gateway endpoint configured (--endpoint or config file)");
  return HttpGateway(r.gateway);
}

// --- Replay ----------------------------------------------------------------

inline void run_from_manifest(const nlohmann::json& manifest, const CommonFlags& common,
                              std::ostream& out, std::ostream& err);

// --- Entry point -----------------------------------------------------------

// argv-style arguments without the program name, in natural order.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"confidence-driven self-training pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // generate ---------------------------------------------------------------
  struct GenFlags {
    CommonFlags common;
    std::string task = "numeric";
    std::string questions;
    std::string out_path;
  };
  auto gen = std::make_shared<GenFlags>();
  CLI::App* gen_cmd = app.add_subcommand("generate", "sample model outputs for a question file");
  add_common_flags(gen_cmd, gen->common, true);
  gen_cmd->add_option("--task", gen->task, "numeric | multiple_choice | game24 | crux_out");
  gen_cmd->add_option("--questions", gen->questions, "question JSONL file");
  gen_cmd->add_option("--out", gen->out_path, "output sample JSONL file");
  gen_cmd->callback([gen, &out, &err] {
    ResolvedCommon r = resolve_common(gen->common);
    GenerateOptions opt;
    opt.task = parse_task_kind(gen->task);
    opt.questions_path = resolve_path(gen->questions, r.paths, "questions", "--questions", true);
    opt.out_path = resolve_path(gen->out_path, r.paths, "out", "--out", true);
    opt.preset = r.preset;
    opt.seed = r.seed;
    opt.parallelism = r.gateway.parallelism;
    HttpGateway gateway = make_gateway(r);
    cmd_generate(opt, gateway, err);
    out << "wrote " << opt.out_path << "\n";
  });

  // score ------------------------------------------------------------------
  struct ScoreFlags {
    CommonFlags common;
    std::string in_path;
    std::string out_path;
    std::string method = "monolithic";
  };
  auto sc = std::make_shared<ScoreFlags>();
  CLI::App* score_cmd = app.add_subcommand("score", "attach confidence reports to samples");
  add_common_flags(score_cmd, sc->common, false);
  score_cmd->add_option("--in", sc->in_path, "sample JSONL file");
  score_cmd->add_option("--out", sc->out_path, "scored JSONL file");
  score_cmd->add_option("--method", sc->method, "monolithic | statement_wise");
  score_cmd->callback([sc, &out, &err] {
    ResolvedCommon r = resolve_common(sc->common);
    ScoreOptions opt;
    opt.in_path = resolve_path(sc->in_path, r.paths, "in", "--in", true);
    opt.out_path = resolve_path(sc->out_path, r.paths, "out", "--out", true);
    opt.method = parse_confidence_method(sc->method);
    opt.parallelism = r.gateway.parallelism;
    HttpGateway gateway = make_gateway(r);
    cmd_score(opt, gateway, err);
    out << "wrote " << opt.out_path << "\n";
  });

  // pairs ------------------------------------------------------------------
  struct PairsFlags {
    std::string config_path;
    std::string in_path;
    std::string out_path;
    std::string rule = "core_po";
  };
  auto pr = std::make_shared<PairsFlags>();
  CLI::App* pairs_cmd = app.add_subcommand("pairs", "build preference pairs from scored samples");
  pairs_cmd->add_option("--config", pr->config_path, "JSON config file");
  pairs_cmd->add_option("--in", pr->in_path, "scored JSONL file");
  pairs_cmd->add_option("--out", pr->out_path, "pair JSONL file");
  pairs_cmd->add_option("--rule", pr->rule, "core_po | sc_po");
  pairs_cmd->callback([pr, &out, &err] {
    FileConfig file = load_file_config(pr->config_path);
    PairsOptions opt;
    opt.in_path = resolve_path(pr->in_path, file.paths, "in", "--in", true);
    opt.out_path = resolve_path(pr->out_path, file.paths, "out", "--out", true);
    if (pr->rule == "core_po")
      opt.rule = PairRule::CorePo;
    else if (pr->rule == "sc_po")
      opt.rule = PairRule::ScPo;
    else
      raise(ErrorKind::Usage, "unknown pair rule: " + pr->rule);
    cmd_pairs(opt, err);
    out << "wrote " << opt.out_path << "\n";
  });

  // train-toy --------------------------------------------------------------
  struct TrainFlags {
    TrainToyOptions opt;
    std::string scorer = "confidence";
  };
  auto tr = std::make_shared<TrainFlags>();
  CLI::App* train_cmd =
      app.add_subcommand("train-toy", "run the synthetic online preference-training loop");
  train_cmd->add_option("--steps", tr->opt.steps, "online steps to run");
  train_cmd->add_option("--samples-per-step", tr->opt.samples_per_step, "candidates per step");
  train_cmd->add_option("--scorer", tr->scorer, "confidence | answer_only");
  train_cmd->add_option("--learning-rate", tr->opt.learning_rate, "gradient step size");
  train_cmd->add_option("--beta", tr->opt.beta, "preference-margin scale");
  train_cmd->add_option("--seed", tr->opt.seed, "run seed");
  train_cmd->add_option("--log", tr->opt.log_path, "per-step JSONL log");
  train_cmd->add_option("--policy", tr->opt.policy_path, "final policy JSON (optional)");
  train_cmd->callback([tr, &out, &err] {
    tr->opt.scorer = tr->scorer;
    if (tr->opt.log_path.empty()) raise(ErrorKind::Usage, "missing --log");
    cmd_train_toy(tr->opt, err);
    out << "wrote " << tr->opt.log_path << "\n";
  });

  // eval -------------------------------------------------------------------
  struct EvalFlags {
    CommonFlags common;
    std::string task = "numeric";
    std::string questions;
    std::string in_path;
    std::string out_path;
    std::string selector = "sc";
    int k = kDefaultBestOfK;
  };
  auto ev = std::make_shared<EvalFlags>();
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a selection strategy");
  add_common_flags(eval_cmd, ev->common, false);
  eval_cmd->add_option("--task", ev->task, "numeric | multiple_choice | game24 | crux_out");
  eval_cmd->add_option("--questions", ev->questions, "question JSONL file with references");
  eval_cmd->add_option("--in", ev->in_path, "scored JSONL file (file-based selectors)");
  eval_cmd->add_option("--out", ev->out_path, "report JSON file");
  eval_cmd->add_option("--selector", ev->selector,
                       "sc | ptrue | best_answer | best_reasoning | greedy");
  eval_cmd->add_option("--k", ev->k, "pool size for best_answer / best_reasoning");
  eval_cmd->callback([ev, &out, &err] {
    ResolvedCommon r = resolve_common(ev->common);
    EvalOptions opt;
    opt.task = parse_task_kind(ev->task);
    opt.questions_path = resolve_path(ev->questions, r.paths, "questions", "--questions", true);
    opt.in_path = resolve_path(ev->in_path, r.paths, "in", "--in", false);
    opt.out_path = resolve_path(ev->out_path, r.paths, "out", "--out", true);
    opt.selector = ev->selector;
    opt.best_of_k = ev->k;
    opt.parallelism = r.gateway.parallelism;
    if (opt.selector == "greedy") {
      HttpGateway gateway = make_gateway(r);
      cmd_eval(opt, &gateway, err);
    } else {
      cmd_eval(opt, nullptr, err);
    }
    out << "wrote " << opt.out_path << "\n";
  });

  // judge ------------------------------------------------------------------
  struct JudgeFlags {
    CommonFlags common;
    std::string task = "numeric";
    std::string questions;
    std::string in_path;
    std::string out_path;
  };
  auto jd = std::make_shared<JudgeFlags>();
  CLI::App* judge_cmd =
      app.add_subcommand("judge", "judge reasoning correctness for scored samples");
  add_common_flags(judge_cmd, jd->common, false);
  judge_cmd->add_option("--task", jd->task, "numeric | multiple_choice | game24 | crux_out");
  judge_cmd->add_option("--questions", jd->questions, "question JSONL file with references");
  judge_cmd->add_option("--in", jd->in_path, "scored JSONL file");
  judge_cmd->add_option("--out", jd->out_path, "judged JSONL file");
  judge_cmd->callback([jd, &out, &err] {
    ResolvedCommon r = resolve_common(jd->common);
    JudgeOptions opt;
    opt.task = parse_task_kind(jd->task);
    opt.questions_path = resolve_path(jd->questions, r.paths, "questions", "--questions", true);
    opt.in_path = resolve_path(jd->in_path, r.paths, "in", "--in", true);
    opt.out_path = resolve_path(jd->out_path, r.paths, "out", "--out", true);
    opt.parallelism = r.gateway.parallelism;
    HttpGateway gateway = make_gateway(r);
    cmd_judge(opt, gateway, err);
    out << "wrote " << opt.out_path << "\n";
  });

  // curves -----------------------------------------------------------------
  struct CurvesFlags {
    std::string config_path;
    std::string in_path;
    std::string out_path;
    int bins = 10;
  };
  auto cv = std::make_shared<CurvesFlags>();
  CLI::App* curves_cmd =
      app.add_subcommand("curves", "confidence-vs-accuracy curve from judged samples");
  curves_cmd->add_option("--config", cv->config_path, "JSON config file");
  curves_cmd->add_option("--in", cv->in_path, "judged JSONL file");
  curves_cmd->add_option("--out", cv->out_path, "curve CSV file");
  curves_cmd->add_option("--bins", cv->bins, "equal-width bins over [0, 1]");
  curves_cmd->callback([cv, &out, &err] {
    FileConfig file = load_file_config(cv->config_path);
    CurvesOptions opt;
    opt.in_path = resolve_path(cv->in_path, file.paths, "in", "--in", true);
    opt.out_path = resolve_path(cv->out_path, file.paths, "out", "--out", true);
    opt.bins = cv->bins;
    cmd_curves(opt, err);
    out << "wrote " << opt.out_path << "\n";
  });

  // replay -----------------------------------------------------------------
  struct ReplayFlags {
    CommonFlags common;
    std::string manifest_path;
  };
  auto rp = std::make_shared<ReplayFlags>();
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run the command a manifest records");
  add_common_flags(replay_cmd, rp->common, false);
  replay_cmd->add_option("--manifest", rp->manifest_path, "run manifest JSON file");
  replay_cmd->callback([rp, &out, &err] {
    if (rp->manifest_path.empty()) raise(ErrorKind::Usage, "missing --manifest");
    nlohmann::json manifest = nlohmann::json::parse(read_file(rp->manifest_path), nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object())
      raise(ErrorKind::InputMalformed, rp->manifest_path + ": not a JSON object");
    run_from_manifest(manifest, rp->common, out, err);
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: input_malformed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 5;
  }
  return 0;
}

// Re-runs the recorded command with the recorded options and seed. Inputs
// must still hash to what the manifest recorded; connection settings come
// from the replay invocation, never from the manifest.
inline void run_from_manifest(const nlohmann::json& manifest, const CommonFlags& common,
                              std::ostream& out, std::ostream& err) {
  std::string version = manifest.at("tool_version").get<std::string>();
  if (version != kVersion)
    raise(ErrorKind::InputMalformed, "manifest was written by tool version " + version +
                                         "; this is " + kVersion);
  for (const auto& [path, hash] : manifest.at("inputs").items()) {
    std::string current = sha256_file(path);
    if (current != hash.get<std::string>())
      raise(ErrorKind::InputMalformed, "input changed since the manifest was written: " + path);
  }

  std::string command = manifest.at("command").get<std::string>();
  const nlohmann::json& options = manifest.at("options");
  std::uint64_t seed = manifest.at("seed").get<std::uint64_t>();
  ResolvedCommon r = resolve_common(common);

  if (command == "generate") {
    GenerateOptions opt;
    opt.task = parse_task_kind(options.at("task").get<std::string>());
    opt.questions_path = options.at("questions").get<std::string>();
    opt.out_path = options.at("out").get<std::string>();
    opt.preset = options.at("preset").get<std::string>();
    opt.seed = seed;
    opt.parallelism = options.at("parallelism").get<int>();
    HttpGateway gateway = make_gateway(r);
    cmd_generate(opt, gateway, err);
    out << "replayed generate; wrote " << opt.out_path << "\n";
  } else if (command == "score") {
    ScoreOptions opt;
    opt.in_path = options.at("in").get<std::string>();
    opt.out_path = options.at("out").get<std::string>();
    opt.method = parse_confidence_method(options.at("method").get<std::string>());
    opt.parallelism = options.at("parallelism").get<int>();
    HttpGateway gateway = make_gateway(r);
    cmd_score(opt, gateway, err);
    out << "replayed score; wrote " << opt.out_path << "\n";
  } else if (command == "pairs") {
    PairsOptions opt;
    opt.in_path = options.at("in").get<std::string>();
    opt.out_path = options.at("out").get<std::string>();
    opt.rule = options.at("rule").get<std::string>() == "core_po" ? PairRule::CorePo
                                                                  : PairRule::ScPo;
    cmd_pairs(opt, err);
    out << "replayed pairs; wrote " << opt.out_path << "\n";
  } else if (command == "train-toy") {
    TrainToyOptions opt;
    opt.steps = options.at("steps").get<int>();
    opt.samples_per_step = options.at("samples_per_step").get<int>();
    opt.scorer = options.at("scorer").get<std::string>();
    opt.learning_rate = options.at("learning_rate").get<double>();
    opt.beta = options.at("beta").get<double>();
    opt.seed = seed;
    opt.log_path = options.at("log").get<std::string>();
    if (options.contains("policy")) opt.policy_path = options.at("policy").get<std::string>();
    cmd_train_toy(opt, err);
    out << "replayed train-toy; wrote " << opt.log_path << "\n";
  } else if (command == "eval") {
    EvalOptions opt;
    opt.task = parse_task_kind(options.at("task").get<std::string>());
    opt.questions_path = options.at("questions").get<std::string>();
    if (options.contains("in")) opt.in_path = options.at("in").get<std::string>();
    opt.out_path = options.at("out").get<std::string>();
    opt.selector = options.at("selector").get<std::string>();
    opt.best_of_k = options.at("k").get<int>();
    opt.parallelism = r.gateway.parallelism;
    if (opt.selector == "greedy") {
      HttpGateway gateway = make_gateway(r);
      cmd_eval(opt, &gateway, err);
    } else {
      cmd_eval(opt, nullptr, err);
    }
    out << "replayed eval; wrote " << opt.out_path << "\n";
  } else if (command == "judge") {
    JudgeOptions opt;
    opt.task = parse_task_kind(options.at("task").get<std::string>());
    opt.questions_path = options.at("questions").get<std::string>();
    opt.in_path = options.at("in").get<std::string>();
    opt.out_path = options.at("out").get<std::string>();
    opt.parallelism = r.gateway.parallelism;
    HttpGateway gateway = make_gateway(r);
    cmd_judge(opt, gateway, err);
    out << "replayed judge; wrote " << opt.out_path << "\n";
  } else if (command == "curves") {
    CurvesOptions opt;
    opt.in_path = options.at("in").get<std::string>();
    opt.out_path = options.at("out").get<std::string>();
    opt.bins = options.at("bins").get<int>();
    cmd_curves(opt, err);
    out << "replayed curves; wrote " << opt.out_path << "\n";
  } else {
    raise(ErrorKind::InputMalformed, "manifest records an unknown command: " + command);
  }
}

}  // namespace corepo
