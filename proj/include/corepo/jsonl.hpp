#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corepo/confidence.hpp"
#include "corepo/error.hpp"
#include "corepo/sha256.hpp"
#include "corepo/tasks.hpp"
#include "corepo/version.hpp"

namespace corepo {

// Line-oriented JSON persistence for the pipeline stages. Objects serialize
// with sorted keys (nlohmann's default object ordering), so identical data
// always produces identical bytes.

inline std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::string content = read_file(path);
  std::vector<nlohmann::json> out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      raise(ErrorKind::InputMalformed,
            path + ": line " + std::to_string(line_no) + " is not valid JSON");
    out.push_back(std::move(j));
  }
  return out;
}

inline void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::InputMalformed, "cannot open for writing: " + path);
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) raise(ErrorKind::Internal, "write failed: " + path);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::InputMalformed, "cannot open for writing: " + path);
  out << content;
  if (!out) raise(ErrorKind::Internal, "write failed: " + path);
}

// --- Sample records --------------------------------------------------------

inline nlohmann::json sample_to_json(const OutputSample& s, const std::string& task,
                                     const std::string& question_text,
                                     const std::string& prompt) {
  nlohmann::json j;
  j["question_id"] = s.question_id;
  j["sample_index"] = s.sample_index;
  j["task"] = task;
  j["question_text"] = question_text;
  j["prompt"] = prompt;
  j["raw_text"] = s.raw_text;
  j["parse_status"] = s.parsed ? "ok" : "error";
  if (s.parsed) {
    j["reasoning_text"] = s.reasoning_text;
    j["statements"] = s.statements;
    j["answer_text"] = s.answer_text;
    j["canonical_answer"] = s.canonical_answer.key();
  } else {
    j["parse_error"] = s.parse_error;
  }
  return j;
}

// The canonical answer is rebuilt from answer_text rather than trusted from
// the record: the stored key is a plain string, while correctness checks need
// the parsed form. A mismatch means the record was edited inconsistently.
inline OutputSample sample_from_json(const nlohmann::json& j) {
  OutputSample s;
  s.question_id = j.at("question_id").get<std::string>();
  s.sample_index = j.at("sample_index").get<int>();
  s.raw_text = j.at("raw_text").get<std::string>();
  s.parsed = j.at("parse_status").get<std::string>() == "ok";
  if (s.parsed) {
    s.reasoning_text = j.at("reasoning_text").get<std::string>();
    s.statements = j.at("statements").get<std::vector<std::string>>();
    s.answer_text = j.at("answer_text").get<std::string>();
    TaskKind kind = parse_task_kind(j.at("task").get<std::string>());
    s.canonical_answer = canonicalize_answer(kind, s.answer_text);
    if (s.canonical_answer.key() != j.at("canonical_answer").get<std::string>())
      raise(ErrorKind::InputMalformed,
            "canonical_answer does not match answer_text for question " + s.question_id +
                " sample " + std::to_string(s.sample_index));
  } else {
    s.parse_error = j.value("parse_error", "");
  }
  return s;
}

// --- Confidence records ----------------------------------------------------

inline nlohmann::json confidence_to_json(const ConfidenceReport& r) {
  nlohmann::json j;
  j["method"] = confidence_method_name(r.method);
  j["reasoning_confidence"] = r.reasoning_confidence;
  j["answer_confidence"] = r.answer_confidence;
  j["vote_confidence"] = r.vote_confidence;
  j["combined"] = r.combined;
  if (r.per_statement) j["per_statement"] = *r.per_statement;
  return j;
}

inline ConfidenceReport confidence_from_json(const nlohmann::json& j) {
  ConfidenceReport r;
  r.method = parse_confidence_method(j.at("method").get<std::string>());
  r.reasoning_confidence = j.at("reasoning_confidence").get<double>();
  r.answer_confidence = j.at("answer_confidence").get<double>();
  r.vote_confidence = j.at("vote_confidence").get<double>();
  r.combined = j.at("combined").get<double>();
  if (j.contains("per_statement"))
    r.per_statement = j.at("per_statement").get<std::vector<double>>();
  return r;
}

// --- Run manifests ---------------------------------------------------------

// Written next to every output artifact; replaying one re-runs the command.
inline nlohmann::json make_manifest(const std::string& command,
                                    const nlohmann::json& options,
                                    const std::vector<std::string>& input_paths,
                                    std::uint64_t seed) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& p : input_paths) inputs[p] = sha256_hex(read_file(p));
  nlohmann::json j;
  j["tool_version"] = kVersion;
  j["command"] = command;
  j["options"] = options;
  j["inputs"] = inputs;
  j["seed"] = seed;
  return j;
}

inline std::string manifest_path_for(const std::string& artifact_path) {
  return artifact_path + ".manifest.json";
}

inline void write_manifest(const std::string& artifact_path, const nlohmann::json& manifest) {
  write_text_file(manifest_path_for(artifact_path), manifest.dump(2) + "\n");
}

}  // namespace corepo
