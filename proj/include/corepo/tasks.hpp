#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corepo/confidence.hpp"
#include "corepo/error.hpp"
#include "corepo/game24.hpp"
#include "corepo/gateway.hpp"
#include "corepo/literals.hpp"
#include "corepo/prompts.hpp"
#include "corepo/rational.hpp"
#include "corepo/text.hpp"

namespace corepo {

// Task adapters: prompt rendering, response-format parsing, answer
// canonicalization, and correctness checking for the four task families.

enum class TaskKind { Numeric, MultipleChoice, Game24, CruxOut };

inline const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::Numeric: return "numeric";
    case TaskKind::MultipleChoice: return "multiple_choice";
    case TaskKind::Game24: return "game24";
    case TaskKind::CruxOut: return "crux_out";
  }
  return "unknown";
}

inline TaskKind parse_task_kind(std::string_view name) {
  if (name == "numeric") return TaskKind::Numeric;
  if (name == "multiple_choice") return TaskKind::MultipleChoice;
  if (name == "game24") return TaskKind::Game24;
  if (name == "crux_out") return TaskKind::CruxOut;
  raise(ErrorKind::Usage, "unknown task kind: " + std::string(name));
}

struct TaskSpec {
  TaskKind kind = TaskKind::Numeric;
  TemplateId template_id = TemplateId::TaskNumeric;
};

inline TaskSpec task_spec(TaskKind kind) {
  switch (kind) {
    case TaskKind::Numeric: return {kind, TemplateId::TaskNumeric};
    case TaskKind::MultipleChoice: return {kind, TemplateId::TaskMultipleChoice};
    case TaskKind::Game24: return {kind, TemplateId::TaskGame24};
    case TaskKind::CruxOut: return {kind, TemplateId::TaskCruxOut};
  }
  raise(ErrorKind::Internal, "unknown task kind");
}

// Question payload; which fields matter depends on the task kind.
struct TaskQuestion {
  std::string text;                    // numeric / multiple-choice question
  std::vector<std::int64_t> numbers;   // game24
  std::string code;                    // crux
  std::string input;                   // crux
};

inline std::string render_task_prompt(const TaskSpec& spec, const TaskQuestion& q) {
  switch (spec.kind) {
    case TaskKind::Numeric: return render_numeric_prompt(q.text);
    case TaskKind::MultipleChoice: return render_multiple_choice_prompt(q.text);
    case TaskKind::Game24: return render_game24_prompt(q.numbers);
    case TaskKind::CruxOut: return render_crux_prompt(q.code, q.input);
  }
  raise(ErrorKind::Internal, "unknown task kind");
}

// --- Response-format parsing -----------------------------------------------

inline constexpr std::string_view kReasoningMarker = "**Reasoning:**";
inline constexpr std::string_view kFinalAnswerMarker = "**Final answer:**";
// Compact variant some outputs use, e.g. "**Answer: [I]**".
inline constexpr std::string_view kShortAnswerMarker = "**Answer:";

struct ReasoningAnswerSplit {
  std::string reasoning;  // trimmed text between the markers
  std::string answer;     // trimmed text after the answer marker
  // Byte offsets into the raw text. The untrimmed spans plus the marker spans
  // reassemble the input exactly:
  //   raw[0, reasoning_begin) + raw[reasoning_begin, answer_marker) +
  //   raw[answer_marker, answer_begin) + raw[answer_begin, end)
  std::size_t reasoning_begin = 0;
  std::size_t answer_marker = 0;
  std::size_t answer_begin = 0;
};

// Splits a model response into its reasoning span and answer span. The
// reasoning marker is optional (reasoning then starts at the top); the answer
// marker is required and the last occurrence wins, preferring the canonical
// "**Final answer:**" form over the compact "**Answer:" form.
inline ReasoningAnswerSplit split_reasoning_answer(std::string_view raw) {
  if (trim(raw).empty()) raise(ErrorKind::InputMalformed, "empty sample text");

  ReasoningAnswerSplit out;
  auto rpos = raw.find(kReasoningMarker);
  out.reasoning_begin = rpos == std::string_view::npos ? 0 : rpos + kReasoningMarker.size();

  bool short_form = false;
  auto apos = raw.rfind(kFinalAnswerMarker);
  std::size_t marker_len = kFinalAnswerMarker.size();
  if (apos == std::string_view::npos || apos < out.reasoning_begin) {
    apos = raw.rfind(kShortAnswerMarker);
    marker_len = kShortAnswerMarker.size();
    short_form = true;
    if (apos == std::string_view::npos || apos < out.reasoning_begin)
      raise(ErrorKind::InputMalformed, "missing final-answer marker");
  }
  out.answer_marker = apos;
  out.answer_begin = apos + marker_len;

  out.reasoning = std::string(trim(raw.substr(out.reasoning_begin, apos - out.reasoning_begin)));
  std::string_view ans = trim(raw.substr(out.answer_begin));
  if (short_form && ans.size() >= 2 && ans.substr(ans.size() - 2) == "**")
    ans = trim(ans.substr(0, ans.size() - 2));
  out.answer = std::string(ans);
  return out;
}

// --- Answer canonicalization -----------------------------------------------

// Canonical answer value: an exact rational when the text parses as one,
// otherwise a cleaned-up string. key() is the answer-class key for majority
// voting, so "0.5" and "1/2" land in one class.
struct CanonicalAnswer {
  bool is_rational = false;
  Rational value;
  std::string text;

  std::string key() const { return is_rational ? value.str() : text; }

  bool operator==(const CanonicalAnswer& o) const {
    if (is_rational != o.is_rational) return false;
    return is_rational ? value == o.value : text == o.text;
  }
};

namespace task_detail {

// First $...$ span of the text; npos-pair when absent.
inline std::string_view first_dollar_span(std::string_view text) {
  auto open = text.find('$');
  if (open == std::string_view::npos) return {};
  auto close = text.find('$', open + 1);
  if (close == std::string_view::npos) return {};
  return text.substr(open + 1, close - open - 1);
}

}  // namespace task_detail

// Canonicalizes the first $-delimited value of a numeric answer. Commas,
// whitespace, and a leading "+" are stripped before rational parsing; text
// that is not an integer, decimal, or simple fraction stays a trimmed string.
inline CanonicalAnswer extract_numeric(std::string_view answer_text) {
  std::string_view span = task_detail::first_dollar_span(answer_text);
  if (trim(span).empty())
    raise(ErrorKind::InputMalformed, "no $-delimited value in answer text");

  std::string cleaned;
  cleaned.reserve(span.size());
  for (char c : span)
    if (c != ',' && !is_space(c)) cleaned.push_back(c);
  if (!cleaned.empty() && cleaned.front() == '+') cleaned.erase(cleaned.begin());

  CanonicalAnswer out;
  try {
    out.value = parse_rational(cleaned);
    out.is_rational = true;
    out.text = out.value.str();
    return out;
  } catch (const Error&) {
  } catch (const rational_overflow&) {
  } catch (const rational_divzero&) {
  }
  out.text = std::string(trim(span));
  return out;
}

inline const std::vector<std::string>& roman_choices() {
  static const std::vector<std::string> k = {"I", "II", "III", "IV"};
  return k;
}

// First bracketed roman numeral, case-insensitive. Two distinct numerals are
// an extraction error; a repeated one is fine.
inline std::string extract_choice(std::string_view answer_text) {
  std::string found;
  std::size_t i = 0;
  while (i < answer_text.size()) {
    if (answer_text[i] != '[') {
      ++i;
      continue;
    }
    auto close = answer_text.find(']', i + 1);
    if (close == std::string_view::npos) break;
    std::string inner(trim(answer_text.substr(i + 1, close - i - 1)));
    for (char& c : inner) c = (char)std::toupper((unsigned char)c);
    for (const auto& roman : roman_choices()) {
      if (inner == roman) {
        if (found.empty()) {
          found = roman;
        } else if (found != roman) {
          raise(ErrorKind::InputMalformed, "multiple distinct choice answers");
        }
        break;
      }
    }
    i = close + 1;
  }
  if (found.empty())
    raise(ErrorKind::InputMalformed, "no bracketed choice in answer text");
  return found;
}

// Pulls the equation text out of a game24 answer. Prefers the first
// $-delimited span ("The answer is $(4 + 8) * (6 - 4) = 24$"); otherwise
// strips quoting and the "The answer is" lead-in.
inline std::string extract_game24_expression(std::string_view answer_text) {
  std::string_view span = task_detail::first_dollar_span(answer_text);
  std::string_view body = trim(span.empty() ? answer_text : span);
  if (body.size() >= 2 && body.front() == '"' && body.back() == '"')
    body = trim(body.substr(1, body.size() - 2));
  constexpr std::string_view lead = "The answer is";
  if (body.substr(0, lead.size()) == lead) body = trim(body.substr(lead.size()));
  if (!body.empty() && body.back() == '.') body = trim(body.substr(0, body.size() - 1));
  if (body.empty()) raise(ErrorKind::InputMalformed, "empty game24 expression");
  return std::string(body);
}

// Pulls the predicted literal out of a crux answer of the form
// "assert f(<input>) == <literal>\"\"\"". The comparison operator is located
// outside quotes and brackets so literals containing "==" stay intact.
inline std::string extract_crux_output(std::string_view answer_text) {
  std::size_t split = std::string_view::npos;
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i + 1 < answer_text.size(); ++i) {
    char c = answer_text[i];
    if (quote != 0) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      --depth;
    } else if (depth == 0 && c == '=' && answer_text[i + 1] == '=') {
      split = i;
      ++i;
    }
  }
  std::string_view body =
      split == std::string_view::npos ? answer_text : answer_text.substr(split + 2);
  body = trim(body);
  if (body.empty()) raise(ErrorKind::InputMalformed, "empty crux output literal");
  if (parse_literal(body)) return std::string(body);
  if (body.size() >= 3 && body.substr(body.size() - 3) == "\"\"\"") {
    std::string_view stripped = trim(body.substr(0, body.size() - 3));
    if (!stripped.empty()) return std::string(stripped);
  }
  return std::string(body);
}

inline CanonicalAnswer canonicalize_answer(TaskKind kind, std::string_view answer_text) {
  CanonicalAnswer out;
  switch (kind) {
    case TaskKind::Numeric:
      return extract_numeric(answer_text);
    case TaskKind::MultipleChoice:
      out.text = extract_choice(answer_text);
      return out;
    case TaskKind::Game24:
      out.text = normalize_whitespace(extract_game24_expression(answer_text));
      return out;
    case TaskKind::CruxOut: {
      std::string literal = extract_crux_output(answer_text);
      if (auto parsed = parse_literal(literal)) {
        out.text = literal_canonical_text(*parsed);
      } else {
        out.text = normalize_whitespace(literal);
      }
      return out;
    }
  }
  raise(ErrorKind::Internal, "unknown task kind");
}

// --- Output samples --------------------------------------------------------

struct OutputSample {
  std::string question_id;
  int sample_index = 0;
  std::string raw_text;
  std::string reasoning_text;
  std::vector<std::string> statements;
  std::string answer_text;
  CanonicalAnswer canonical_answer;
  bool parsed = false;       // response format and answer both extracted
  std::string parse_error;   // first failure when !parsed
};

// Parses a raw completion into an output sample. Malformed outputs are kept
// (with parsed == false) so callers can count exclusions instead of silently
// dropping them.
inline OutputSample make_output_sample(TaskKind kind, std::string question_id,
                                       int sample_index, std::string raw_text) {
  OutputSample s;
  s.question_id = std::move(question_id);
  s.sample_index = sample_index;
  s.raw_text = std::move(raw_text);
  try {
    ReasoningAnswerSplit split = split_reasoning_answer(s.raw_text);
    s.reasoning_text = split.reasoning;
    s.statements = segment_statements(s.reasoning_text);
    s.answer_text = split.answer;
    s.canonical_answer = canonicalize_answer(kind, s.answer_text);
    s.parsed = true;
  } catch (const Error& e) {
    s.parsed = false;
    s.parse_error = e.what();
  }
  return s;
}

// --- Correctness -----------------------------------------------------------

// Reference answer for one question; which field applies follows the kind.
struct ReferenceAnswer {
  std::string text;                   // numeric literal / choice / crux literal
  std::vector<std::int64_t> numbers;  // game24 given numbers
};

inline bool answer_correct(TaskKind kind, const OutputSample& sample,
                           const ReferenceAnswer& ref) {
  if (!sample.parsed) return false;
  switch (kind) {
    case TaskKind::Numeric: {
      CanonicalAnswer target = extract_numeric("$" + ref.text + "$");
      return sample.canonical_answer == target;
    }
    case TaskKind::MultipleChoice:
      return sample.canonical_answer.text == ref.text;
    case TaskKind::Game24:
      return verify_game24(sample.canonical_answer.text, ref.numbers).valid;
    case TaskKind::CruxOut:
      return compare_crux_literal(sample.canonical_answer.text, ref.text);
  }
  raise(ErrorKind::Internal, "unknown task kind");
}

// --- Reasoning judgment ----------------------------------------------------

enum class JudgeVerdict { Correct, Incorrect, JudgeError };

inline const char* judge_verdict_name(JudgeVerdict v) {
  switch (v) {
    case JudgeVerdict::Correct: return "correct";
    case JudgeVerdict::Incorrect: return "incorrect";
    case JudgeVerdict::JudgeError: return "judge_error";
  }
  return "unknown";
}

namespace task_detail {

// First balanced {...} region outside quotes; empty view when none closes.
inline std::string_view first_json_object(std::string_view text) {
  auto open = text.find('{');
  if (open == std::string_view::npos) return {};
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (quote != 0) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"') {
      quote = c;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return text.substr(open, i - open + 1);
    }
  }
  return {};
}

}  // namespace task_detail

// Judges whether the reasoning supports the answer. A sample whose answer is
// already known wrong is marked incorrect without any gateway traffic. The
// verdict comes back as JSON {"verdict": "correct"|"incorrect"}; anything
// else is a judge error, and such samples leave accuracy denominators.
inline JudgeVerdict judge_reasoning(const std::string& question,
                                    const std::string& reasoning,
                                    bool answer_is_correct, Gateway& judge) {
  if (!answer_is_correct) return JudgeVerdict::Incorrect;

  std::string prompt = render_judge_prompt(question, reasoning);
  auto completions = judge.generate(prompt, SamplingConfig::greedy_preset());
  if (completions.empty()) return JudgeVerdict::JudgeError;

  std::string_view object = task_detail::first_json_object(completions.front().text);
  if (object.empty()) return JudgeVerdict::JudgeError;
  nlohmann::json parsed = nlohmann::json::parse(object, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return JudgeVerdict::JudgeError;
  auto it = parsed.find("verdict");
  if (it == parsed.end() || !it->is_string()) return JudgeVerdict::JudgeError;
  const std::string verdict = it->get<std::string>();
  if (verdict == "correct") return JudgeVerdict::Correct;
  if (verdict == "incorrect") return JudgeVerdict::Incorrect;
  return JudgeVerdict::JudgeError;
}

}  // namespace corepo
