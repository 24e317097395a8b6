#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "corepo/error.hpp"

namespace corepo {

// Prompt templates are fixed text. The marker form (template_text) is what
// the versioned asset files under assets/prompts/ contain; the render_*
// functions splice real values into the same segments, so the two cannot
// drift apart. Rendering is pure string assembly: byte-stable for equal
// inputs.

enum class TemplateId {
  TaskNumeric,
  TaskMultipleChoice,
  TaskGame24,
  TaskCruxOut,
  ConfidenceMonolithic,
  ConfidenceStatementwise,
  ConfidenceAnswer,
  JudgeReasoning,
};

inline constexpr const char* kPromptAssetVersion = "v1";

inline const char* template_asset_name(TemplateId id) {
  switch (id) {
    case TemplateId::TaskNumeric: return "task_numeric.txt";
    case TemplateId::TaskMultipleChoice: return "task_multiple_choice.txt";
    case TemplateId::TaskGame24: return "task_game24.txt";
    case TemplateId::TaskCruxOut: return "task_crux_out.txt";
    case TemplateId::ConfidenceMonolithic: return "confidence_monolithic.txt";
    case TemplateId::ConfidenceStatementwise: return "confidence_statementwise.txt";
    case TemplateId::ConfidenceAnswer: return "confidence_answer.txt";
    case TemplateId::JudgeReasoning: return "judge_reasoning.txt";
  }
  raise(ErrorKind::Internal, "unknown template id");
}

namespace prompt_detail {

inline constexpr std::string_view kTaskIntro =
    "Answer the following question using **reasoning** before providing a final answer. "
    "Provide a precise, structured, and well-reasoned response.";

inline constexpr std::string_view kResponseFormatHeader = "### Response Format";

inline constexpr std::string_view kUnderstandingLine =
    "**Understanding the question:** <identify key details>";

inline constexpr std::string_view kReasoningLine =
    "**Reasoning:** <perform chain-of-thought>";

inline constexpr std::string_view kCruxReasoningLine =
    "**Reasoning:** <perform chain-of-thought (step-by-step execution)>";

inline constexpr std::string_view kNumericFinalAnswerLine =
    "**Final answer:** \"The answer is $<value>$\"";

inline constexpr std::string_view kChoiceFinalAnswerLine =
    "**Final answer:** \"The answer is <choose the most promising single answer from "
    "[I] / [II] / [III] / [IV]> which is <copy the content>\"";

inline constexpr std::string_view kClosingCommon =
    "Ensure correctness and clarity. Return a concise and definitive response to the "
    "question. ";

inline constexpr std::string_view kClosingTail = "STRICTLY FOLLOW THE RESPONSE FORMAT.";

inline constexpr std::string_view kChoiceClosingExtra =
    "DO NOT RETURN TWO OR MORE ANSWERS. ";

inline constexpr std::string_view kGame24ClosingExtra =
    "THE LHS EXPRESSION MUST USE THE FOUR GIVEN NUMBERS EXACTLY ONCE. "
    "DO NOT SIMPLIFY THE FINAL EQUATION. ";

inline constexpr std::string_view kGame24QuestionHead =
    "\"Write an equation using basic arithmetic operations (+ - * /) to obtain $24$ "
    "from the four given numbers, e.g., \"(4 + 8) * (6 - 4) = 24\" from the input "
    "[4, 4, 6, 8]. You must use all the given numbers exactly once, i.e., simply "
    "rearrange them. Do not use any additional numbers. Parentheses can be used to "
    "control the order of operations. Now, write an expression using exactly the "
    "given numbers ";

inline constexpr std::string_view kGame24QuestionTail = " that results in $24$.";

inline constexpr std::string_view kCruxIntro =
    "You are given a Python function and an assertion containing an input to the "
    "function. Complete the assertion with a literal (no unsimplified expressions, no "
    "function calls) containing the output when executing the provided code on the "
    "given input, even if the function is incorrect or incomplete. Execute the program "
    "step by step as **reasoning** before providing a final answer. Provide a precise, "
    "structured, and well-reasoned response.";

inline constexpr std::string_view kMonolithicIntro =
    "Answer whether the **selected reasoning** is correct for the given **question**. "
    "Additionally, we provide randomly generated reasoning before presenting the "
    "selected reasoning.";

inline constexpr std::string_view kDistractorHead = "**Randomly generated reasoning ";

inline constexpr std::string_view kDistractorTail =
    " (this may be either correct or incorrect):** ";

inline constexpr std::string_view kMonolithicQuestionTrue = "Is the **selected reasoning** correct?";

inline constexpr std::string_view kMonolithicSlot =
    "The **selected reasoning** is: [A / B, depending on whether the **selected "
    "reasoning** is correct given the **question**]";

inline constexpr std::string_view kStatementIntro =
    "Answer whether the **new reasoning statement** is correct for the given "
    "**previous reasoning statements** and the **question**.";

inline constexpr std::string_view kPreviousHeader = "**Previous reasoning statements:**";

inline constexpr std::string_view kStatementQuestionTrue =
    "Is the **new reasoning statement** correct?";

inline constexpr std::string_view kStatementSlot =
    "The **new reasoning statement** is: [A / B, depending on whether the **new "
    "reasoning statement** is correct given the **previous reasoning statements** and "
    "the **question**]";

inline constexpr std::string_view kAnswerIntro =
    "Answer whether the **selected answer** is correct for the given **question**, "
    "based on the provided **reasoning**.";

inline constexpr std::string_view kAnswerQuestionTrue = "Is the **selected answer** correct?";

inline constexpr std::string_view kAnswerSlot =
    "The **selected answer** is: [A / B, depending on whether the **selected answer** "
    "is correct given the **question** and the **reasoning**]";

inline constexpr std::string_view kTrueFalseOptions = "A) True\n\nB) False";

inline constexpr std::string_view kJudgeText =
    "Given a question, answer whether the reasoning could be correct.\n"
    "\n"
    "Respond ONLY in JSON format:\n"
    "\n"
    "{\n"
    "\"verdict\": \"correct\" or \"incorrect\"\n"
    "}\n"
    "\n"
    "**Question:** ";

inline std::string task_body(std::string_view question, std::string_view final_answer_line,
                             std::string_view closing_extra) {
  std::string out;
  out.reserve(kTaskIntro.size() + question.size() + 512);
  out.append(kTaskIntro);
  out.append("\n\n**Question:** ");
  out.append(question);
  out.append("\n\n");
  out.append(kResponseFormatHeader);
  out.append("\n\n");
  out.append(kUnderstandingLine);
  out.append("\n\n");
  out.append(kReasoningLine);
  out.append("\n\n");
  out.append(final_answer_line);
  out.append("\n\n");
  out.append(kClosingCommon);
  out.append(closing_extra);
  out.append(kClosingTail);
  return out;
}

inline std::string true_false_block(std::string_view lead_question, std::string_view slot) {
  std::string out;
  out.append(lead_question);
  out.append("\n\n");
  out.append(kTrueFalseOptions);
  out.append("\n\n");
  out.append(slot);
  return out;
}

}  // namespace prompt_detail

inline std::string render_numeric_prompt(std::string_view question) {
  return prompt_detail::task_body(question, prompt_detail::kNumericFinalAnswerLine, "");
}

inline std::string render_multiple_choice_prompt(std::string_view question) {
  return prompt_detail::task_body(question, prompt_detail::kChoiceFinalAnswerLine,
                                  prompt_detail::kChoiceClosingExtra);
}

// Formats four given numbers the way the template's own example writes them:
// "[4, 4, 6, 8]".
inline std::string format_game24_numbers(const std::vector<std::int64_t>& numbers) {
  std::string out = "[";
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    if (i) out.append(", ");
    out.append(std::to_string(numbers[i]));
  }
  out.push_back(']');
  return out;
}

inline std::string render_game24_prompt_text(std::string_view numbers_text) {
  std::string question;
  question.reserve(prompt_detail::kGame24QuestionHead.size() + numbers_text.size() + 32);
  question.append(prompt_detail::kGame24QuestionHead);
  question.append(numbers_text);
  question.append(prompt_detail::kGame24QuestionTail);
  return prompt_detail::task_body(question, prompt_detail::kNumericFinalAnswerLine,
                                  prompt_detail::kGame24ClosingExtra);
}

inline std::string render_game24_prompt(const std::vector<std::int64_t>& numbers) {
  return render_game24_prompt_text(format_game24_numbers(numbers));
}

inline std::string render_crux_prompt(std::string_view code, std::string_view input) {
  std::string out;
  out.reserve(prompt_detail::kCruxIntro.size() + code.size() + input.size() + 512);
  out.append(prompt_detail::kCruxIntro);
  out.append("\n\n**Code:** ");
  out.append(code);
  out.append("\n\n");
  out.append(prompt_detail::kResponseFormatHeader);
  out.append("\n\n");
  out.append(prompt_detail::kCruxReasoningLine);
  out.append("\n\n**Final answer:** assert f(");
  out.append(input);
  out.append(") == <output>\"\"\"\n\n");
  out.append(prompt_detail::kClosingCommon);
  out.append(prompt_detail::kClosingTail);
  return out;
}

namespace prompt_detail {

inline std::string monolithic_body(std::string_view question, std::string_view reasoning,
                                   std::string_view distractor_region) {
  std::string out;
  out.reserve(kMonolithicIntro.size() + question.size() + reasoning.size() +
              distractor_region.size() + 512);
  out.append(kMonolithicIntro);
  out.append("\n\n**Question:** ");
  out.append(question);
  out.append("\n\n");
  out.append(distractor_region);  // Empty when there are no distractors.
  out.append("**Selected reasoning:** ");
  out.append(reasoning);
  out.append("\n\n");
  out.append(true_false_block(kMonolithicQuestionTrue, kMonolithicSlot));
  return out;
}

inline std::string statementwise_body(std::string_view question,
                                      std::string_view previous_region,
                                      std::string_view statement) {
  std::string out;
  out.reserve(kStatementIntro.size() + question.size() + previous_region.size() +
              statement.size() + 512);
  out.append(kStatementIntro);
  out.append("\n\n**Question:** ");
  out.append(question);
  out.append("\n\n");
  out.append(kPreviousHeader);
  out.push_back('\n');
  out.append(previous_region);  // One line per statement, each '\n'-terminated.
  out.append("\n**New reasoning statement:** ");
  out.append(statement);
  out.append("\n\n");
  out.append(true_false_block(kStatementQuestionTrue, kStatementSlot));
  return out;
}

}  // namespace prompt_detail

inline std::string render_monolithic_prompt(std::string_view question,
                                            std::string_view reasoning,
                                            const std::vector<std::string>& distractors) {
  std::string region;
  for (std::size_t i = 0; i < distractors.size(); ++i) {
    region.append(prompt_detail::kDistractorHead);
    region.append(std::to_string(i + 1));
    region.append(prompt_detail::kDistractorTail);
    region.append(distractors[i]);
    region.append("\n\n");
  }
  return prompt_detail::monolithic_body(question, reasoning, region);
}

// Renders the prompt scoring statement k (1-based position implied by the
// size of previous_statements) against the statements before it.
inline std::string render_statementwise_prompt(std::string_view question,
                                               const std::vector<std::string>& previous_statements,
                                               std::string_view statement) {
  std::string region;
  for (const auto& p : previous_statements) {
    region.append(p);
    region.push_back('\n');
  }
  return prompt_detail::statementwise_body(question, region, statement);
}

inline std::string render_answer_prompt(std::string_view question, std::string_view reasoning,
                                        std::string_view answer) {
  std::string out;
  out.reserve(prompt_detail::kAnswerIntro.size() + question.size() + reasoning.size() +
              answer.size() + 512);
  out.append(prompt_detail::kAnswerIntro);
  out.append("\n\n**Question:** ");
  out.append(question);
  out.append("\n\n**Reasoning:** ");
  out.append(reasoning);
  out.append("\n\n**Selected answer:** ");
  out.append(answer);
  out.append("\n\n");
  out.append(prompt_detail::true_false_block(prompt_detail::kAnswerQuestionTrue,
                                             prompt_detail::kAnswerSlot));
  return out;
}

inline std::string render_judge_prompt(std::string_view question, std::string_view reasoning) {
  std::string out;
  out.reserve(prompt_detail::kJudgeText.size() + question.size() + reasoning.size() + 32);
  out.append(prompt_detail::kJudgeText);
  out.append(question);
  out.append("\n\n**Reasoning:** ");
  out.append(reasoning);
  return out;
}

// Marker form of each template: what the checked-in asset files hold. The
// monolithic template shows the first and M-th distractor blocks separated
// by a "..." line, mirroring how the statement list is abbreviated in the
// statement-wise template.
inline std::string template_text(TemplateId id) {
  using namespace prompt_detail;
  switch (id) {
    case TemplateId::TaskNumeric:
      return render_numeric_prompt("[question]");
    case TemplateId::TaskMultipleChoice:
      return render_multiple_choice_prompt("[question]");
    case TemplateId::TaskGame24:
      return render_game24_prompt_text("[four digits]");
    case TemplateId::TaskCruxOut:
      return render_crux_prompt("[code]", "[input]");
    case TemplateId::ConfidenceMonolithic: {
      std::string region;
      region.append(kDistractorHead);
      region.append("1");
      region.append(kDistractorTail);
      region.append("[example 1]\n\n...\n\n");
      region.append(kDistractorHead);
      region.append("M");
      region.append(kDistractorTail);
      region.append("[example M]\n\n");
      return monolithic_body("[question]", "[reasoning]", region);
    }
    case TemplateId::ConfidenceStatementwise:
      return statementwise_body("[question]", "[step-1]\n...\n[step-(k-1)]\n", "[step-k]");
    case TemplateId::ConfidenceAnswer:
      return render_answer_prompt("[question]", "[reasoning]", "[answer]");
    case TemplateId::JudgeReasoning:
      return render_judge_prompt("[question]", "[reasoning]");
  }
  raise(ErrorKind::Internal, "unknown template id");
}

inline std::vector<TemplateId> all_template_ids() {
  return {TemplateId::TaskNumeric,          TemplateId::TaskMultipleChoice,
          TemplateId::TaskGame24,           TemplateId::TaskCruxOut,
          TemplateId::ConfidenceMonolithic, TemplateId::ConfidenceStatementwise,
          TemplateId::ConfidenceAnswer,     TemplateId::JudgeReasoning};
}

}  // namespace corepo
