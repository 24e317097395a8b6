#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Fixed substitution values shared by the golden-fixture tests and the
// acceptance runner. Changing any of these requires regenerating the files
// under tests/golden/.

namespace golden {

inline const std::string kQuestion = "What is the freezing point of water in the Celsius scale?";
inline const std::string kReasoning =
    "Water freezes at 0 degrees Celsius at standard pressure.";
inline const std::string kAnswer = "[I]";

inline const std::vector<std::string> kDistractors = {
    "Distractor reasoning one.",
    "Distractor reasoning two.",
    "Distractor reasoning three.",
    "Distractor reasoning four.",
};

inline const std::vector<std::string> kStatements = {
    "Water freezes at 0 C.",
    "This is at standard pressure.",
    "So the answer is [I].",
};

inline const std::string kCruxCode = "def f(xs):\n    return xs[::-1]";
inline const std::string kCruxInput = "[1, 2, 3]";

inline const std::vector<std::int64_t> kGame24Numbers = {4, 4, 6, 8};

}  // namespace golden
