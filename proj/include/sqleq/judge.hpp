#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqleq/errors.hpp"
#include "sqleq/schema.hpp"

namespace sqleq {

// The four prompt shapes. Basic asks for a binary "equivalence" answer;
// Improved grades on a five-point scale ("overall assessment"); MiniatureMull
// instructs the model to simulate executions over invented database instances
// and answer with a bare decision line; CombinedDetailedMM merges the graded
// assessment with the simulated-execution instructions ("overall_assessment").
enum class TemplateKind { Basic, Improved, MiniatureMull, CombinedDetailedMM };

const char* to_string(TemplateKind kind);
TemplateKind template_kind_from_string(const std::string& name);  // InputFormatError

// Five-point grade emitted by the graded templates.
enum class AssessmentGrade {
  Equivalent,
  MinorDifference,
  SignificantDifference,
  NotEquivalent,
  Undetermined,
};

const char* to_string(AssessmentGrade grade);

enum class RunVerdict { Equivalent, NotEquivalent, Undetermined };

const char* to_string(RunVerdict verdict);

// Grade-to-verdict mapping: minor differences count as equivalent under the
// default weak reading; `strict_grades` counts them as not equivalent.
RunVerdict verdict_of(AssessmentGrade grade, bool strict_grades);

// One provider call: the raw text kept verbatim plus what was extracted.
// verdict is Undetermined exactly when extraction failed or the model said so.
struct RunRecord {
  std::string raw_response;
  RunVerdict verdict = RunVerdict::Undetermined;
  std::optional<AssessmentGrade> grade;
  std::string reasoning;
  std::optional<std::string> failure_category;
};

// Inputs for prompt assembly. schema is mandatory for MiniatureMull and
// CombinedDetailedMM (build_prompt throws MissingSlot without it);
// execution_results is an optional pre-rendered block for the graded kinds.
struct PromptInputs {
  std::string nl_question;
  std::string sql1;
  std::string sql2;
  const Schema* schema = nullptr;
  std::optional<std::string> execution_results;
};

// Deterministic prompt text for the template kind; embeds the SQL verbatim
// and ends with that template's answer-format instructions.
std::string build_prompt(TemplateKind kind, const PromptInputs& inputs);

// Extracts the last well-formed JSON object from the raw response and reads
// the template answer keys ("equivalence", "overall assessment" — the
// misspelling "overall accessment" and truncated grade "undermined" are
// accepted — or "overall_assessment"); when no object parses, falls back to
// the `decision = "equivalent"` line format. Anything else yields
// Undetermined with the raw text retained. Never throws.
RunRecord parse_response(const std::string& raw, bool strict_grades = false);

struct JudgeConfig {
  int default_runs = 3;  // first-wave calls; must satisfy 1 <= default <= max
  int max_runs = 5;      // total calls when the first wave disagrees
  double temperature = 0.0;
  TemplateKind kind = TemplateKind::Improved;
  bool strict_grades = false;
};

enum class JudgeVerdict { Equivalent, NotEquivalent, Unstable };

const char* to_string(JudgeVerdict verdict);

struct Judgment {
  JudgeVerdict verdict = JudgeVerdict::Unstable;
  bool stable = false;
  std::vector<RunRecord> runs;
  std::map<RunVerdict, int> vote_counts;
};

// Vote arithmetic, kept pure so the protocol is testable order-independently.
struct VoteTally {
  int equivalent = 0;
  int not_equivalent = 0;
  int undetermined = 0;
};

VoteTally tally(const std::vector<RunVerdict>& votes);

// True when at least one determinate vote exists and no determinate votes
// disagree; an all-Undetermined wave is not unanimous (no evidence yet).
bool unanimous(const VoteTally& t);

// Strict majority among determinate votes; ties (including zero determinate
// votes) are Unstable.
JudgeVerdict majority_verdict(const VoteTally& t);

// Pluggable chat completion. Implementations throw ProviderError when the
// response cannot be obtained.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const std::string& prompt, double temperature) = 0;
};

// Multi-run protocol: issues default_runs calls; a unanimous first wave is
// final and stable. Otherwise extends to exactly max_runs calls and takes the
// strict majority of determinate votes, Unstable on a tie. Undetermined runs
// spend budget but never vote.
Judgment judge(const PromptInputs& inputs, ChatProvider& provider, const JudgeConfig& config = {});

}  // namespace sqleq
