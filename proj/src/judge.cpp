#include "sqleq/judge.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

namespace sqleq {
namespace {

constexpr const char* kApplication = "a text-to-SQL evaluation service";

constexpr const char* kRules =
    "1. Both queries are read-only SELECT statements over the same schema.\n"
    "2. String comparisons are case-sensitive.\n"
    "3. Treat NULL with three-valued logic: NULL never equals anything, and\n"
    "   aggregates other than COUNT(*) skip NULLs.\n"
    "4. Column names and column order do not matter; compare the returned rows.\n"
    "5. Row order matters only when both queries specify ORDER BY.\n"
    "6. Duplicate rows matter: DISTINCT, GROUP BY and UNION deduplicate,\n"
    "   UNION ALL does not.";

constexpr const char* kEquivalenceCriteria =
    "Two queries are equivalent when they return the same multiset of rows on\n"
    "every possible database instance of the schema, ignoring column names and\n"
    "column order, and ignoring row order unless both queries order their\n"
    "output. Queries that agree only on some instances are not equivalent.";

constexpr const char* kGradingCriteria =
    "- equivalent: same results on every instance.\n"
    "- minor difference: results differ only in presentation that does not\n"
    "  change which rows are returned (aliases, formatting, redundant clauses).\n"
    "- significant difference: results can differ on realistic data (different\n"
    "  filters, missing joins, aggregation changes).\n"
    "- not equivalent: results clearly differ on almost any data.\n"
    "- undetermined: the queries cannot be analyzed.";

constexpr const char* kBasicExamples =
    "Example 1:\n"
    "Query 1: SELECT name FROM employees WHERE salary > 50000\n"
    "Query 2: SELECT name FROM employees WHERE salary >= 50001\n"
    "Answer: not equivalent (salary is not necessarily an integer; a salary of\n"
    "50000.5 satisfies the first filter but not the second).\n"
    "\n"
    "Example 2:\n"
    "Query 1: SELECT DISTINCT category FROM products\n"
    "Query 2: SELECT category FROM products GROUP BY category\n"
    "Answer: equivalent (grouping with no aggregates deduplicates exactly like\n"
    "DISTINCT).";

constexpr const char* kCotExamples =
    "Example 1:\n"
    "Query 1: SELECT name FROM employees WHERE salary > 50000\n"
    "Query 2: SELECT name FROM employees WHERE salary >= 50001\n"
    "Reasoning: the filters agree on integers but salary can be fractional;\n"
    "a row with salary 50000.5 is returned by Query 1 only. A database with\n"
    "that row separates the queries.\n"
    "Assessment: significant difference.\n"
    "\n"
    "Example 2:\n"
    "Query 1: SELECT DISTINCT category FROM products\n"
    "Query 2: SELECT category AS product_category FROM products GROUP BY category\n"
    "Reasoning: grouping with no aggregates returns one row per distinct\n"
    "category, exactly like DISTINCT; the alias changes only the column name.\n"
    "Assessment: equivalent.";

std::string format_schema(const Schema& schema) {
  std::ostringstream out;
  for (const TableDef& table : schema.tables) {
    out << "TABLE " << table.name << " (";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i > 0) out << ", ";
      out << table.columns[i].name << " " << to_string(table.columns[i].type);
      if (table.primary_key && *table.primary_key == table.columns[i].name)
        out << " PRIMARY KEY";
    }
    for (const ForeignKey& fk : table.foreign_keys)
      out << ", FOREIGN KEY (" << fk.column << ") REFERENCES " << fk.ref_table << "("
          << fk.ref_column << ")";
    out << ")\n";
  }
  return out.str();
}

void require_slot(bool present, const char* slot) {
  if (!present) throw MissingSlot(slot);
}

std::string lower_token(std::string text) {
  std::string out;
  bool pending_sep = false;
  for (char c : text) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '_' || c == '-') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) {
      out.push_back('_');
      pending_sep = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

std::optional<AssessmentGrade> grade_from_token(const std::string& token) {
  if (token == "equivalent") return AssessmentGrade::Equivalent;
  if (token == "minor_difference") return AssessmentGrade::MinorDifference;
  if (token == "significant_difference") return AssessmentGrade::SignificantDifference;
  if (token == "not_equivalent" || token == "inequivalent") return AssessmentGrade::NotEquivalent;
  if (token == "undetermined" || token == "undermined") return AssessmentGrade::Undetermined;
  return std::nullopt;
}

// Finds the last top-level well-formed JSON object in free text. A brace scan
// tracks string literals so braces inside strings do not count; candidates
// that fail to parse are skipped, which also recovers objects nested inside
// truncated outer ones.
std::optional<nlohmann::json> last_json_object(const std::string& raw) {
  std::optional<nlohmann::json> found;
  std::size_t i = 0;
  while ((i = raw.find('{', i)) != std::string::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    std::size_t j = i;
    for (; j < raw.size(); ++j) {
      char c = raw[j];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
      } else if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) break;
      }
    }
    if (j < raw.size() && depth == 0) {
      nlohmann::json candidate = nlohmann::json::parse(raw.substr(i, j - i + 1), nullptr, false);
      if (!candidate.is_discarded() && candidate.is_object()) {
        found = std::move(candidate);
        i = j + 1;
        continue;
      }
    }
    ++i;
  }
  return found;
}

std::optional<std::string> string_field(const nlohmann::json& object, const char* key) {
  auto it = object.find(key);
  if (it != object.end() && it->is_string()) return it->get<std::string>();
  return std::nullopt;
}

}  // namespace

const char* to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::Basic: return "basic";
    case TemplateKind::Improved: return "improved";
    case TemplateKind::MiniatureMull: return "miniature-mull";
    case TemplateKind::CombinedDetailedMM: return "combined";
  }
  return "basic";
}

TemplateKind template_kind_from_string(const std::string& name) {
  if (name == "basic") return TemplateKind::Basic;
  if (name == "improved") return TemplateKind::Improved;
  if (name == "miniature-mull") return TemplateKind::MiniatureMull;
  if (name == "combined") return TemplateKind::CombinedDetailedMM;
  throw InputFormatError("template kind", 0,
                         "unknown template '" + name +
                             "' (expected basic|improved|miniature-mull|combined)");
}

const char* to_string(AssessmentGrade grade) {
  switch (grade) {
    case AssessmentGrade::Equivalent: return "equivalent";
    case AssessmentGrade::MinorDifference: return "minor_difference";
    case AssessmentGrade::SignificantDifference: return "significant_difference";
    case AssessmentGrade::NotEquivalent: return "not_equivalent";
    case AssessmentGrade::Undetermined: return "undetermined";
  }
  return "undetermined";
}

const char* to_string(RunVerdict verdict) {
  switch (verdict) {
    case RunVerdict::Equivalent: return "equivalent";
    case RunVerdict::NotEquivalent: return "not_equivalent";
    case RunVerdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

const char* to_string(JudgeVerdict verdict) {
  switch (verdict) {
    case JudgeVerdict::Equivalent: return "equivalent";
    case JudgeVerdict::NotEquivalent: return "not_equivalent";
    case JudgeVerdict::Unstable: return "unstable";
  }
  return "unstable";
}

RunVerdict verdict_of(AssessmentGrade grade, bool strict_grades) {
  switch (grade) {
    case AssessmentGrade::Equivalent: return RunVerdict::Equivalent;
    case AssessmentGrade::MinorDifference:
      return strict_grades ? RunVerdict::NotEquivalent : RunVerdict::Equivalent;
    case AssessmentGrade::SignificantDifference: return RunVerdict::NotEquivalent;
    case AssessmentGrade::NotEquivalent: return RunVerdict::NotEquivalent;
    case AssessmentGrade::Undetermined: return RunVerdict::Undetermined;
  }
  return RunVerdict::Undetermined;
}

std::string build_prompt(TemplateKind kind, const PromptInputs& inputs) {
  require_slot(!inputs.sql1.empty(), "sql1");
  require_slot(!inputs.sql2.empty(), "sql2");

  std::ostringstream out;
  switch (kind) {
    case TemplateKind::Basic:
      out << "You are a database analyst and an SQL expert. Your task is to determine if two "
             "given SQL queries are semantically equivalent. The queries are intended for "
          << kApplication << ".\n\n"
          << "Please follow the following rules:\n\n"
          << kRules << "\n\n"
          << "and below are some examples:\n\n"
          << kBasicExamples << "\n\n"
          << "NL query:\n" << inputs.nl_question << "\n\n"
          << "Query 1:\n" << inputs.sql1 << "\n\n"
          << "Query 2:\n" << inputs.sql2 << "\n\n"
          << "Please think step by step, and provide your reasoning before giving the final "
             "answer. Output your answer in the following json format:\n"
          << "{\n"
          << "  \"reasoning\": \"Your reasoning here\",\n"
          << "  \"equivalence\": \"equivalent\" or \"not equivalent\"\n"
          << "}\n";
      break;

    case TemplateKind::Improved:
      out << "Task: Determine if two given SQL queries are semantically equivalent. The "
             "queries are intended for "
          << kApplication << ".\n\n"
          << "The criteria of equivalence of two SQL queries are defined as follows:\n"
          << kEquivalenceCriteria << "\n\n"
          << "and the criteria of the assessment are:\n"
          << kGradingCriteria << "\n\n"
          << "Please follow the following rules:\n\n"
          << kRules << "\n\n"
          << "and below are some examples:\n\n"
          << kCotExamples << "\n\n"
          << "NL query:\n" << inputs.nl_question << "\n\n"
          << "Query 1:\n" << inputs.sql1 << "\n\n"
          << "Query 2:\n" << inputs.sql2 << "\n";
      if (inputs.schema) out << "\nSchema:\n" << format_schema(*inputs.schema);
      if (inputs.execution_results)
        out << "\nQuery execution results:\n" << *inputs.execution_results << "\n";
      out << "\nPlease think step by step, and provide your reasoning before giving the final "
             "answer. Output your answer in the following json format:\n"
          << "{\n"
          << "  \"reasoning\": \"Your reasoning here\",\n"
          << "  \"overall assessment\": \"equivalent\"/\"minor difference\"/\"significant "
             "difference\"/\"not equivalent\"/\"undetermined\"\n"
          << "}\n";
      break;

    case TemplateKind::MiniatureMull:
      require_slot(inputs.schema != nullptr, "schema");
      out << "/* Given the following two SQL queries Q1 and Q2 */\n\n"
          << "SQL1:" << inputs.sql1 << "\n"
          << "SQL2:" << inputs.sql2 << "\n\n"
          << "/* And the following database schema: */\n\n"
          << format_schema(*inputs.schema) << "\n"
          << "/* Are Q1 and Q2 semantically equivalent?\n\n"
          << "1. Try one example database and check the output table of Q1 and Q2. Database "
             "is case-sensitive when comparing string values.\n\n"
          << "2. If the outputs are identical, adjust the database to see how output tables "
             "of Q1 and Q2 change.\n\n"
          << "3. After evaluating whether there exists a database such Q1 and Q2 output "
             "different tables, write your answer using format decision = \"equivalent\" or "
             "decision = \"inequivalent\".\n*/\n\n"
          << "/* Let's think step by step. */\n\n"
          << "1. Consider the following example database instance, which is string value "
             "case-sensitive, and execute Q1 and Q2.\n";
      break;

    case TemplateKind::CombinedDetailedMM:
      require_slot(inputs.schema != nullptr, "schema");
      out << "Task: Determine if two given SQL queries are semantically equivalent. The "
             "queries are intended for "
          << kApplication << ".\n\n"
          << "The criteria of equivalence of two SQL queries are defined as follows:\n"
          << kEquivalenceCriteria << "\n\n"
          << "And the criteria of the assessment are:\n"
          << kGradingCriteria << "\n\n"
          << "Please follow the following rules:\n"
          << kRules << "\n\n"
          << "And below are some examples:\n\n"
          << kCotExamples << "\n\n"
          << "NL query:\n" << inputs.nl_question << "\n\n"
          << "Query 1 (Q1):\n" << inputs.sql1 << "\n\n"
          << "Query 2 (Q2):\n" << inputs.sql2 << "\n\n"
          << "Database Schema:\n" << format_schema(*inputs.schema);
      if (inputs.execution_results)
        out << "\nQuery execution results:\n" << *inputs.execution_results << "\n";
      out << "\nTo determine semantic equivalence, please adopt the following thinking "
             "process:\n"
          << "1. Try one example database instance based on the provided schema. Execute Q1 "
             "and Q2 on this database. Remember the database is case-sensitive when "
             "comparing string values.\n"
          << "2. If the outputs of Q1 and Q2 are identical on this first instance, adjust "
             "the database (e.g., add/remove/modify rows or values) to create a new "
             "instance. Re-execute Q1 and Q2 and observe how their output tables change.\n"
          << "3. Repeat step 2 if necessary, trying to find a database instance where Q1 and "
             "Q2 produce different output tables.\n\n"
          << "After thoroughly applying this thinking process, please provide your reasoning "
             "and final assessment.\nOutput your answer in the following JSON format:\n"
          << "{\n"
          << "  \"reasoning\": \"Your step-by-step reasoning, including the database "
             "instances considered and the outputs of Q1 and Q2 on them, and how this led "
             "to your conclusion.\",\n"
          << "  \"overall_assessment\": \"equivalent\" / \"minor_difference\" / "
             "\"significant_difference\" / \"not_equivalent\" / \"undetermined\"\n"
          << "}\n";
      break;
  }
  return out.str();
}

RunRecord parse_response(const std::string& raw, bool strict_grades) {
  RunRecord record;
  record.raw_response = raw;

  if (std::optional<nlohmann::json> object = last_json_object(raw)) {
    if (auto reasoning = string_field(*object, "reasoning")) record.reasoning = *reasoning;
    for (const char* key : {"failure_category", "failure category"}) {
      if (auto category = string_field(*object, key)) {
        record.failure_category = *category;
        break;
      }
    }
    for (const char* key : {"overall_assessment", "overall assessment", "overall accessment"}) {
      if (auto value = string_field(*object, key)) {
        if (auto grade = grade_from_token(lower_token(*value))) {
          record.grade = *grade;
          record.verdict = verdict_of(*grade, strict_grades);
          return record;
        }
      }
    }
    if (auto value = string_field(*object, "equivalence")) {
      std::string token = lower_token(*value);
      if (token == "equivalent") {
        record.verdict = RunVerdict::Equivalent;
        return record;
      }
      if (token == "not_equivalent" || token == "inequivalent") {
        record.verdict = RunVerdict::NotEquivalent;
        return record;
      }
      if (token == "undetermined" || token == "undermined") return record;
    }
  }

  // Bare decision-line format; the last stated decision wins.
  static const std::regex decision_re(
      R"rx(decision\s*=\s*"?(inequivalent|not[\s_]+equivalent|equivalent)"?)rx",
      std::regex_constants::icase);
  auto begin = std::sregex_iterator(raw.begin(), raw.end(), decision_re);
  auto end = std::sregex_iterator();
  std::optional<std::string> last;
  for (auto it = begin; it != end; ++it) last = (*it)[1].str();
  if (last) {
    std::string token = lower_token(*last);
    record.verdict = token == "equivalent" ? RunVerdict::Equivalent : RunVerdict::NotEquivalent;
  }
  return record;
}

VoteTally tally(const std::vector<RunVerdict>& votes) {
  VoteTally t;
  for (RunVerdict v : votes) {
    if (v == RunVerdict::Equivalent)
      ++t.equivalent;
    else if (v == RunVerdict::NotEquivalent)
      ++t.not_equivalent;
    else
      ++t.undetermined;
  }
  return t;
}

bool unanimous(const VoteTally& t) {
  return (t.equivalent > 0) != (t.not_equivalent > 0);
}

JudgeVerdict majority_verdict(const VoteTally& t) {
  if (t.equivalent > t.not_equivalent) return JudgeVerdict::Equivalent;
  if (t.not_equivalent > t.equivalent) return JudgeVerdict::NotEquivalent;
  return JudgeVerdict::Unstable;
}

Judgment judge(const PromptInputs& inputs, ChatProvider& provider, const JudgeConfig& config) {
  if (config.default_runs < 1 || config.default_runs > config.max_runs)
    throw InputFormatError("judge config", 0, "require 1 <= default_runs <= max_runs");

  const std::string prompt = build_prompt(config.kind, inputs);
  Judgment result;
  std::vector<RunVerdict> votes;
  auto run_once = [&] {
    std::string raw = provider.complete(prompt, config.temperature);
    RunRecord record = parse_response(raw, config.strict_grades);
    votes.push_back(record.verdict);
    result.runs.push_back(std::move(record));
  };

  for (int i = 0; i < config.default_runs; ++i) run_once();
  VoteTally first_wave = tally(votes);
  if (unanimous(first_wave)) {
    result.verdict = first_wave.equivalent > 0 ? JudgeVerdict::Equivalent
                                               : JudgeVerdict::NotEquivalent;
    result.stable = true;
  } else {
    while (static_cast<int>(votes.size()) < config.max_runs) run_once();
    result.verdict = majority_verdict(tally(votes));
    result.stable = false;
  }

  result.vote_counts[RunVerdict::Equivalent] = 0;
  result.vote_counts[RunVerdict::NotEquivalent] = 0;
  result.vote_counts[RunVerdict::Undetermined] = 0;
  for (RunVerdict v : votes) ++result.vote_counts[v];
  return result;
}

}  // namespace sqleq
