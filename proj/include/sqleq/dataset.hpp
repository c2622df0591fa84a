#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqleq/schema.hpp"

namespace sqleq {

// Gold polarity of a query pair.
enum class PairLabel { Equivalent, Inequivalent };

const char* to_string(PairLabel label);
std::optional<PairLabel> pair_label_from_string(const std::string& name);

// Pattern templates the synthetic corpus is drawn from. The first eleven
// produce equivalent pairs, the last eight inequivalent ones.
enum class PatternCategory {
  JoinVsSubquery,
  DistinctVsGroupBy,
  ImplicitVsExplicitJoin,
  AliasVsFullName,
  DateFormat,
  CaseFormatting,
  AggregationMethods,
  FilteringMethods,
  CaseVsUnionWhere,
  OrderByVariants,
  ExistsVsJoin,
  WrongJoinCondition,
  WrongWhere,
  WrongAggregation,
  DistinctGroupByMisuse,
  WrongSubquery,
  AndOrError,
  WrongOrderBy,
  FunctionMisuse,
};

const char* to_string(PatternCategory category);
std::optional<PatternCategory> category_from_string(const std::string& name);
PairLabel polarity(PatternCategory category);

const std::vector<PatternCategory>& all_categories();
const std::vector<PatternCategory>& equivalent_categories();
const std::vector<PatternCategory>& inequivalent_categories();

// A natural-language question with two candidate SQL translations.
struct QueryPair {
  std::string id;
  std::string nl_question;
  std::string sql1;
  std::string sql2;
  Schema schema;
  std::optional<PairLabel> gold;
  std::optional<PatternCategory> category;
};

// One JSONL record: {"id", "nl_question", "sql1", "sql2", "label",
// "category", "schema"}. Optional fields are omitted when absent; key order
// is fixed so serialization is byte-deterministic.
std::string to_json_line(const QueryPair& pair);
QueryPair query_pair_from_json(const std::string& line);

// Loads a JSONL pair file; `file` names the source in error messages.
std::vector<QueryPair> load_pairs(const std::string& path);
void write_pairs(const std::string& path, const std::vector<QueryPair>& pairs);

// Instantiates one category template over a schema drawn from the built-in
// universe pool. Deterministic in `seed`; the result is NOT yet verified.
QueryPair generate_pair(PatternCategory category, std::uint64_t seed);

struct DatasetSpec {
  std::map<PatternCategory, int> counts;  // pairs per category
  std::uint64_t seed = 0;
  int rows_per_table = 5;   // seed-instance size used for verification
  int attempt_limit = 50;   // candidate regenerations per slot
  std::string output_dir;
};

// 80 equivalent (the first three categories get 8 pairs, the rest 7) and 80
// inequivalent (10 per category).
std::map<PatternCategory, int> default_counts();

struct DatasetFiles {
  std::string equivalent_main;     // larger share of the equivalent pairs
  std::string equivalent_holdout;  // remaining quarter of the equivalent pairs
  std::string inequivalent;
  std::vector<QueryPair> pairs;  // everything generated, in file order
};

// Generates and verifies the corpus. Every pair is checked with the
// execution oracle (16 perturbed instances, verification seed 0): equivalent
// pairs must survive all instances, inequivalent pairs must yield a
// counterexample. Failed candidates are regenerated with a stepped seed, at
// most 50 attempts per slot; a slot that never verifies raises
// GenerationExhausted. The equivalent pairs are split 3:1 across two files.
DatasetFiles generate_dataset(const DatasetSpec& spec);

// Verification settings shared by generation and the acceptance checks.
inline constexpr int kVerifyInstances = 16;
inline constexpr std::uint64_t kVerifySeed = 0;
inline constexpr int kAttemptLimit = 50;

}  // namespace sqleq
