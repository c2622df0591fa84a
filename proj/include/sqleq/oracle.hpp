#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sqleq/ast.hpp"
#include "sqleq/instance_gen.hpp"
#include "sqleq/schema.hpp"

namespace sqleq {

// How result tables are compared.
//  Strict:     column names, column order and row order must all match.
//  Positional: row and column order must match; names are ignored.
//  Bag:        row multisets must match under some column permutation; when
//              both results carry an ORDER BY, the orderings must be
//              compatible (some tie-respecting interleaving of both exists).
// Strict acceptance implies Positional acceptance implies Bag acceptance.
enum class CompareMode { Strict, Positional, Bag };

const char* to_string(CompareMode mode);
std::optional<CompareMode> compare_mode_from_string(const std::string& name);

// Empty when the tables match under the mode; otherwise a human-readable
// description of the first difference found.
std::optional<std::string> results_mismatch(const ResultTable& a, const ResultTable& b,
                                            CompareMode mode);

bool results_match(const ResultTable& a, const ResultTable& b, CompareMode mode);

struct DifferentialConfig {
  std::uint64_t seed = 0;
  int instances = 8;       // databases tried before concluding equivalence
  int rows_per_table = 5;  // size of the seed instance
  CompareMode mode = CompareMode::Bag;
};

enum class OracleStatus {
  EquivalentOnAllInstances,  // no instance distinguished the two queries
  CounterexampleFound,       // some instance produced differing outputs
  ExecutionFailed,           // no instance produced a comparable outcome
};

const char* to_string(OracleStatus status);

struct OracleReport {
  OracleStatus status = OracleStatus::ExecutionFailed;
  int instances_tried = 0;
  // Populated when status is CounterexampleFound: the distinguishing
  // database and, when both queries executed, both outputs.
  std::optional<DatabaseInstance> counterexample;
  std::optional<ResultTable> first_result;
  std::optional<ResultTable> second_result;
  std::string detail;

  std::string to_json() const;
};

// Runs both queries on a seeded instance and on a chain of perturbed
// successors, comparing outputs under the configured mode. A one-sided
// execution error counts as a counterexample; instances where both queries
// fail are skipped as uninformative.
OracleReport differential_test(const SelectStmt& first, const SelectStmt& second,
                               const Schema& schema, const DifferentialConfig& config = {});

}  // namespace sqleq
