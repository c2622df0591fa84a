#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqleq/dataset.hpp"
#include "sqleq/oracle.hpp"

namespace sqleq {

// Where a curated fixture pair comes from.
//  AppendixA: execution-accuracy pitfalls (false positives / false negatives).
//  AppendixB: equivalent-pattern exemplars; every case is expected to survive
//             the execution oracle on all instances.
//  AppendixC: inequivalent-pattern exemplars; every case is expected to yield
//             a counterexample.
//  DevSet:    one pair per pipeline failure tag, used for tuning.
enum class FixtureSource { AppendixA, AppendixB, AppendixC, DevSet };

const char* to_string(FixtureSource source);
std::optional<FixtureSource> fixture_source_from_string(const std::string& name);

// Frozen outcomes a fixture must reproduce: the differential-oracle status in
// the default bag comparison (seed 0, 16 instances) and the two string
// matchers with default configuration.
struct FixtureExpectation {
  OracleStatus oracle = OracleStatus::ExecutionFailed;
  bool exact_match = false;
  bool exact_set_match = false;
};

struct FixtureCase {
  std::string id;
  FixtureSource source;
  QueryPair pair;
  FixtureExpectation expected;
};

// File names inside a fixture directory.
inline constexpr const char* kAppendixAFile = "appendix_a.jsonl";
inline constexpr const char* kAppendixBFile = "appendix_b.jsonl";
inline constexpr const char* kAppendixCFile = "appendix_c.jsonl";
inline constexpr const char* kDevSetFile = "dev_set.jsonl";
inline constexpr const char* kExpectationsFile = "expectations.json";

// Oracle settings the expectations were frozen under.
inline constexpr int kFixtureOracleInstances = 16;
inline constexpr std::uint64_t kFixtureOracleSeed = 0;

// Loads the shipped corpus from `dir`, optionally restricted to one source.
// Every pair is parsed, every id must have an expectations entry, and the
// per-source polarity rules are enforced (AppendixB cases expect
// equivalence on all instances, AppendixC cases expect a counterexample).
// Violations raise FixtureCorrupt with the offending file and line.
std::vector<FixtureCase> load_fixtures(const std::string& dir,
                                       std::optional<FixtureSource> filter = {});

}  // namespace sqleq
