#pragma once

#include <string>

#include "sqleq/ast.hpp"
#include "sqleq/normalize.hpp"

namespace sqleq {

struct MatchConfig {
  NormalizationConfig normalization;
  // When true, projection aliases are significant (pairs with the strict
  // result-comparison mode, where output column names matter). The default
  // ignores them, matching bag-style result comparison.
  bool alias_sensitive = false;
};

struct MatchOutcome {
  bool matched = false;
  // First clause that differs, e.g. "where" or "arm 2: projection"; empty
  // when matched.
  std::string mismatch_site;
};

// Text identity after normalization: both statements render to the same
// canonical string.
MatchOutcome exact_match(const SelectStmt& a, const SelectStmt& b, const MatchConfig& config = {});

// Clause-wise structural identity, insensitive to presentation choices that
// cannot change results: inner JOIN ... ON versus comma-FROM plus WHERE,
// table alias spelling, source order, conjunct order, flipped comparison
// operands, and (by default) projection aliases and projection order. A match
// confirms equivalence; a mismatch means only that this matcher cannot tell.
MatchOutcome exact_set_match(const SelectStmt& a, const SelectStmt& b,
                             const MatchConfig& config = {});

// The canonical clause-wise form the set matcher compares, one clause per
// line. Exposed for tests and debugging output.
std::string canonical_set_form(const SelectStmt& stmt, const MatchConfig& config = {});

}  // namespace sqleq
