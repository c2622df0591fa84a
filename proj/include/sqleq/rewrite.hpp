#pragma once

#include <string>
#include <vector>

#include "sqleq/ast.hpp"
#include "sqleq/errors.hpp"

namespace sqleq {

// Result of the subquery-flattening pass.
struct RewriteReport {
  SelectStmt statement;                    // rewritten; equals the input when unchanged
  std::vector<std::string> rules_applied;  // rule name per application, in order
  std::vector<std::string> skipped;        // recognized sites deliberately left alone
  bool unchanged = true;
};

// Rewrites subqueries into joins where a safe rule exists:
//
//   in_to_join          x IN (SELECT y FROM t WHERE p)   [uncorrelated]
//                       -> JOIN t ON x = y AND p, outer SELECT DISTINCT
//                          (complex subqueries join as a derived table)
//   exists_to_join      EXISTS (SELECT ... FROM t WHERE p)
//                       -> JOIN t ON p, outer SELECT DISTINCT
//   scalar_agg_to_join  (SELECT AGG(c) FROM t WHERE t.k = outer.k) in the
//                       projection, AGG in {SUM, AVG, MIN, MAX}
//                       -> LEFT JOIN (SELECT k, AGG(c) FROM t GROUP BY k)
//
// The first two rules preserve the result set, not row multiplicity; callers
// that need bag equivalence should validate the rewrite (for example by
// differential testing) before trusting it.
//
// NOT IN, NOT EXISTS, correlated IN, COUNT scalar subqueries and scalar
// comparisons are recognized but never rewritten (COUNT over an empty group
// is 0 while an unmatched LEFT JOIN yields NULL; NOT IN changes meaning when
// NULLs appear). They are listed in `skipped`.
//
// Throws UnsupportedSubquery for shapes outside the rule set: subqueries
// nested more than two levels deep, or subqueries embedded in positions the
// rules do not model (inside ON conditions, GROUP BY / HAVING / ORDER BY,
// function arguments, arithmetic, or CASE branches). Derived tables in FROM
// and union arms are rewritten recursively.
RewriteReport rewrite_subqueries(const SelectStmt& stmt);

}  // namespace sqleq
