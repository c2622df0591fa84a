#pragma once

#include <functional>

#include "sqleq/ast.hpp"

namespace sqleq {

// Hook applied to every rebuilt expression node, outermost last. Returning
// the input unchanged is always safe.
using ExprHook = std::function<ExprPtr(const ExprPtr&)>;

// Hook applied to every subquery encountered inside an expression
// (IN/EXISTS/scalar). The callee decides how (and whether) to recurse.
using StmtHook = std::function<SelectPtr(const SelectPtr&)>;

// Rebuilds an expression bottom-up: children first, then `post` on the new
// node. Subqueries are replaced by `subquery(s)` without further descent
// here. Null expressions pass through.
ExprPtr transform_expr(const ExprPtr& expr, const ExprHook& post, const StmtHook& subquery);

// Applies the hooks across a whole statement: every expression in every
// clause (projection, FROM joins, WHERE, GROUP BY, HAVING, ORDER BY) and
// every derived table and expression subquery, recursively.
SelectStmt transform_statement(const SelectStmt& stmt, const ExprHook& post);

}  // namespace sqleq
