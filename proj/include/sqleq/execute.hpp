#pragma once

#include "sqleq/ast.hpp"
#include "sqleq/errors.hpp"
#include "sqleq/schema.hpp"

namespace sqleq {

// Evaluates a statement against an in-memory instance under bag semantics:
// three-valued NULL logic in predicates, aggregates that skip NULL (COUNT(*)
// counts rows), case-sensitive string comparison, UNION deduplicating and
// UNION ALL not, ORDER BY as a stable sort with NULLs last. Throws ExecError.
ResultTable execute(const SelectStmt& stmt, const DatabaseInstance& instance);

}  // namespace sqleq
