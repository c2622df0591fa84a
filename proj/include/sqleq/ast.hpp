#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sqleq/value.hpp"

namespace sqleq {

struct Expr;
struct SelectStmt;

using ExprPtr = std::shared_ptr<const Expr>;
using SelectPtr = std::shared_ptr<const SelectStmt>;

enum class BinaryOp { Add, Sub, Mul, Div };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or };
enum class JoinKind { Inner, Left };

enum class FuncKind { Count, Sum, Avg, Min, Max, Lower, Upper, Length, CharLength, Substring, Cast };

bool is_aggregate(FuncKind kind);
const char* to_string(FuncKind kind);
const char* to_string(CompareOp op);
CompareOp mirror(CompareOp op);  // a < b  <=>  b > a

struct ColumnRef {
  std::string table;  // empty when unqualified
  std::string column;
};

struct Literal {
  Value value;
};

struct Negate {
  ExprPtr operand;
};

struct Not {
  ExprPtr operand;
};

struct Binary {
  BinaryOp op;
  ExprPtr lhs, rhs;
};

struct Compare {
  CompareOp op;
  ExprPtr lhs, rhs;
};

struct Logic {
  LogicOp op;
  ExprPtr lhs, rhs;
};

struct Like {
  ExprPtr operand, pattern;
  bool negated = false;
};

struct IsNull {
  ExprPtr operand;
  bool negated = false;
};

struct InList {
  ExprPtr operand;
  std::vector<ExprPtr> items;
  bool negated = false;
};

struct InSubquery {
  ExprPtr operand;
  SelectPtr subquery;
  bool negated = false;
};

struct Exists {
  SelectPtr subquery;
  bool negated = false;
};

struct ScalarSubquery {
  SelectPtr subquery;
};

struct CaseWhen {
  std::vector<std::pair<ExprPtr, ExprPtr>> branches;  // (condition, result)
  ExprPtr else_expr;                                  // may be null
};

struct FuncCall {
  FuncKind kind;
  std::vector<ExprPtr> args;
  bool star = false;                              // COUNT(*)
  ColumnType cast_type = ColumnType::Int;         // Cast only
};

struct Expr {
  using Node = std::variant<ColumnRef, Literal, Negate, Not, Binary, Compare, Logic, Like,
                            IsNull, InList, InSubquery, Exists, ScalarSubquery, CaseWhen, FuncCall>;
  Node node;
};

template <typename T, typename... Args>
ExprPtr make_expr(Args&&... args) {
  return std::make_shared<const Expr>(Expr{T{std::forward<Args>(args)...}});
}

struct SelectItem {
  bool star = false;
  ExprPtr expr;                      // null when star
  std::optional<std::string> alias;  // rendered with AS when present
};

// A named table or a parenthesized derived subquery in FROM.
struct TableSource {
  std::string table;                 // empty when derived
  SelectPtr derived;                 // non-null when derived (alias required)
  std::optional<std::string> alias;

  const std::string& effective_alias() const { return alias ? *alias : table; }
};

struct JoinClause {
  JoinKind kind = JoinKind::Inner;
  TableSource source;
  ExprPtr on;
};

// One comma-separated FROM element: a source followed by explicit joins.
struct FromItem {
  TableSource first;
  std::vector<JoinClause> joins;
};

struct SelectCore {
  bool distinct = false;
  std::vector<SelectItem> items;
  std::vector<FromItem> from;  // empty means no FROM clause
  ExprPtr where;
  std::vector<ExprPtr> group_by;
  ExprPtr having;
};

struct OrderKey {
  ExprPtr expr;
  bool descending = false;
};

struct SelectStmt {
  std::vector<SelectCore> cores;  // two or more cores form a union chain
  std::vector<bool> union_all;    // size cores.size() - 1
  std::vector<OrderKey> order_by;
  std::optional<std::int64_t> limit;
};

// Splits a predicate into its top-level AND conjuncts (left-to-right).
std::vector<ExprPtr> split_conjuncts(const ExprPtr& predicate);

// Rebuilds a left-associated AND chain; empty input yields a null ExprPtr.
ExprPtr join_conjuncts(const std::vector<ExprPtr>& conjuncts);

// True when the expression contains an aggregate call outside any subquery.
bool contains_aggregate(const ExprPtr& expr);

// Structural equality, defined as equality of canonical rendered text.
bool equal(const Expr& a, const Expr& b);
bool equal(const SelectStmt& a, const SelectStmt& b);

}  // namespace sqleq
