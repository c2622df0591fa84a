#include "sqleq/render.hpp"

#include <sstream>

namespace sqleq {

bool is_aggregate(FuncKind kind) {
  switch (kind) {
    case FuncKind::Count:
    case FuncKind::Sum:
    case FuncKind::Avg:
    case FuncKind::Min:
    case FuncKind::Max:
      return true;
    default:
      return false;
  }
}

const char* to_string(FuncKind kind) {
  switch (kind) {
    case FuncKind::Count: return "COUNT";
    case FuncKind::Sum: return "SUM";
    case FuncKind::Avg: return "AVG";
    case FuncKind::Min: return "MIN";
    case FuncKind::Max: return "MAX";
    case FuncKind::Lower: return "LOWER";
    case FuncKind::Upper: return "UPPER";
    case FuncKind::Length: return "LENGTH";
    case FuncKind::CharLength: return "CHAR_LENGTH";
    case FuncKind::Substring: return "SUBSTRING";
    case FuncKind::Cast: return "CAST";
  }
  return "?";
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

CompareOp mirror(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

namespace {

// Precedence levels used to decide where parentheses are required.
constexpr int kOr = 1;
constexpr int kAnd = 2;
constexpr int kNot = 3;
constexpr int kPredicate = 4;
constexpr int kAdditive = 5;
constexpr int kMultiplicative = 6;
constexpr int kUnary = 7;
constexpr int kPrimary = 8;

class Renderer {
 public:
  explicit Renderer(const RenderStyle& style) : style_(style) {}

  std::string statement(const SelectStmt& stmt) {
    std::ostringstream out;
    write_statement(out, stmt);
    if (style_.trailing_semicolon) out << ";";
    return out.str();
  }

  std::string expression(const ExprPtr& expr) {
    std::ostringstream out;
    write_expr(out, expr, kOr);
    return out.str();
  }

 private:
  std::string kw(const char* upper_text) const {
    if (style_.uppercase_keywords) return upper_text;
    std::string lower(upper_text);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lower;
  }

  void write_statement(std::ostringstream& out, const SelectStmt& stmt) {
    for (std::size_t i = 0; i < stmt.cores.size(); ++i) {
      if (i > 0) {
        out << " " << kw("UNION");
        if (stmt.union_all[i - 1]) out << " " << kw("ALL");
        out << " ";
      }
      write_core(out, stmt.cores[i]);
    }
    if (!stmt.order_by.empty()) {
      out << " " << kw("ORDER BY") << " ";
      for (std::size_t i = 0; i < stmt.order_by.size(); ++i) {
        if (i > 0) out << ", ";
        write_expr(out, stmt.order_by[i].expr, kOr);
        if (stmt.order_by[i].descending) out << " " << kw("DESC");
      }
    }
    if (stmt.limit) {
      out << " " << kw("LIMIT") << " " << *stmt.limit;
    }
  }

  void write_core(std::ostringstream& out, const SelectCore& core) {
    out << kw("SELECT") << " ";
    if (core.distinct) out << kw("DISTINCT") << " ";
    for (std::size_t i = 0; i < core.items.size(); ++i) {
      if (i > 0) out << ", ";
      const SelectItem& item = core.items[i];
      if (item.star) {
        out << "*";
        continue;
      }
      write_expr(out, item.expr, kOr);
      if (item.alias) {
        if (style_.explicit_alias_keyword) out << " " << kw("AS");
        out << " " << *item.alias;
      }
    }
    if (!core.from.empty()) {
      out << " " << kw("FROM") << " ";
      for (std::size_t i = 0; i < core.from.size(); ++i) {
        if (i > 0) out << ", ";
        write_from_item(out, core.from[i]);
      }
    }
    if (core.where) {
      out << " " << kw("WHERE") << " ";
      write_expr(out, core.where, kOr);
    }
    if (!core.group_by.empty()) {
      out << " " << kw("GROUP BY") << " ";
      for (std::size_t i = 0; i < core.group_by.size(); ++i) {
        if (i > 0) out << ", ";
        write_expr(out, core.group_by[i], kOr);
      }
    }
    if (core.having) {
      out << " " << kw("HAVING") << " ";
      write_expr(out, core.having, kOr);
    }
  }

  void write_source(std::ostringstream& out, const TableSource& source) {
    if (source.derived) {
      out << "(";
      write_statement(out, *source.derived);
      out << ")";
      out << " " << kw("AS") << " " << source.effective_alias();
      return;
    }
    out << source.table;
    if (source.alias) {
      if (style_.explicit_alias_keyword) out << " " << kw("AS");
      out << " " << *source.alias;
    }
  }

  void write_from_item(std::ostringstream& out, const FromItem& item) {
    write_source(out, item.first);
    for (const JoinClause& join : item.joins) {
      out << " " << kw(join.kind == JoinKind::Left ? "LEFT JOIN" : "JOIN") << " ";
      write_source(out, join.source);
      out << " " << kw("ON") << " ";
      write_expr(out, join.on, kOr);
    }
  }

  void write_wrapped(std::ostringstream& out, const ExprPtr& expr, int own, int min_level,
                     auto&& body) {
    if (own < min_level) {
      out << "(";
      body();
      out << ")";
    } else {
      body();
    }
    (void)expr;
  }

  void write_expr(std::ostringstream& out, const ExprPtr& expr, int min_level) {
    const Expr::Node& node = expr->node;
    if (auto* column = std::get_if<ColumnRef>(&node)) {
      if (!column->table.empty()) out << column->table << ".";
      out << column->column;
      return;
    }
    if (auto* literal = std::get_if<Literal>(&node)) {
      write_literal(out, literal->value);
      return;
    }
    if (auto* negate = std::get_if<Negate>(&node)) {
      write_wrapped(out, expr, kUnary, min_level, [&] {
        out << "-";
        write_expr(out, negate->operand, kPrimary);
      });
      return;
    }
    if (auto* inversion = std::get_if<Not>(&node)) {
      write_wrapped(out, expr, kNot, min_level, [&] {
        out << kw("NOT") << " ";
        write_expr(out, inversion->operand, kPredicate);
      });
      return;
    }
    if (auto* binary = std::get_if<Binary>(&node)) {
      bool additive = binary->op == BinaryOp::Add || binary->op == BinaryOp::Sub;
      int own = additive ? kAdditive : kMultiplicative;
      const char* symbol = binary->op == BinaryOp::Add   ? "+"
                           : binary->op == BinaryOp::Sub ? "-"
                           : binary->op == BinaryOp::Mul ? "*"
                                                         : "/";
      write_wrapped(out, expr, own, min_level, [&] {
        write_expr(out, binary->lhs, own);
        out << " " << symbol << " ";
        write_expr(out, binary->rhs, own + 1);
      });
      return;
    }
    if (auto* compare = std::get_if<Compare>(&node)) {
      write_wrapped(out, expr, kPredicate, min_level, [&] {
        write_expr(out, compare->lhs, kAdditive);
        out << " " << to_string(compare->op) << " ";
        write_expr(out, compare->rhs, kAdditive);
      });
      return;
    }
    if (auto* logic = std::get_if<Logic>(&node)) {
      int own = logic->op == LogicOp::And ? kAnd : kOr;
      write_wrapped(out, expr, own, min_level, [&] {
        write_expr(out, logic->lhs, own);
        out << " " << kw(logic->op == LogicOp::And ? "AND" : "OR") << " ";
        write_expr(out, logic->rhs, own + 1);
      });
      return;
    }
    if (auto* like = std::get_if<Like>(&node)) {
      write_wrapped(out, expr, kPredicate, min_level, [&] {
        write_expr(out, like->operand, kAdditive);
        out << " " << kw(like->negated ? "NOT LIKE" : "LIKE") << " ";
        write_expr(out, like->pattern, kAdditive);
      });
      return;
    }
    if (auto* isnull = std::get_if<IsNull>(&node)) {
      write_wrapped(out, expr, kPredicate, min_level, [&] {
        write_expr(out, isnull->operand, kAdditive);
        out << " " << kw(isnull->negated ? "IS NOT NULL" : "IS NULL");
      });
      return;
    }
    if (auto* in_list = std::get_if<InList>(&node)) {
      write_wrapped(out, expr, kPredicate, min_level, [&] {
        write_expr(out, in_list->operand, kAdditive);
        out << " " << kw(in_list->negated ? "NOT IN" : "IN") << " (";
        for (std::size_t i = 0; i < in_list->items.size(); ++i) {
          if (i > 0) out << ", ";
          write_expr(out, in_list->items[i], kOr);
        }
        out << ")";
      });
      return;
    }
    if (auto* in_subquery = std::get_if<InSubquery>(&node)) {
      write_wrapped(out, expr, kPredicate, min_level, [&] {
        write_expr(out, in_subquery->operand, kAdditive);
        out << " " << kw(in_subquery->negated ? "NOT IN" : "IN") << " (";
        write_statement(out, *in_subquery->subquery);
        out << ")";
      });
      return;
    }
    if (auto* exists = std::get_if<Exists>(&node)) {
      write_wrapped(out, expr, kPredicate, min_level, [&] {
        out << kw(exists->negated ? "NOT EXISTS" : "EXISTS") << " (";
        write_statement(out, *exists->subquery);
        out << ")";
      });
      return;
    }
    if (auto* scalar = std::get_if<ScalarSubquery>(&node)) {
      out << "(";
      write_statement(out, *scalar->subquery);
      out << ")";
      return;
    }
    if (auto* case_when = std::get_if<CaseWhen>(&node)) {
      out << kw("CASE");
      for (const auto& [condition, result] : case_when->branches) {
        out << " " << kw("WHEN") << " ";
        write_expr(out, condition, kOr);
        out << " " << kw("THEN") << " ";
        write_expr(out, result, kOr);
      }
      if (case_when->else_expr) {
        out << " " << kw("ELSE") << " ";
        write_expr(out, case_when->else_expr, kOr);
      }
      out << " " << kw("END");
      return;
    }
    if (auto* call = std::get_if<FuncCall>(&node)) {
      if (call->kind == FuncKind::Cast) {
        out << kw("CAST") << "(";
        write_expr(out, call->args[0], kOr);
        out << " " << kw("AS") << " " << kw(to_string_upper(call->cast_type)) << ")";
        return;
      }
      out << kw(to_string(call->kind)) << "(";
      if (call->star) {
        out << "*";
      } else {
        for (std::size_t i = 0; i < call->args.size(); ++i) {
          if (i > 0) out << ", ";
          write_expr(out, call->args[i], kOr);
        }
      }
      out << ")";
      return;
    }
  }

  static const char* to_string_upper(ColumnType type) {
    switch (type) {
      case ColumnType::Int: return "INT";
      case ColumnType::Float: return "FLOAT";
      case ColumnType::Text: return "TEXT";
      case ColumnType::Date: return "DATE";
      case ColumnType::Bool: return "BOOL";
    }
    return "?";
  }

  void write_literal(std::ostringstream& out, const Value& value) {
    if (value.is_null()) {
      out << kw("NULL");
    } else if (value.is_bool()) {
      out << kw(value.as_bool() ? "TRUE" : "FALSE");
    } else if (value.is_text()) {
      out << "'";
      for (char c : value.as_text()) {
        if (c == '\'') out << "''";
        else out << c;
      }
      out << "'";
    } else if (value.is_date()) {
      out << "'" << value.as_date().iso() << "'";
    } else {
      out << value.to_text();
    }
  }

  RenderStyle style_;
};

}  // namespace

std::string render(const SelectStmt& stmt) { return render(stmt, RenderStyle{}); }

std::string render(const SelectStmt& stmt, const RenderStyle& style) {
  return Renderer(style).statement(stmt);
}

std::string render(const ExprPtr& expr) { return render(expr, RenderStyle{}); }

std::string render(const ExprPtr& expr, const RenderStyle& style) {
  return Renderer(style).expression(expr);
}

std::vector<ExprPtr> split_conjuncts(const ExprPtr& predicate) {
  std::vector<ExprPtr> result;
  if (!predicate) return result;
  if (auto* logic = std::get_if<Logic>(&predicate->node); logic && logic->op == LogicOp::And) {
    auto lhs = split_conjuncts(logic->lhs);
    auto rhs = split_conjuncts(logic->rhs);
    result.insert(result.end(), lhs.begin(), lhs.end());
    result.insert(result.end(), rhs.begin(), rhs.end());
    return result;
  }
  result.push_back(predicate);
  return result;
}

ExprPtr join_conjuncts(const std::vector<ExprPtr>& conjuncts) {
  ExprPtr result;
  for (const ExprPtr& conjunct : conjuncts) {
    result = result ? make_expr<Logic>(LogicOp::And, result, conjunct) : conjunct;
  }
  return result;
}

namespace {

bool contains_aggregate_node(const ExprPtr& expr);

bool any_child_aggregate(const std::vector<ExprPtr>& children) {
  for (const ExprPtr& child : children) {
    if (contains_aggregate_node(child)) return true;
  }
  return false;
}

bool contains_aggregate_node(const ExprPtr& expr) {
  if (!expr) return false;
  const Expr::Node& node = expr->node;
  if (auto* call = std::get_if<FuncCall>(&node)) {
    if (is_aggregate(call->kind)) return true;
    return any_child_aggregate(call->args);
  }
  if (auto* negate = std::get_if<Negate>(&node)) return contains_aggregate_node(negate->operand);
  if (auto* inversion = std::get_if<Not>(&node)) return contains_aggregate_node(inversion->operand);
  if (auto* binary = std::get_if<Binary>(&node))
    return contains_aggregate_node(binary->lhs) || contains_aggregate_node(binary->rhs);
  if (auto* compare = std::get_if<Compare>(&node))
    return contains_aggregate_node(compare->lhs) || contains_aggregate_node(compare->rhs);
  if (auto* logic = std::get_if<Logic>(&node))
    return contains_aggregate_node(logic->lhs) || contains_aggregate_node(logic->rhs);
  if (auto* like = std::get_if<Like>(&node))
    return contains_aggregate_node(like->operand) || contains_aggregate_node(like->pattern);
  if (auto* isnull = std::get_if<IsNull>(&node)) return contains_aggregate_node(isnull->operand);
  if (auto* in_list = std::get_if<InList>(&node))
    return contains_aggregate_node(in_list->operand) || any_child_aggregate(in_list->items);
  if (auto* in_subquery = std::get_if<InSubquery>(&node))
    return contains_aggregate_node(in_subquery->operand);  // subquery body not inspected
  if (auto* case_when = std::get_if<CaseWhen>(&node)) {
    for (const auto& [condition, result] : case_when->branches) {
      if (contains_aggregate_node(condition) || contains_aggregate_node(result)) return true;
    }
    return contains_aggregate_node(case_when->else_expr);
  }
  return false;  // ColumnRef, Literal, Exists, ScalarSubquery
}

}  // namespace

bool contains_aggregate(const ExprPtr& expr) { return contains_aggregate_node(expr); }

bool equal(const Expr& a, const Expr& b) {
  auto pa = std::make_shared<const Expr>(a);
  auto pb = std::make_shared<const Expr>(b);
  return render(pa) == render(pb);
}

bool equal(const SelectStmt& a, const SelectStmt& b) { return render(a) == render(b); }

}  // namespace sqleq
