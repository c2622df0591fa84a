#include "sqleq/ast_transform.hpp"

namespace sqleq {

ExprPtr transform_expr(const ExprPtr& expr, const ExprHook& post, const StmtHook& subquery) {
  if (!expr) return expr;
  auto recurse = [&](const ExprPtr& child) { return transform_expr(child, post, subquery); };
  ExprPtr rebuilt;
  const Expr::Node& node = expr->node;
  if (auto* column = std::get_if<ColumnRef>(&node)) {
    rebuilt = make_expr<ColumnRef>(*column);
  } else if (auto* literal = std::get_if<Literal>(&node)) {
    rebuilt = make_expr<Literal>(*literal);
  } else if (auto* negate = std::get_if<Negate>(&node)) {
    rebuilt = make_expr<Negate>(Negate{recurse(negate->operand)});
  } else if (auto* inversion = std::get_if<Not>(&node)) {
    rebuilt = make_expr<Not>(Not{recurse(inversion->operand)});
  } else if (auto* binary = std::get_if<Binary>(&node)) {
    rebuilt = make_expr<Binary>(Binary{binary->op, recurse(binary->lhs), recurse(binary->rhs)});
  } else if (auto* compare = std::get_if<Compare>(&node)) {
    rebuilt =
        make_expr<Compare>(Compare{compare->op, recurse(compare->lhs), recurse(compare->rhs)});
  } else if (auto* logic = std::get_if<Logic>(&node)) {
    rebuilt = make_expr<Logic>(Logic{logic->op, recurse(logic->lhs), recurse(logic->rhs)});
  } else if (auto* like = std::get_if<Like>(&node)) {
    rebuilt = make_expr<Like>(Like{recurse(like->operand), recurse(like->pattern), like->negated});
  } else if (auto* isnull = std::get_if<IsNull>(&node)) {
    rebuilt = make_expr<IsNull>(IsNull{recurse(isnull->operand), isnull->negated});
  } else if (auto* in_list = std::get_if<InList>(&node)) {
    InList next{recurse(in_list->operand), {}, in_list->negated};
    for (const ExprPtr& item : in_list->items) next.items.push_back(recurse(item));
    rebuilt = make_expr<InList>(std::move(next));
  } else if (auto* in_subquery = std::get_if<InSubquery>(&node)) {
    rebuilt = make_expr<InSubquery>(InSubquery{recurse(in_subquery->operand),
                                               subquery(in_subquery->subquery),
                                               in_subquery->negated});
  } else if (auto* exists = std::get_if<Exists>(&node)) {
    rebuilt = make_expr<Exists>(Exists{subquery(exists->subquery), exists->negated});
  } else if (auto* scalar = std::get_if<ScalarSubquery>(&node)) {
    rebuilt = make_expr<ScalarSubquery>(ScalarSubquery{subquery(scalar->subquery)});
  } else if (auto* case_when = std::get_if<CaseWhen>(&node)) {
    CaseWhen next;
    for (const auto& [condition, result] : case_when->branches) {
      next.branches.emplace_back(recurse(condition), recurse(result));
    }
    next.else_expr = recurse(case_when->else_expr);
    rebuilt = make_expr<CaseWhen>(std::move(next));
  } else {
    const auto& call = std::get<FuncCall>(node);
    FuncCall next{call.kind, {}, call.star, call.cast_type};
    for (const ExprPtr& arg : call.args) next.args.push_back(recurse(arg));
    rebuilt = make_expr<FuncCall>(std::move(next));
  }
  return post ? post(rebuilt) : rebuilt;
}

SelectStmt transform_statement(const SelectStmt& stmt, const ExprHook& post) {
  StmtHook sub = [&post](const SelectPtr& s) {
    return std::make_shared<const SelectStmt>(transform_statement(*s, post));
  };
  auto expr = [&](const ExprPtr& e) { return transform_expr(e, post, sub); };

  SelectStmt out;
  out.union_all = stmt.union_all;
  out.limit = stmt.limit;
  for (const SelectCore& core : stmt.cores) {
    SelectCore next;
    next.distinct = core.distinct;
    for (const SelectItem& item : core.items) {
      next.items.push_back(SelectItem{item.star, expr(item.expr), item.alias});
    }
    for (const FromItem& from : core.from) {
      FromItem item;
      item.first = from.first;
      if (from.first.derived) item.first.derived = sub(from.first.derived);
      for (const JoinClause& join : from.joins) {
        JoinClause clause;
        clause.kind = join.kind;
        clause.source = join.source;
        if (join.source.derived) clause.source.derived = sub(join.source.derived);
        clause.on = expr(join.on);
        item.joins.push_back(std::move(clause));
      }
      next.from.push_back(std::move(item));
    }
    next.where = expr(core.where);
    for (const ExprPtr& key : core.group_by) next.group_by.push_back(expr(key));
    next.having = expr(core.having);
    out.cores.push_back(std::move(next));
  }
  for (const OrderKey& key : stmt.order_by) out.order_by.push_back({expr(key.expr), key.descending});
  return out;
}

}  // namespace sqleq
