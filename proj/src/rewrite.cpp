#include "sqleq/rewrite.hpp"

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sqleq/ast_transform.hpp"

namespace sqleq {
namespace {

ExprPtr identity(const ExprPtr& e) { return e; }

bool contains_subquery(const ExprPtr& expr) {
  if (!expr) return false;
  bool found = false;
  transform_expr(expr, identity, [&](const SelectPtr& sub) {
    found = true;
    return sub;
  });
  return found;
}

// True when the whole statement (all clauses, all levels) holds no derived
// tables and no expression subqueries.
bool subquery_free(const SelectStmt& stmt) {
  for (const auto& core : stmt.cores) {
    for (const auto& item : core.from) {
      if (item.first.derived) return false;
      for (const auto& join : item.joins) {
        if (join.source.derived) return false;
        if (contains_subquery(join.on)) return false;
      }
    }
    for (const auto& item : core.items)
      if (contains_subquery(item.expr)) return false;
    if (contains_subquery(core.where) || contains_subquery(core.having)) return false;
    for (const auto& key : core.group_by)
      if (contains_subquery(key)) return false;
  }
  for (const auto& key : stmt.order_by)
    if (contains_subquery(key.expr)) return false;
  return true;
}

void check_depth(const SelectStmt& stmt, int level) {
  if (level > 2) throw UnsupportedSubquery("nested deeper than two levels");
  auto check_expr = [&](const ExprPtr& e) {
    transform_expr(e, identity, [&](const SelectPtr& sub) {
      check_depth(*sub, level + 1);
      return sub;
    });
  };
  for (const auto& core : stmt.cores) {
    for (const auto& item : core.from) {
      if (item.first.derived) check_depth(*item.first.derived, level + 1);
      for (const auto& join : item.joins) {
        if (join.source.derived) check_depth(*join.source.derived, level + 1);
        check_expr(join.on);
      }
    }
    for (const auto& item : core.items) check_expr(item.expr);
    check_expr(core.where);
    for (const auto& key : core.group_by) check_expr(key);
    check_expr(core.having);
  }
  for (const auto& key : stmt.order_by) check_expr(key.expr);
}

void collect_aliases(const SelectStmt& stmt, std::set<std::string>& out) {
  auto from_expr = [&](const ExprPtr& e) {
    transform_expr(e, identity, [&](const SelectPtr& sub) {
      collect_aliases(*sub, out);
      return sub;
    });
  };
  for (const auto& core : stmt.cores) {
    auto source = [&](const TableSource& src) {
      if (!src.effective_alias().empty()) out.insert(src.effective_alias());
      if (src.derived) collect_aliases(*src.derived, out);
    };
    for (const auto& item : core.from) {
      source(item.first);
      for (const auto& join : item.joins) {
        source(join.source);
        from_expr(join.on);
      }
    }
    for (const auto& item : core.items) from_expr(item.expr);
    from_expr(core.where);
    for (const auto& key : core.group_by) from_expr(key);
    from_expr(core.having);
  }
  for (const auto& key : stmt.order_by) from_expr(key.expr);
}

// Detects references that escape the statement's own FROM scopes. Qualified
// references are checked against every enclosing scope inside the statement;
// unqualified references are assumed local.
class CorrelationScan {
 public:
  bool correlated(const SelectStmt& stmt) {
    walk(stmt);
    return outer_;
  }

 private:
  std::vector<std::set<std::string>> scopes_;
  bool outer_ = false;

  static std::set<std::string> core_scope(const SelectCore& core) {
    std::set<std::string> names;
    for (const auto& item : core.from) {
      names.insert(item.first.effective_alias());
      for (const auto& join : item.joins) names.insert(join.source.effective_alias());
    }
    return names;
  }

  bool known(const std::string& table) const {
    for (const auto& scope : scopes_)
      if (scope.count(table)) return true;
    return false;
  }

  void walk_expr(const ExprPtr& e) {
    transform_expr(
        e,
        [&](const ExprPtr& node) {
          if (const auto* ref = std::get_if<ColumnRef>(&node->node))
            if (!ref->table.empty() && !known(ref->table)) outer_ = true;
          return node;
        },
        [&](const SelectPtr& sub) {
          walk(*sub);
          return sub;
        });
  }

  void walk(const SelectStmt& stmt) {
    for (const auto& core : stmt.cores) {
      scopes_.push_back(core_scope(core));
      for (const auto& item : core.from) {
        if (item.first.derived) walk(*item.first.derived);
        for (const auto& join : item.joins) {
          if (join.source.derived) walk(*join.source.derived);
          walk_expr(join.on);
        }
      }
      for (const auto& item : core.items) walk_expr(item.expr);
      walk_expr(core.where);
      for (const auto& key : core.group_by) walk_expr(key);
      walk_expr(core.having);
      scopes_.pop_back();
    }
    if (!stmt.order_by.empty() && !stmt.cores.empty()) {
      scopes_.push_back(core_scope(stmt.cores.front()));
      for (const auto& key : stmt.order_by) walk_expr(key.expr);
      scopes_.pop_back();
    }
  }
};

// Re-qualifies references that belong to `local` (or are unqualified) with a
// fresh table alias; references to other (outer) aliases pass through.
ExprPtr requalify_local(const ExprPtr& expr, const std::string& local, const std::string& fresh) {
  return transform_expr(
      expr,
      [&](const ExprPtr& node) -> ExprPtr {
        if (const auto* ref = std::get_if<ColumnRef>(&node->node))
          if (ref->table.empty() || ref->table == local)
            return make_expr<ColumnRef>(fresh, ref->column);
        return node;
      },
      [](const SelectPtr& sub) { return sub; });
}

bool has_outer_ref(const ExprPtr& expr, const std::string& local) {
  bool found = false;
  transform_expr(
      expr,
      [&](const ExprPtr& node) {
        if (const auto* ref = std::get_if<ColumnRef>(&node->node))
          if (!ref->table.empty() && ref->table != local) found = true;
        return node;
      },
      [](const SelectPtr& sub) { return sub; });
  return found;
}

bool has_unqualified_ref(const ExprPtr& expr) {
  bool found = false;
  transform_expr(
      expr,
      [&](const ExprPtr& node) {
        if (const auto* ref = std::get_if<ColumnRef>(&node->node))
          if (ref->table.empty()) found = true;
        return node;
      },
      [](const SelectPtr& sub) { return sub; });
  return found;
}

// Qualifies every unqualified reference with the (single) outer source so the
// columns the rewrite joins in cannot shadow them. Subquery bodies keep their
// own scope and pass through untouched.
ExprPtr qualify_unqualified(const ExprPtr& expr, const std::string& alias) {
  return transform_expr(
      expr,
      [&](const ExprPtr& node) -> ExprPtr {
        if (const auto* ref = std::get_if<ColumnRef>(&node->node))
          if (ref->table.empty()) return make_expr<ColumnRef>(alias, ref->column);
        return node;
      },
      [](const SelectPtr& sub) { return sub; });
}

// True when an ORDER BY key evaluates against the core's FROM scope rather
// than resolving to an ordinal or a projection alias.
bool order_key_uses_core_scope(const ExprPtr& expr, const SelectCore& core) {
  if (!expr) return false;
  if (const auto* literal = std::get_if<Literal>(&expr->node);
      literal && literal->value.is_int())
    return false;
  if (const auto* ref = std::get_if<ColumnRef>(&expr->node); ref && ref->table.empty()) {
    for (const auto& item : core.items)
      if (!item.star && item.alias && *item.alias == ref->column) return false;
  }
  return has_unqualified_ref(expr);
}

ExprPtr always_true() {
  auto one = make_expr<Literal>(Value::integer(1));
  return make_expr<Compare>(CompareOp::Eq, one, one);
}

class Rewriter {
 public:
  RewriteReport run(const SelectStmt& stmt) {
    check_depth(stmt, 0);
    collect_aliases(stmt, used_);
    RewriteReport report;
    report.statement = do_stmt(stmt, 0);
    report.rules_applied = std::move(applied_);
    report.skipped = std::move(skipped_);
    report.unchanged = !dirty_;
    return report;
  }

 private:
  std::set<std::string> used_;
  std::vector<std::string> applied_, skipped_;
  bool dirty_ = false;
  int next_alias_ = 0;

  std::string fresh_alias() {
    for (;;) {
      std::string candidate = "sq" + std::to_string(++next_alias_);
      if (used_.insert(candidate).second) return candidate;
    }
  }

  SelectStmt do_stmt(const SelectStmt& in, int level) {
    SelectStmt out;
    out.union_all = in.union_all;
    out.limit = in.limit;
    // For a single core the ORDER BY keys may evaluate in the core's scope;
    // count them with the core's own unqualified references and qualify them
    // alongside it. Union ORDER BY keys only name output columns.
    bool order_scope_refs = false;
    if (in.cores.size() == 1) {
      for (const auto& key : in.order_by)
        if (order_key_uses_core_scope(key.expr, in.cores[0])) order_scope_refs = true;
    }
    std::string qualified;
    for (std::size_t i = 0; i < in.cores.size(); ++i) {
      std::string alias;
      bool track_order = in.cores.size() == 1 && order_scope_refs;
      out.cores.push_back(do_core(in.cores[i], level, track_order, &alias));
      if (i == 0) qualified = alias;
    }
    for (const auto& key : in.order_by) {
      if (contains_subquery(key.expr)) throw UnsupportedSubquery("ORDER BY expression");
      OrderKey rebuilt = key;
      if (!qualified.empty() && order_key_uses_core_scope(key.expr, in.cores[0]))
        rebuilt.expr = qualify_unqualified(key.expr, qualified);
      out.order_by.push_back(rebuilt);
    }
    return out;
  }

  TableSource do_source(const TableSource& in, int level) {
    if (!in.derived) return in;
    TableSource out = in;
    out.derived = std::make_shared<const SelectStmt>(do_stmt(*in.derived, level + 1));
    return out;
  }

  // Rules that join a new source into the core are blocked when they could
  // change what existing references or a bare star resolve to:
  //   - a star projection would widen to the joined columns;
  //   - unqualified references become ambiguous unless the core reads from a
  //     single source, in which case they are qualified with it.
  std::string rule_blocker(const SelectCore& in, bool order_scope_refs,
                           const std::string& qualify_with) const {
    for (const auto& item : in.items)
      if (item.star) return "star_projection";
    if (!qualify_with.empty()) return "";
    bool unqualified = order_scope_refs;
    auto scan = [&](const ExprPtr& e) {
      if (has_unqualified_ref(e)) unqualified = true;
    };
    for (const auto& item : in.items) scan(item.expr);
    scan(in.where);
    for (const auto& key : in.group_by) scan(key);
    scan(in.having);
    return unqualified ? "ambiguous_outer_refs" : "";
  }

  SelectCore do_core(const SelectCore& in, int level, bool order_scope_refs,
                     std::string* qualified_out) {
    bool grouped = !in.group_by.empty() || contains_aggregate(in.having);
    for (const auto& item : in.items)
      if (contains_aggregate(item.expr)) grouped = true;

    std::string qualify_with;
    if (in.from.size() == 1 && in.from[0].joins.empty())
      qualify_with = in.from[0].first.effective_alias();
    std::string blocker = rule_blocker(in, order_scope_refs, qualify_with);

    SelectCore out;
    out.distinct = in.distinct;
    for (const auto& item : in.from) {
      FromItem rebuilt;
      rebuilt.first = do_source(item.first, level);
      for (const auto& join : item.joins) {
        if (contains_subquery(join.on)) throw UnsupportedSubquery("join condition");
        rebuilt.joins.push_back(JoinClause{join.kind, do_source(join.source, level), join.on});
      }
      out.from.push_back(std::move(rebuilt));
    }

    std::size_t rules_before = applied_.size();
    std::vector<ExprPtr> keep;
    for (const auto& conjunct : split_conjuncts(in.where))
      handle_conjunct(conjunct, grouped, blocker, out, keep, level);
    out.where = join_conjuncts(keep);

    for (const auto& item : in.items)
      out.items.push_back(do_item(item, grouped, blocker, out, level));

    for (const auto& key : in.group_by) {
      if (contains_subquery(key)) throw UnsupportedSubquery("GROUP BY expression");
      out.group_by.push_back(key);
    }
    if (contains_subquery(in.having)) throw UnsupportedSubquery("HAVING expression");
    out.having = in.having;

    if (applied_.size() > rules_before && !qualify_with.empty()) {
      for (auto& item : out.items)
        if (!item.star) item.expr = qualify_unqualified(item.expr, qualify_with);
      out.where = qualify_unqualified(out.where, qualify_with);
      for (auto& key : out.group_by) key = qualify_unqualified(key, qualify_with);
      out.having = qualify_unqualified(out.having, qualify_with);
      for (auto& item : out.from)
        for (auto& join : item.joins) join.on = qualify_unqualified(join.on, qualify_with);
      if (qualified_out) *qualified_out = qualify_with;
    }
    return out;
  }

  void handle_conjunct(const ExprPtr& conjunct, bool grouped, const std::string& blocker,
                       SelectCore& out, std::vector<ExprPtr>& keep, int level) {
    if (const auto* in_sub = std::get_if<InSubquery>(&conjunct->node)) {
      if (contains_subquery(in_sub->operand)) throw UnsupportedSubquery("IN operand");
      std::string skip = try_in(*in_sub, grouped, blocker, out, keep, level);
      if (!skip.empty()) {
        skipped_.push_back(skip);
        keep.push_back(conjunct);
      }
      return;
    }
    if (const auto* exists = std::get_if<Exists>(&conjunct->node)) {
      std::string skip = try_exists(*exists, grouped, blocker, out, keep);
      if (!skip.empty()) {
        skipped_.push_back(skip);
        keep.push_back(conjunct);
      }
      return;
    }
    if (const auto* cmp = std::get_if<Compare>(&conjunct->node)) {
      bool lhs_scalar = cmp->lhs && std::holds_alternative<ScalarSubquery>(cmp->lhs->node);
      bool rhs_scalar = cmp->rhs && std::holds_alternative<ScalarSubquery>(cmp->rhs->node);
      if (lhs_scalar || rhs_scalar) {
        if (!lhs_scalar && contains_subquery(cmp->lhs)) throw UnsupportedSubquery("comparison operand");
        if (!rhs_scalar && contains_subquery(cmp->rhs)) throw UnsupportedSubquery("comparison operand");
        skipped_.push_back("scalar_comparison");
        keep.push_back(conjunct);
        return;
      }
    }
    if (contains_subquery(conjunct)) throw UnsupportedSubquery("WHERE expression");
    keep.push_back(conjunct);
  }

  // Adds an INNER JOIN for rules that filter the outer rows. When the outer
  // FROM has a single comma item the join is attached there (every outer
  // alias is visible to the ON condition); with several comma items the
  // source joins as a new comma item and the conditions move to WHERE, which
  // is equivalent for an inner join and keeps every alias in scope.
  void attach_inner(SelectCore& out, TableSource source, std::vector<ExprPtr> on,
                    std::vector<ExprPtr>& keep) {
    if (out.from.size() == 1) {
      ExprPtr condition = join_conjuncts(on);
      if (!condition) condition = always_true();
      out.from[0].joins.push_back(JoinClause{JoinKind::Inner, std::move(source), condition});
    } else {
      out.from.push_back(FromItem{std::move(source), {}});
      for (auto& condition : on) keep.push_back(std::move(condition));
    }
    out.distinct = true;
    dirty_ = true;
  }

  // x IN (SELECT y FROM t WHERE p)  ->  JOIN t ON x = y AND p, SELECT DISTINCT.
  // Returns the skip reason, or empty when applied.
  std::string try_in(const InSubquery& node, bool grouped, const std::string& blocker,
                     SelectCore& out, std::vector<ExprPtr>& keep, int level) {
    if (node.negated) return "not_in";
    if (grouped) return "in_under_grouping";
    const SelectStmt& sub = *node.subquery;
    if (CorrelationScan().correlated(sub)) return "correlated_in";
    if (sub.cores.front().items.size() != 1 || sub.cores.front().items[0].star)
      return "complex_in";
    if (!blocker.empty()) return blocker;

    bool flat = sub.cores.size() == 1 && !sub.limit && subquery_free(sub);
    if (flat) {
      const SelectCore& core = sub.cores[0];
      flat = core.from.size() == 1 && core.from[0].joins.empty() &&
             !core.from[0].first.derived && core.group_by.empty() && !core.having &&
             core.items.size() == 1 && !core.items[0].star &&
             !contains_aggregate(core.items[0].expr);
    }
    if (flat) {
      const SelectCore& core = sub.cores[0];
      const std::string local = core.from[0].first.effective_alias();
      std::string alias = fresh_alias();
      TableSource source;
      source.table = core.from[0].first.table;
      source.alias = alias;
      std::vector<ExprPtr> on;
      on.push_back(make_expr<Compare>(CompareOp::Eq, node.operand,
                                      requalify_local(core.items[0].expr, local, alias)));
      for (const auto& conjunct : split_conjuncts(core.where))
        on.push_back(requalify_local(conjunct, local, alias));
      attach_inner(out, std::move(source), std::move(on), keep);
      applied_.push_back("in_to_join");
      return "";
    }

    // Complex subquery: join it as a derived table on its single output column.
    SelectStmt inner = do_stmt(sub, level + 1);
    SelectItem& first = inner.cores.front().items[0];
    std::string name;
    if (first.alias) {
      name = *first.alias;
    } else if (const auto* ref = std::get_if<ColumnRef>(&first.expr->node)) {
      name = ref->column;
    } else {
      first.alias = "v";
      name = "v";
    }
    std::string alias = fresh_alias();
    TableSource source;
    source.derived = std::make_shared<const SelectStmt>(std::move(inner));
    source.alias = alias;
    std::vector<ExprPtr> on;
    on.push_back(make_expr<Compare>(CompareOp::Eq, node.operand,
                                    make_expr<ColumnRef>(alias, name)));
    attach_inner(out, std::move(source), std::move(on), keep);
    applied_.push_back("in_to_join");
    return "";
  }

  // EXISTS (SELECT ... FROM t WHERE p)  ->  JOIN t ON p, SELECT DISTINCT.
  // The projection is discarded (EXISTS only tests for a row), so it must be
  // free of aggregates — EXISTS (SELECT COUNT(*) ...) is always true.
  std::string try_exists(const Exists& node, bool grouped, const std::string& blocker,
                         SelectCore& out, std::vector<ExprPtr>& keep) {
    if (node.negated) return "not_exists";
    if (grouped) return "exists_under_grouping";
    if (!blocker.empty()) return blocker;
    const SelectStmt& sub = *node.subquery;
    if (sub.cores.size() != 1 || sub.limit) return "complex_exists";
    const SelectCore& core = sub.cores[0];
    if (core.from.size() != 1 || !core.from[0].joins.empty() || core.from[0].first.derived)
      return "complex_exists";
    if (!core.group_by.empty() || core.having) return "complex_exists";
    for (const auto& item : core.items)
      if (contains_aggregate(item.expr) || contains_subquery(item.expr)) return "complex_exists";
    if (contains_subquery(core.where)) return "complex_exists";

    const std::string local = core.from[0].first.effective_alias();
    std::string alias = fresh_alias();
    TableSource source;
    source.table = core.from[0].first.table;
    source.alias = alias;
    std::vector<ExprPtr> on;
    for (const auto& conjunct : split_conjuncts(core.where))
      on.push_back(requalify_local(conjunct, local, alias));
    attach_inner(out, std::move(source), std::move(on), keep);
    applied_.push_back("exists_to_join");
    return "";
  }

  SelectItem do_item(const SelectItem& item, bool grouped, const std::string& blocker,
                     SelectCore& out, int level) {
    if (item.star || !item.expr) return item;
    if (const auto* scalar = std::get_if<ScalarSubquery>(&item.expr->node)) {
      SelectItem replaced;
      std::string skip = try_scalar(*scalar, item, grouped, blocker, out, replaced);
      if (skip.empty()) return replaced;
      skipped_.push_back(skip);
      return item;
    }
    if (contains_subquery(item.expr)) throw UnsupportedSubquery("projection expression");
    (void)level;
    return item;
  }

  // (SELECT AGG(c) FROM t WHERE t.k = outer.k AND p) projected per outer row
  //   ->  LEFT JOIN (SELECT k, AGG(c) FROM t WHERE p GROUP BY k) sq
  //       ON sq.k = outer.k, projecting sq.v.
  // AGG must be SUM/AVG/MIN/MAX: those yield NULL over an empty group exactly
  // as the unmatched LEFT JOIN does, while COUNT would have to yield 0.
  std::string try_scalar(const ScalarSubquery& node, const SelectItem& item, bool grouped,
                         const std::string& blocker, SelectCore& out, SelectItem& replaced) {
    const SelectStmt& sub = *node.subquery;
    bool correlated = CorrelationScan().correlated(sub);
    if (grouped) return "scalar_under_grouping";
    if (!blocker.empty()) return blocker;
    if (sub.cores.size() != 1 || sub.limit || !sub.order_by.empty())
      return correlated ? "complex_scalar_item" : "uncorrelated_scalar_item";
    const SelectCore& core = sub.cores[0];
    if (core.items.size() != 1 || core.items[0].star || core.distinct)
      return correlated ? "complex_scalar_item" : "uncorrelated_scalar_item";
    const auto* agg = std::get_if<FuncCall>(&core.items[0].expr->node);
    if (!agg || !is_aggregate(agg->kind))
      return correlated ? "complex_scalar_item" : "uncorrelated_scalar_item";
    if (!correlated) return "uncorrelated_scalar_item";
    if (agg->kind == FuncKind::Count) return "count_scalar";
    if (agg->star || agg->args.size() != 1 || contains_subquery(agg->args[0]))
      return "complex_scalar_item";
    if (core.from.size() != 1 || !core.from[0].joins.empty() || core.from[0].first.derived)
      return "complex_scalar_item";
    if (!core.group_by.empty() || core.having) return "complex_scalar_item";

    const std::string local = core.from[0].first.effective_alias();
    if (has_outer_ref(agg->args[0], local)) return "complex_scalar_item";

    auto local_ref = [&](const ExprPtr& e) -> const ColumnRef* {
      const auto* ref = e ? std::get_if<ColumnRef>(&e->node) : nullptr;
      return (ref && (ref->table.empty() || ref->table == local)) ? ref : nullptr;
    };
    auto outer_ref = [&](const ExprPtr& e) -> const ColumnRef* {
      const auto* ref = e ? std::get_if<ColumnRef>(&e->node) : nullptr;
      return (ref && !ref->table.empty() && ref->table != local) ? ref : nullptr;
    };

    ExprPtr key_local, key_outer;
    std::vector<ExprPtr> local_conjuncts;
    for (const auto& conjunct : split_conjuncts(core.where)) {
      if (const auto* cmp = std::get_if<Compare>(&conjunct->node);
          cmp && cmp->op == CompareOp::Eq) {
        bool forward = local_ref(cmp->lhs) && outer_ref(cmp->rhs);
        bool backward = outer_ref(cmp->lhs) && local_ref(cmp->rhs);
        if (forward || backward) {
          if (key_local) return "complex_scalar_item";  // one correlation key only
          key_local = forward ? cmp->lhs : cmp->rhs;
          key_outer = forward ? cmp->rhs : cmp->lhs;
          continue;
        }
      }
      if (contains_subquery(conjunct) || has_outer_ref(conjunct, local))
        return "complex_scalar_item";
      local_conjuncts.push_back(conjunct);
    }
    if (!key_local) return "complex_scalar_item";

    const auto* outer_col = std::get_if<ColumnRef>(&key_outer->node);
    FromItem* owner = nullptr;
    for (auto& candidate : out.from) {
      if (candidate.first.effective_alias() == outer_col->table) owner = &candidate;
      for (auto& join : candidate.joins)
        if (join.source.effective_alias() == outer_col->table) owner = &candidate;
      if (owner) break;
    }
    if (!owner) return "complex_scalar_item";

    SelectCore derived_core;
    derived_core.items.push_back(SelectItem{false, key_local, std::string("k")});
    derived_core.items.push_back(SelectItem{false, core.items[0].expr, std::string("v")});
    derived_core.from.push_back(FromItem{core.from[0].first, {}});
    derived_core.where = join_conjuncts(local_conjuncts);
    derived_core.group_by.push_back(key_local);

    SelectStmt derived_stmt;
    derived_stmt.cores.push_back(std::move(derived_core));

    std::string alias = fresh_alias();
    TableSource source;
    source.derived = std::make_shared<const SelectStmt>(std::move(derived_stmt));
    source.alias = alias;
    ExprPtr on = make_expr<Compare>(CompareOp::Eq, make_expr<ColumnRef>(alias, std::string("k")),
                                    key_outer);
    owner->joins.push_back(JoinClause{JoinKind::Left, std::move(source), std::move(on)});

    replaced = SelectItem{false, make_expr<ColumnRef>(alias, std::string("v")), item.alias};
    dirty_ = true;
    applied_.push_back("scalar_agg_to_join");
    return "";
  }
};

}  // namespace
}  // namespace sqleq

namespace sqleq {

RewriteReport rewrite_subqueries(const SelectStmt& stmt) { return Rewriter().run(stmt); }

}  // namespace sqleq
