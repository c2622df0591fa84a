#include "sqleq/matcher.hpp"

#include <algorithm>
#include <sstream>

#include "sqleq/ast_transform.hpp"
#include "sqleq/render.hpp"

namespace sqleq {

namespace {

// --- pass 1: fold INNER JOIN ... ON into comma sources plus conjuncts ------

SelectStmt fold_joins(const SelectStmt& in);

SelectPtr fold_subquery(const SelectPtr& s) {
  return std::make_shared<const SelectStmt>(fold_joins(*s));
}

ExprPtr fold_expr(const ExprPtr& e) { return transform_expr(e, {}, fold_subquery); }

TableSource fold_source(const TableSource& in) {
  TableSource out = in;
  if (in.derived) out.derived = fold_subquery(in.derived);
  return out;
}

SelectCore fold_core(const SelectCore& in) {
  SelectCore out;
  out.distinct = in.distinct;
  for (const SelectItem& item : in.items) {
    out.items.push_back(SelectItem{item.star, fold_expr(item.expr), item.alias});
  }
  std::vector<ExprPtr> lifted;
  for (const FromItem& item : in.from) {
    bool all_inner = true;
    for (const JoinClause& join : item.joins) {
      if (join.kind != JoinKind::Inner) all_inner = false;
    }
    if (all_inner) {
      out.from.push_back(FromItem{fold_source(item.first), {}});
      for (const JoinClause& join : item.joins) {
        out.from.push_back(FromItem{fold_source(join.source), {}});
        for (const ExprPtr& conjunct : split_conjuncts(fold_expr(join.on))) {
          lifted.push_back(conjunct);
        }
      }
    } else {
      // An outer join's shape is load-bearing; keep the chain intact.
      FromItem kept{fold_source(item.first), {}};
      for (const JoinClause& join : item.joins) {
        kept.joins.push_back(JoinClause{join.kind, fold_source(join.source), fold_expr(join.on)});
      }
      out.from.push_back(std::move(kept));
    }
  }
  std::vector<ExprPtr> conjuncts = split_conjuncts(fold_expr(in.where));
  conjuncts.insert(conjuncts.end(), lifted.begin(), lifted.end());
  out.where = join_conjuncts(conjuncts);
  for (const ExprPtr& key : in.group_by) out.group_by.push_back(fold_expr(key));
  out.having = fold_expr(in.having);
  return out;
}

SelectStmt fold_joins(const SelectStmt& in) {
  SelectStmt out;
  out.union_all = in.union_all;
  out.limit = in.limit;
  for (const SelectCore& core : in.cores) out.cores.push_back(fold_core(core));
  for (const OrderKey& key : in.order_by) out.order_by.push_back({fold_expr(key.expr), key.descending});
  return out;
}

// --- pass 2: canonical source order, alias names and qualification ---------

class Canonicalizer {
 public:
  SelectStmt run(const SelectStmt& in) { return do_stmt(in); }

 private:
  struct Scope {
    std::vector<std::pair<std::string, std::string>> renames;  // old -> new
    int sources = 0;
    std::string lone_alias;  // set when sources == 1
  };

  int counter_ = 0;
  std::vector<Scope> scopes_;

  // Content-based ordering key, independent of user-chosen aliases. Derived
  // tables are keyed by a throwaway canonicalization of their own text.
  static std::string item_key(const FromItem& item) {
    const TableSource& s = item.first;
    if (!s.table.empty()) return "0" + s.table;
    Canonicalizer throwaway;
    return "1(" + render(throwaway.run(*s.derived)) + ")";
  }

  std::string fresh_alias() { return "t" + std::to_string(++counter_); }

  // Derived tables open an independent scope chain (they cannot be
  // correlated), but share the global alias counter.
  SelectPtr do_derived(const SelectPtr& s) {
    std::vector<Scope> saved;
    saved.swap(scopes_);
    SelectPtr out = std::make_shared<const SelectStmt>(do_stmt(*s));
    scopes_.swap(saved);
    return out;
  }

  TableSource do_source(const TableSource& in, Scope& scope) {
    TableSource out = in;
    if (in.derived) out.derived = do_derived(in.derived);
    std::string next = fresh_alias();
    scope.renames.emplace_back(in.effective_alias(), next);
    out.alias = next;
    ++scope.sources;
    scope.lone_alias = scope.sources == 1 ? next : std::string();
    return out;
  }

  ExprPtr rename_ref(const ExprPtr& e) {
    auto* column = std::get_if<ColumnRef>(&e->node);
    if (!column) return e;
    if (!column->table.empty()) {
      for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope) {
        for (const auto& [from, to] : scope->renames) {
          if (from == column->table) return make_expr<ColumnRef>(ColumnRef{to, column->column});
        }
      }
      return e;  // unknown qualifier: left verbatim
    }
    // Qualify an unqualified reference when the innermost populated scope has
    // exactly one source. Sound for queries that execute successfully.
    for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope) {
      if (scope->sources == 0) continue;
      if (scope->sources == 1) {
        return make_expr<ColumnRef>(ColumnRef{scope->lone_alias, column->column});
      }
      return e;
    }
    return e;
  }

  ExprPtr do_expr(const ExprPtr& e) {
    return transform_expr(
        e, [this](const ExprPtr& node) { return rename_ref(node); },
        [this](const SelectPtr& s) {
          return std::make_shared<const SelectStmt>(do_stmt(*s));
        });
  }

  SelectCore do_core(const SelectCore& in, const std::vector<OrderKey>* order_in,
                     std::vector<OrderKey>* order_out) {
    SelectCore out;
    out.distinct = in.distinct;

    std::vector<FromItem> items = in.from;
    std::stable_sort(items.begin(), items.end(), [](const FromItem& a, const FromItem& b) {
      return item_key(a) < item_key(b);
    });

    Scope scope;
    std::vector<FromItem> renamed;
    for (const FromItem& item : items) {
      FromItem next;
      next.first = do_source(item.first, scope);
      for (const JoinClause& join : item.joins) {
        next.joins.push_back(JoinClause{join.kind, do_source(join.source, scope), join.on});
      }
      renamed.push_back(std::move(next));
    }
    scopes_.push_back(std::move(scope));

    for (FromItem& item : renamed) {
      for (JoinClause& join : item.joins) join.on = do_expr(join.on);
    }
    out.from = std::move(renamed);
    for (const SelectItem& item : in.items) {
      out.items.push_back(SelectItem{item.star, do_expr(item.expr), item.alias});
    }
    out.where = do_expr(in.where);
    for (const ExprPtr& key : in.group_by) out.group_by.push_back(do_expr(key));
    out.having = do_expr(in.having);
    if (order_in) {
      for (const OrderKey& key : *order_in) {
        order_out->push_back({do_expr(key.expr), key.descending});
      }
    }
    scopes_.pop_back();
    return out;
  }

  SelectStmt do_stmt(const SelectStmt& in) {
    SelectStmt out;
    out.union_all = in.union_all;
    out.limit = in.limit;
    bool single = in.cores.size() == 1;
    for (std::size_t i = 0; i < in.cores.size(); ++i) {
      bool carry_order = single && i == 0;
      out.cores.push_back(do_core(in.cores[i], carry_order ? &in.order_by : nullptr,
                                  carry_order ? &out.order_by : nullptr));
    }
    if (!single) {
      // Union ORDER BY keys are output names or ordinals; no aliases apply.
      out.order_by = in.order_by;
    }
    return out;
  }
};

// --- pass 3: orientation of commutative operators --------------------------

// Flattens chains of one logical operator: a AND (b AND c) -> {a, b, c}.
void flatten_logic(const ExprPtr& e, LogicOp op, std::vector<ExprPtr>& parts) {
  if (auto* logic = std::get_if<Logic>(&e->node); logic && logic->op == op) {
    flatten_logic(logic->lhs, op, parts);
    flatten_logic(logic->rhs, op, parts);
    return;
  }
  parts.push_back(e);
}

ExprPtr orient(const ExprPtr& e) {
  if (auto* compare = std::get_if<Compare>(&e->node)) {
    if (render(compare->lhs) > render(compare->rhs)) {
      return make_expr<Compare>(Compare{mirror(compare->op), compare->rhs, compare->lhs});
    }
    return e;
  }
  if (auto* in_list = std::get_if<InList>(&e->node)) {
    InList next = *in_list;
    std::sort(next.items.begin(), next.items.end(),
              [](const ExprPtr& a, const ExprPtr& b) { return render(a) < render(b); });
    return make_expr<InList>(std::move(next));
  }
  if (auto* logic = std::get_if<Logic>(&e->node)) {
    // AND and OR are commutative and associative under three-valued logic:
    // rebuild the whole same-operator chain in sorted order.
    std::vector<ExprPtr> parts;
    flatten_logic(e, logic->op, parts);
    std::stable_sort(parts.begin(), parts.end(),
                     [](const ExprPtr& a, const ExprPtr& b) { return render(a) < render(b); });
    ExprPtr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) {
      acc = make_expr<Logic>(Logic{logic->op, acc, parts[i]});
    }
    return acc;
  }
  return e;
}

SelectStmt orient_statement(const SelectStmt& in) {
  return transform_statement(in, [](const ExprPtr& e) { return orient(e); });
}

// --- clause forms -----------------------------------------------------------

struct CoreForm {
  bool distinct = false;
  std::vector<std::string> projection;
  std::vector<std::string> from;
  std::vector<std::string> where;
  std::vector<std::string> group_by;
  std::vector<std::string> having;
};

struct StatementForm {
  std::vector<CoreForm> cores;
  std::vector<bool> union_all;
  std::vector<std::string> order_by;
  std::optional<std::int64_t> limit;
};

std::string source_text(const TableSource& s) {
  std::string alias = s.alias ? *s.alias : s.table;
  if (s.derived) return "(" + render(*s.derived) + ") AS " + alias;
  return s.table + " AS " + alias;
}

std::string from_item_text(const FromItem& item) {
  std::string text = source_text(item.first);
  for (const JoinClause& join : item.joins) {
    text += join.kind == JoinKind::Left ? " LEFT JOIN " : " JOIN ";
    text += source_text(join.source);
    if (join.on) text += " ON " + render(join.on);
  }
  return text;
}

std::vector<std::string> conjunct_texts(const ExprPtr& predicate) {
  std::vector<std::string> out;
  for (const ExprPtr& conjunct : split_conjuncts(predicate)) out.push_back(render(conjunct));
  std::sort(out.begin(), out.end());
  return out;
}

// An integer literal in GROUP BY / ORDER BY addresses a projection item.
ExprPtr resolve_ordinal(const ExprPtr& key, const std::vector<SelectItem>& items) {
  auto* literal = std::get_if<Literal>(&key->node);
  if (!literal || !literal->value.is_int()) return key;
  std::int64_t ordinal = literal->value.as_int();
  if (ordinal < 1 || static_cast<std::size_t>(ordinal) > items.size()) return key;
  const SelectItem& item = items[static_cast<std::size_t>(ordinal - 1)];
  return item.star ? key : item.expr;
}

// ORDER BY names prefer projection aliases, mirroring execution.
ExprPtr resolve_order_key(const ExprPtr& key, const std::vector<SelectItem>& items) {
  ExprPtr resolved = resolve_ordinal(key, items);
  if (resolved != key) return resolved;
  if (auto* column = std::get_if<ColumnRef>(&key->node);
      column && column->table.empty()) {
    for (const SelectItem& item : items) {
      if (!item.star && item.alias && *item.alias == column->column) return item.expr;
    }
  }
  return key;
}

StatementForm build_form(const SelectStmt& stmt, const MatchConfig& config) {
  StatementForm form;
  form.union_all = stmt.union_all;
  form.limit = stmt.limit;
  for (const SelectCore& core : stmt.cores) {
    CoreForm cf;
    cf.distinct = core.distinct;
    for (const SelectItem& item : core.items) {
      if (item.star) {
        cf.projection.push_back("*");
      } else if (config.alias_sensitive && item.alias) {
        cf.projection.push_back(render(item.expr) + " AS " + *item.alias);
      } else {
        cf.projection.push_back(render(item.expr));
      }
    }
    if (!config.alias_sensitive) {
      // Bag-style result comparison is column-order insensitive.
      std::sort(cf.projection.begin(), cf.projection.end());
    }
    for (const FromItem& item : core.from) cf.from.push_back(from_item_text(item));
    cf.where = conjunct_texts(core.where);
    for (const ExprPtr& key : core.group_by) {
      cf.group_by.push_back(render(resolve_ordinal(key, core.items)));
    }
    std::sort(cf.group_by.begin(), cf.group_by.end());
    cf.having = conjunct_texts(core.having);
    form.cores.push_back(std::move(cf));
  }
  for (const OrderKey& key : stmt.order_by) {
    form.order_by.push_back(render(resolve_order_key(key.expr, stmt.cores[0].items)) +
                            (key.descending ? " DESC" : ""));
  }
  return form;
}

// Replaces single-core ORDER BY ordinals and output-name references with the
// projected expressions they address, before aliases are canonicalized away.
SelectStmt resolve_statement_order_keys(const SelectStmt& in) {
  if (in.cores.size() != 1 || in.order_by.empty()) return in;
  SelectStmt out = in;
  out.order_by.clear();
  for (const OrderKey& key : in.order_by) {
    out.order_by.push_back({resolve_order_key(key.expr, in.cores[0].items), key.descending});
  }
  return out;
}

StatementForm form_of(const SelectStmt& stmt, const MatchConfig& config) {
  SelectStmt normalized = resolve_statement_order_keys(normalize(stmt, config.normalization));
  SelectStmt folded = fold_joins(normalized);
  SelectStmt canonical = Canonicalizer().run(folded);
  SelectStmt oriented = orient_statement(canonical);
  return build_form(oriented, config);
}

std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " | ";
    out += parts[i];
  }
  return out;
}

// Empty when equal, else the name of the first differing clause.
std::string first_difference(const StatementForm& a, const StatementForm& b) {
  if (a.cores.size() != b.cores.size() || a.union_all != b.union_all) return "union shape";
  for (std::size_t i = 0; i < a.cores.size(); ++i) {
    std::string prefix = a.cores.size() > 1 ? "arm " + std::to_string(i + 1) + ": " : "";
    const CoreForm& ca = a.cores[i];
    const CoreForm& cb = b.cores[i];
    if (ca.distinct != cb.distinct) return prefix + "distinct";
    if (ca.projection != cb.projection) return prefix + "projection";
    if (ca.from != cb.from) return prefix + "from";
    if (ca.where != cb.where) return prefix + "where";
    if (ca.group_by != cb.group_by) return prefix + "group by";
    if (ca.having != cb.having) return prefix + "having";
  }
  if (a.order_by != b.order_by) return "order by";
  if (a.limit != b.limit) return "limit";
  return "";
}

}  // namespace

MatchOutcome exact_match(const SelectStmt& a, const SelectStmt& b, const MatchConfig& config) {
  std::string ra = render(normalize(a, config.normalization));
  std::string rb = render(normalize(b, config.normalization));
  if (ra == rb) return {true, ""};
  return {false, "text"};
}

MatchOutcome exact_set_match(const SelectStmt& a, const SelectStmt& b,
                             const MatchConfig& config) {
  std::string difference = first_difference(form_of(a, config), form_of(b, config));
  if (difference.empty()) return {true, ""};
  return {false, difference};
}

std::string canonical_set_form(const SelectStmt& stmt, const MatchConfig& config) {
  StatementForm form = form_of(stmt, config);
  std::ostringstream out;
  for (std::size_t i = 0; i < form.cores.size(); ++i) {
    std::string prefix = form.cores.size() > 1 ? "arm " + std::to_string(i + 1) + " " : "";
    if (i > 0) out << prefix << "union: " << (form.union_all[i - 1] ? "all" : "distinct") << "\n";
    const CoreForm& core = form.cores[i];
    out << prefix << "distinct: " << (core.distinct ? "true" : "false") << "\n";
    out << prefix << "projection: " << joined(core.projection) << "\n";
    out << prefix << "from: " << joined(core.from) << "\n";
    if (!core.where.empty()) out << prefix << "where: " << joined(core.where) << "\n";
    if (!core.group_by.empty()) out << prefix << "group by: " << joined(core.group_by) << "\n";
    if (!core.having.empty()) out << prefix << "having: " << joined(core.having) << "\n";
  }
  if (!form.order_by.empty()) out << "order by: " << joined(form.order_by) << "\n";
  if (form.limit) out << "limit: " << *form.limit << "\n";
  return out.str();
}

}  // namespace sqleq
