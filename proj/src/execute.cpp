#include "sqleq/execute.hpp"

#include <algorithm>
#include <cctype>

#include "sqleq/render.hpp"

namespace sqleq {

namespace {

struct BoundColumn {
  std::string alias;
  std::string name;
};

struct Relation {
  std::vector<BoundColumn> cols;
  std::vector<Row> rows;
};

// One evaluation scope; either positioned on a row or on a group of rows.
struct Frame {
  const Relation* rel = nullptr;
  const Row* row = nullptr;                              // row mode
  const std::vector<const Row*>* group = nullptr;        // group mode
  const std::vector<std::string>* group_renders = nullptr;  // resolved key texts
  const Row* group_values = nullptr;
  const Row* aggregate_row = nullptr;  // set while evaluating an aggregate argument
};

using Bool3 = std::optional<bool>;

bool is_true(Bool3 b) { return b.has_value() && *b; }

Bool3 and3(Bool3 a, Bool3 b) {
  if (a.has_value() && !*a) return false;
  if (b.has_value() && !*b) return false;
  if (a.has_value() && b.has_value()) return true;
  return std::nullopt;
}

Bool3 or3(Bool3 a, Bool3 b) {
  if (is_true(a) || is_true(b)) return true;
  if (a.has_value() && b.has_value()) return false;
  return std::nullopt;
}

Bool3 not3(Bool3 a) {
  if (!a.has_value()) return std::nullopt;
  return !*a;
}

// Case-sensitive LIKE with % and _ wildcards.
bool like_match(const std::string& text, const std::string& pattern, std::size_t ti = 0,
                std::size_t pi = 0) {
  while (pi < pattern.size()) {
    char pc = pattern[pi];
    if (pc == '%') {
      for (std::size_t skip = ti; skip <= text.size(); ++skip) {
        if (like_match(text, pattern, skip, pi + 1)) return true;
      }
      return false;
    }
    if (ti >= text.size()) return false;
    if (pc != '_' && pc != text[ti]) return false;
    ++ti;
    ++pi;
  }
  return ti == text.size();
}

std::string ascii_lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::string ascii_upper(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

std::size_t codepoint_count(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

// Byte offset of the 0-based codepoint index (clamped to s.size()).
std::size_t codepoint_offset(const std::string& s, std::size_t index) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
      if (seen == index) return i;
      ++seen;
    }
  }
  return s.size();
}

class Executor {
 public:
  explicit Executor(const DatabaseInstance& db) : db_(db) {}

  ResultTable statement(const SelectStmt& stmt) {
    std::vector<ResultTable> arms;
    arms.reserve(stmt.cores.size());
    // Hidden sort keys are only producible for a single core.
    bool single = stmt.cores.size() == 1;
    std::vector<ExprPtr> hidden_keys;
    if (single && !stmt.order_by.empty()) {
      hidden_keys = resolve_core_order_keys(stmt.cores[0], stmt.order_by);
    }
    ResultTable combined;
    if (single) {
      combined = core(stmt.cores[0], hidden_keys);
    } else {
      combined = core(stmt.cores[0], {});
      for (std::size_t i = 1; i < stmt.cores.size(); ++i) {
        ResultTable arm = core(stmt.cores[i], {});
        if (arm.columns.size() != combined.columns.size()) {
          throw ExecError(ExecErrorKind::UnionMismatch,
                          "union arms project different column counts");
        }
        for (Row& row : arm.rows) combined.rows.push_back(std::move(row));
        if (!stmt.union_all[i - 1]) dedupe(combined.rows, combined.columns.size());
      }
    }
    std::size_t visible = combined.columns.size() - (single ? hidden_keys.size() : 0);

    if (!stmt.order_by.empty()) {
      std::vector<std::size_t> key_cols;
      std::vector<bool> descending;
      if (single) {
        for (std::size_t i = 0; i < stmt.order_by.size(); ++i) {
          key_cols.push_back(visible + i);
          descending.push_back(stmt.order_by[i].descending);
        }
      } else {
        for (const OrderKey& key : stmt.order_by) {
          key_cols.push_back(resolve_output_order_key(key.expr, combined.columns));
          descending.push_back(key.descending);
        }
      }
      sort_rows(combined.rows, key_cols, descending);
      if (stmt.limit && static_cast<std::size_t>(*stmt.limit) < combined.rows.size()) {
        combined.rows.resize(static_cast<std::size_t>(*stmt.limit));
      }
      combined.tie_group_sizes = tie_groups(combined.rows, key_cols);
      combined.ordered = true;
    } else if (stmt.limit && static_cast<std::size_t>(*stmt.limit) < combined.rows.size()) {
      combined.rows.resize(static_cast<std::size_t>(*stmt.limit));
    }

    // Drop hidden key columns.
    if (single && !hidden_keys.empty()) {
      combined.columns.resize(visible);
      for (Row& row : combined.rows) row.resize(visible);
    }
    return combined;
  }

 private:
  // --- FROM construction ---------------------------------------------------

  Relation base_source(const TableSource& source) {
    Relation rel;
    std::string alias = source.effective_alias();
    if (source.derived) {
      ResultTable derived = statement(*source.derived);
      for (const std::string& name : derived.columns) rel.cols.push_back({alias, name});
      rel.rows = std::move(derived.rows);
      return rel;
    }
    const TableDef* table = db_.schema.find_table(source.table);
    if (!table) {
      throw ExecError(ExecErrorKind::UnknownTable, source.table);
    }
    for (const ColumnDef& column : table->columns) rel.cols.push_back({alias, column.name});
    auto it = db_.data.find(source.table);
    if (it != db_.data.end()) rel.rows = it->second;
    return rel;
  }

  static Relation merge_cols(const Relation& left, const Relation& right) {
    Relation rel;
    rel.cols = left.cols;
    for (const BoundColumn& col : right.cols) {
      for (const BoundColumn& existing : left.cols) {
        if (existing.alias == col.alias) {
          throw ExecError(ExecErrorKind::AmbiguousColumn, "duplicate table alias " + col.alias);
        }
      }
    }
    rel.cols.insert(rel.cols.end(), right.cols.begin(), right.cols.end());
    return rel;
  }

  Relation join(const Relation& left, const Relation& right, JoinKind kind, const ExprPtr& on) {
    Relation rel = merge_cols(left, right);
    for (const Row& lrow : left.rows) {
      bool matched = false;
      for (const Row& rrow : right.rows) {
        Row combined = lrow;
        combined.insert(combined.end(), rrow.begin(), rrow.end());
        bool keep = true;
        if (on) {
          Frame frame{&rel, &combined};
          frames_.push_back(frame);
          keep = is_true(predicate(on));
          frames_.pop_back();
        }
        if (keep) {
          matched = true;
          rel.rows.push_back(std::move(combined));
        }
      }
      if (kind == JoinKind::Left && !matched) {
        Row combined = lrow;
        combined.resize(rel.cols.size());  // right side NULL-extended
        rel.rows.push_back(std::move(combined));
      }
    }
    return rel;
  }

  Relation cross(const Relation& left, const Relation& right) {
    Relation rel = merge_cols(left, right);
    for (const Row& lrow : left.rows) {
      for (const Row& rrow : right.rows) {
        Row combined = lrow;
        combined.insert(combined.end(), rrow.begin(), rrow.end());
        rel.rows.push_back(std::move(combined));
      }
    }
    return rel;
  }

  Relation build_from(const SelectCore& core) {
    if (core.from.empty()) {
      Relation rel;
      rel.rows.emplace_back();
      return rel;
    }
    Relation acc;
    bool first_item = true;
    for (const FromItem& item : core.from) {
      Relation current = base_source(item.first);
      for (const JoinClause& clause : item.joins) {
        current = join(current, base_source(clause.source), clause.kind, clause.on);
      }
      acc = first_item ? std::move(current) : cross(acc, current);
      first_item = false;
    }
    return acc;
  }

  // --- core execution ------------------------------------------------------

  static bool items_have_aggregate(const SelectCore& core) {
    for (const SelectItem& item : core.items) {
      if (!item.star && contains_aggregate(item.expr)) return true;
    }
    return contains_aggregate(core.having);
  }

  // Resolves GROUP BY ordinals to projection expressions.
  std::vector<ExprPtr> resolve_group_exprs(const SelectCore& core) {
    std::vector<ExprPtr> keys;
    for (const ExprPtr& key : core.group_by) {
      keys.push_back(resolve_ordinal(key, core, "GROUP BY"));
    }
    return keys;
  }

  ExprPtr resolve_ordinal(const ExprPtr& expr, const SelectCore& core, const char* clause) {
    auto* literal = std::get_if<Literal>(&expr->node);
    if (!literal || !literal->value.is_int()) return expr;
    std::int64_t ordinal = literal->value.as_int();
    if (ordinal < 1 || static_cast<std::size_t>(ordinal) > core.items.size()) {
      throw ExecError(ExecErrorKind::TypeMismatch,
                      std::string(clause) + " ordinal " + std::to_string(ordinal) +
                          " is out of range");
    }
    const SelectItem& item = core.items[static_cast<std::size_t>(ordinal - 1)];
    if (item.star) {
      throw ExecError(ExecErrorKind::TypeMismatch,
                      std::string(clause) + " ordinal cannot reference *");
    }
    return item.expr;
  }

  // ORDER BY keys for a single core become hidden projection expressions:
  // ordinals and projection aliases resolve to the projected expression,
  // anything else evaluates in the core's scope.
  std::vector<ExprPtr> resolve_core_order_keys(const SelectCore& core,
                                               const std::vector<OrderKey>& order_by) {
    std::vector<ExprPtr> keys;
    for (const OrderKey& key : order_by) {
      ExprPtr resolved = resolve_ordinal(key.expr, core, "ORDER BY");
      if (resolved == key.expr) {
        if (auto* column = std::get_if<ColumnRef>(&resolved->node);
            column && column->table.empty()) {
          for (const SelectItem& item : core.items) {
            if (!item.star && item.alias && *item.alias == column->column) {
              resolved = item.expr;
              break;
            }
          }
        }
      }
      keys.push_back(std::move(resolved));
    }
    return keys;
  }

  std::size_t resolve_output_order_key(const ExprPtr& expr,
                                       const std::vector<std::string>& columns) {
    if (auto* literal = std::get_if<Literal>(&expr->node);
        literal && literal->value.is_int()) {
      std::int64_t ordinal = literal->value.as_int();
      if (ordinal < 1 || static_cast<std::size_t>(ordinal) > columns.size()) {
        throw ExecError(ExecErrorKind::TypeMismatch, "ORDER BY ordinal out of range");
      }
      return static_cast<std::size_t>(ordinal - 1);
    }
    if (auto* column = std::get_if<ColumnRef>(&expr->node); column && column->table.empty()) {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == column->column) return i;
      }
    }
    throw ExecError(ExecErrorKind::UnknownColumn,
                    "ORDER BY over a union must name an output column");
  }

  std::string output_name(const SelectItem& item) const {
    if (item.alias) return *item.alias;
    if (auto* column = std::get_if<ColumnRef>(&item.expr->node)) return column->column;
    return render(item.expr);
  }

  ResultTable core(const SelectCore& core_in, const std::vector<ExprPtr>& hidden_keys) {
    Relation rel = build_from(core_in);

    std::vector<Row> filtered;
    if (core_in.where) {
      for (Row& row : rel.rows) {
        Frame frame{&rel, &row};
        frames_.push_back(frame);
        bool keep = is_true(predicate(core_in.where));
        frames_.pop_back();
        if (keep) filtered.push_back(std::move(row));
      }
      rel.rows = std::move(filtered);
    }

    bool grouped = !core_in.group_by.empty() || items_have_aggregate(core_in);

    ResultTable out;
    for (const SelectItem& item : core_in.items) {
      if (item.star) {
        if (grouped) {
          throw ExecError(ExecErrorKind::UngroupedColumn, "* in an aggregate query");
        }
        for (const BoundColumn& col : rel.cols) out.columns.push_back(col.name);
      } else {
        out.columns.push_back(output_name(item));
      }
    }
    for (std::size_t i = 0; i < hidden_keys.size(); ++i) {
      out.columns.push_back("$order" + std::to_string(i));
    }

    if (grouped) {
      project_groups(core_in, rel, hidden_keys, out);
    } else {
      for (const Row& row : rel.rows) {
        Frame frame{&rel, &row};
        frames_.push_back(frame);
        out.rows.push_back(project_row(core_in, rel, row, hidden_keys));
        frames_.pop_back();
      }
    }

    if (core_in.distinct) {
      dedupe_visible(out.rows, out.columns.size() - hidden_keys.size());
    }
    return out;
  }

  Row project_row(const SelectCore& core_in, const Relation& rel, const Row& row,
                  const std::vector<ExprPtr>& hidden_keys) {
    Row output;
    for (const SelectItem& item : core_in.items) {
      if (item.star) {
        output.insert(output.end(), row.begin(), row.end());
      } else {
        output.push_back(eval(item.expr));
      }
    }
    for (const ExprPtr& key : hidden_keys) output.push_back(eval(key));
    (void)rel;
    return output;
  }

  void project_groups(const SelectCore& core_in, Relation& rel,
                      const std::vector<ExprPtr>& hidden_keys, ResultTable& out) {
    std::vector<ExprPtr> group_exprs = resolve_group_exprs(core_in);
    for (const ExprPtr& key : group_exprs) {
      if (contains_aggregate(key)) {
        throw ExecError(ExecErrorKind::AggregateMisuse, "aggregate in GROUP BY");
      }
    }
    // Resolved canonical texts used to match projection references to keys.
    std::vector<std::string> renders;
    for (const ExprPtr& key : group_exprs) renders.push_back(resolved_render(key, rel));

    struct Group {
      Row keys;
      std::vector<const Row*> rows;
    };
    std::vector<Group> groups;
    for (const Row& row : rel.rows) {
      Row keys;
      {
        Frame frame{&rel, &row};
        frames_.push_back(frame);
        for (const ExprPtr& key : group_exprs) keys.push_back(eval(key));
        frames_.pop_back();
      }
      Group* found = nullptr;
      for (Group& group : groups) {
        bool equal_keys = true;
        for (std::size_t i = 0; i < keys.size(); ++i) {
          if (!same_value(group.keys[i], keys[i])) {
            equal_keys = false;
            break;
          }
        }
        if (equal_keys) {
          found = &group;
          break;
        }
      }
      if (!found) {
        groups.push_back({std::move(keys), {}});
        found = &groups.back();
      }
      found->rows.push_back(&row);
    }
    if (core_in.group_by.empty() && groups.empty()) {
      groups.push_back({{}, {}});  // global aggregate over an empty input
    }

    for (const Group& group : groups) {
      Frame frame{&rel, nullptr, &group.rows, &renders, &group.keys};
      frames_.push_back(frame);
      bool keep = true;
      if (core_in.having) keep = is_true(predicate(core_in.having));
      if (keep) {
        Row output;
        for (const SelectItem& item : core_in.items) output.push_back(eval(item.expr));
        for (const ExprPtr& key : hidden_keys) output.push_back(eval(key));
        out.rows.push_back(std::move(output));
      }
      frames_.pop_back();
    }
  }

  // Canonical text of an expression with unqualified column refs resolved
  // against the relation, used to match group keys.
  std::string resolved_render(const ExprPtr& expr, const Relation& rel) {
    if (auto* column = std::get_if<ColumnRef>(&expr->node)) {
      auto located = locate(rel, *column);
      if (located) {
        return rel.cols[*located].alias + "." + rel.cols[*located].name;
      }
    }
    return render(expr);
  }

  // Index of a column in the relation, or nullopt when not present.
  std::optional<std::size_t> locate(const Relation& rel, const ColumnRef& ref) {
    if (!ref.table.empty()) {
      bool alias_seen = false;
      for (std::size_t i = 0; i < rel.cols.size(); ++i) {
        if (rel.cols[i].alias == ref.table) {
          alias_seen = true;
          if (rel.cols[i].name == ref.column) return i;
        }
      }
      if (alias_seen) {
        throw ExecError(ExecErrorKind::UnknownColumn, ref.table + "." + ref.column);
      }
      return std::nullopt;
    }
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < rel.cols.size(); ++i) {
      if (rel.cols[i].name == ref.column) {
        if (found) {
          throw ExecError(ExecErrorKind::AmbiguousColumn, ref.column);
        }
        found = i;
      }
    }
    return found;
  }

  // --- expression evaluation ----------------------------------------------

  Bool3 predicate(const ExprPtr& expr) {
    Value value = eval(expr);
    if (value.is_null()) return std::nullopt;
    if (!value.is_bool()) {
      throw ExecError(ExecErrorKind::TypeMismatch,
                      "expected a boolean predicate, got " + value.to_text());
    }
    return value.as_bool();
  }

  static Value from3(Bool3 b) { return b.has_value() ? Value::boolean(*b) : Value::null(); }

  Value eval(const ExprPtr& expr) {
    // Group keys shadow everything else inside a grouped scope.
    if (!frames_.empty()) {
      Frame& frame = frames_.back();
      if (frame.group && !frame.aggregate_row) {
        const Relation& rel = *frame.rel;
        std::string text = resolved_render_or_raw(expr, rel);
        for (std::size_t i = 0; i < frame.group_renders->size(); ++i) {
          if ((*frame.group_renders)[i] == text) return (*frame.group_values)[i];
        }
      }
    }
    const Expr::Node& node = expr->node;
    if (auto* column = std::get_if<ColumnRef>(&node)) return eval_column(*column);
    if (auto* literal = std::get_if<Literal>(&node)) return literal->value;
    if (auto* negate = std::get_if<Negate>(&node)) {
      Value operand = eval(negate->operand);
      if (operand.is_null()) return Value::null();
      if (operand.is_int()) return Value::integer(-operand.as_int());
      if (operand.is_float()) return Value::real(-operand.as_float());
      throw ExecError(ExecErrorKind::TypeMismatch, "unary minus on " + operand.to_text());
    }
    if (auto* inversion = std::get_if<Not>(&node)) return from3(not3(predicate(inversion->operand)));
    if (auto* binary = std::get_if<Binary>(&node)) return eval_binary(*binary);
    if (auto* compare = std::get_if<Compare>(&node)) return eval_compare(*compare);
    if (auto* logic = std::get_if<Logic>(&node)) {
      Bool3 lhs = predicate(logic->lhs);
      // Short-circuit only on decisive values to keep error behavior uniform.
      Bool3 rhs = predicate(logic->rhs);
      return from3(logic->op == LogicOp::And ? and3(lhs, rhs) : or3(lhs, rhs));
    }
    if (auto* like = std::get_if<Like>(&node)) return eval_like(*like);
    if (auto* isnull = std::get_if<IsNull>(&node)) {
      bool null = eval(isnull->operand).is_null();
      return Value::boolean(isnull->negated ? !null : null);
    }
    if (auto* in_list = std::get_if<InList>(&node)) return eval_in_list(*in_list);
    if (auto* in_subquery = std::get_if<InSubquery>(&node)) return eval_in_subquery(*in_subquery);
    if (auto* exists = std::get_if<Exists>(&node)) {
      ResultTable result = statement(*exists->subquery);
      bool found = !result.rows.empty();
      return Value::boolean(exists->negated ? !found : found);
    }
    if (auto* scalar = std::get_if<ScalarSubquery>(&node)) return eval_scalar_subquery(*scalar);
    if (auto* case_when = std::get_if<CaseWhen>(&node)) {
      for (const auto& [condition, result] : case_when->branches) {
        if (is_true(predicate(condition))) return eval(result);
      }
      return case_when->else_expr ? eval(case_when->else_expr) : Value::null();
    }
    auto* call = std::get_if<FuncCall>(&node);
    return eval_call(*call);
  }

  std::string resolved_render_or_raw(const ExprPtr& expr, const Relation& rel) {
    try {
      return resolved_render(expr, rel);
    } catch (const ExecError&) {
      return render(expr);
    }
  }

  Value eval_column(const ColumnRef& ref) {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      Frame& frame = *it;
      const Relation& rel = *frame.rel;
      std::optional<std::size_t> index = locate(rel, ref);
      if (!index) continue;
      if (frame.row) return (*frame.row)[*index];
      if (frame.aggregate_row) return (*frame.aggregate_row)[*index];
      // Group mode without an aggregate row: only keys are addressable. The
      // current frame's keys were already matched in eval(); references that
      // land here come from enclosed subqueries correlating on an outer
      // grouped scope, so match them against that frame's keys.
      std::string resolved = rel.cols[*index].alias + "." + rel.cols[*index].name;
      for (std::size_t i = 0; i < frame.group_renders->size(); ++i) {
        if ((*frame.group_renders)[i] == resolved) return (*frame.group_values)[i];
      }
      throw ExecError(ExecErrorKind::UngroupedColumn,
                      (ref.table.empty() ? ref.column : ref.table + "." + ref.column));
    }
    throw ExecError(ExecErrorKind::UnknownColumn,
                    (ref.table.empty() ? ref.column : ref.table + "." + ref.column));
  }

  Value eval_binary(const Binary& binary) {
    Value lhs = eval(binary.lhs), rhs = eval(binary.rhs);
    if (lhs.is_null() || rhs.is_null()) return Value::null();
    if (!lhs.is_numeric() || !rhs.is_numeric()) {
      throw ExecError(ExecErrorKind::TypeMismatch,
                      "arithmetic on " + lhs.to_text() + " and " + rhs.to_text());
    }
    if (lhs.is_int() && rhs.is_int()) {
      std::int64_t a = lhs.as_int(), b = rhs.as_int();
      switch (binary.op) {
        case BinaryOp::Add: return Value::integer(a + b);
        case BinaryOp::Sub: return Value::integer(a - b);
        case BinaryOp::Mul: return Value::integer(a * b);
        case BinaryOp::Div:
          if (b == 0) throw ExecError(ExecErrorKind::DivisionByZero, "integer division");
          return Value::integer(a / b);
      }
    }
    double a = lhs.numeric(), b = rhs.numeric();
    switch (binary.op) {
      case BinaryOp::Add: return Value::real(a + b);
      case BinaryOp::Sub: return Value::real(a - b);
      case BinaryOp::Mul: return Value::real(a * b);
      case BinaryOp::Div:
        if (b == 0.0) throw ExecError(ExecErrorKind::DivisionByZero, "division");
        return Value::real(a / b);
    }
    return Value::null();
  }

  Value eval_compare(const Compare& compare) {
    Value lhs = eval(compare.lhs), rhs = eval(compare.rhs);
    std::optional<int> c = lhs.compare(rhs);
    if (!c) return Value::null();
    switch (compare.op) {
      case CompareOp::Eq: return Value::boolean(*c == 0);
      case CompareOp::Ne: return Value::boolean(*c != 0);
      case CompareOp::Lt: return Value::boolean(*c < 0);
      case CompareOp::Le: return Value::boolean(*c <= 0);
      case CompareOp::Gt: return Value::boolean(*c > 0);
      case CompareOp::Ge: return Value::boolean(*c >= 0);
    }
    return Value::null();
  }

  Value eval_like(const Like& like) {
    Value operand = eval(like.operand), pattern = eval(like.pattern);
    if (operand.is_null() || pattern.is_null()) return Value::null();
    if (!operand.is_text() || !pattern.is_text()) {
      throw ExecError(ExecErrorKind::TypeMismatch, "LIKE requires text operands");
    }
    bool matched = like_match(operand.as_text(), pattern.as_text());
    return Value::boolean(like.negated ? !matched : matched);
  }

  // SQL IN semantics: TRUE on a match, UNKNOWN when no match but some
  // comparison was UNKNOWN, FALSE otherwise. NOT IN negates the three-valued
  // result, which is what makes NULLs hazardous.
  Value membership(const Value& needle, const std::vector<Value>& haystack, bool negated) {
    if (needle.is_null()) return Value::null();
    bool unknown = false;
    for (const Value& candidate : haystack) {
      std::optional<int> c = needle.compare(candidate);
      if (!c) {
        unknown = true;
      } else if (*c == 0) {
        return Value::boolean(!negated);
      }
    }
    if (unknown) return Value::null();
    return Value::boolean(negated);
  }

  Value eval_in_list(const InList& in_list) {
    Value needle = eval(in_list.operand);
    std::vector<Value> haystack;
    for (const ExprPtr& item : in_list.items) haystack.push_back(eval(item));
    return membership(needle, haystack, in_list.negated);
  }

  Value eval_in_subquery(const InSubquery& in_subquery) {
    Value needle = eval(in_subquery.operand);
    ResultTable result = statement(*in_subquery.subquery);
    if (result.columns.size() != 1) {
      throw ExecError(ExecErrorKind::TypeMismatch, "IN subquery must project one column");
    }
    std::vector<Value> haystack;
    for (const Row& row : result.rows) haystack.push_back(row[0]);
    return membership(needle, haystack, in_subquery.negated);
  }

  Value eval_scalar_subquery(const ScalarSubquery& scalar) {
    ResultTable result = statement(*scalar.subquery);
    if (result.columns.size() != 1) {
      throw ExecError(ExecErrorKind::TypeMismatch, "scalar subquery must project one column");
    }
    if (result.rows.empty()) return Value::null();
    if (result.rows.size() > 1) {
      throw ExecError(ExecErrorKind::ScalarSubqueryCardinality,
                      "subquery returned " + std::to_string(result.rows.size()) + " rows");
    }
    return result.rows[0][0];
  }

  Value eval_call(const FuncCall& call) {
    if (is_aggregate(call.kind)) return eval_aggregate(call);
    switch (call.kind) {
      case FuncKind::Lower:
      case FuncKind::Upper: {
        Value v = eval(call.args[0]);
        if (v.is_null()) return Value::null();
        if (!v.is_text()) {
          throw ExecError(ExecErrorKind::TypeMismatch, "case folding requires text");
        }
        return Value::text(call.kind == FuncKind::Lower ? ascii_lower(v.as_text())
                                                        : ascii_upper(v.as_text()));
      }
      case FuncKind::Length:
      case FuncKind::CharLength: {
        Value v = eval(call.args[0]);
        if (v.is_null()) return Value::null();
        if (!v.is_text()) {
          throw ExecError(ExecErrorKind::TypeMismatch, "length requires text");
        }
        // LENGTH counts UTF-8 bytes; CHAR_LENGTH counts code points.
        std::size_t n = call.kind == FuncKind::Length ? v.as_text().size()
                                                      : codepoint_count(v.as_text());
        return Value::integer(static_cast<std::int64_t>(n));
      }
      case FuncKind::Substring: return eval_substring(call);
      case FuncKind::Cast: return eval_cast(call);
      default: break;
    }
    throw ExecError(ExecErrorKind::TypeMismatch, "unsupported function");
  }

  Value eval_substring(const FuncCall& call) {
    Value text = eval(call.args[0]);
    Value start = eval(call.args[1]);
    Value length = call.args.size() == 3 ? eval(call.args[2]) : Value::null();
    if (text.is_null() || start.is_null() || (call.args.size() == 3 && length.is_null())) {
      return Value::null();
    }
    if (!text.is_text() || !start.is_int() || (call.args.size() == 3 && !length.is_int())) {
      throw ExecError(ExecErrorKind::TypeMismatch, "SUBSTRING(text, int[, int])");
    }
    const std::string& s = text.as_text();
    std::int64_t begin = std::max<std::int64_t>(start.as_int(), 1) - 1;  // to 0-based codepoints
    std::size_t total = codepoint_count(s);
    if (static_cast<std::size_t>(begin) >= total) return Value::text("");
    std::size_t end_cp = total;
    if (call.args.size() == 3) {
      if (length.as_int() < 0) {
        throw ExecError(ExecErrorKind::TypeMismatch, "negative SUBSTRING length");
      }
      end_cp = std::min<std::size_t>(total, static_cast<std::size_t>(begin + length.as_int()));
    }
    std::size_t from = codepoint_offset(s, static_cast<std::size_t>(begin));
    std::size_t to = codepoint_offset(s, end_cp);
    return Value::text(s.substr(from, to - from));
  }

  Value eval_cast(const FuncCall& call) {
    Value v = eval(call.args[0]);
    if (v.is_null()) return Value::null();
    switch (call.cast_type) {
      case ColumnType::Int:
        if (v.is_int()) return v;
        if (v.is_float()) return Value::integer(static_cast<std::int64_t>(v.as_float()));
        if (v.is_bool()) return Value::integer(v.as_bool() ? 1 : 0);
        if (v.is_text()) {
          try {
            std::size_t used = 0;
            std::int64_t parsed = std::stoll(v.as_text(), &used);
            if (used == v.as_text().size()) return Value::integer(parsed);
          } catch (const std::exception&) {
          }
        }
        break;
      case ColumnType::Float:
        if (v.is_numeric()) return Value::real(v.numeric());
        if (v.is_text()) {
          try {
            std::size_t used = 0;
            double parsed = std::stod(v.as_text(), &used);
            if (used == v.as_text().size()) return Value::real(parsed);
          } catch (const std::exception&) {
          }
        }
        break;
      case ColumnType::Text:
        return Value::text(v.to_text());
      case ColumnType::Date: {
        if (v.is_date()) return v;
        if (v.is_text()) {
          auto date = Date::parse(v.as_text());
          if (date) return Value::date(*date);
        }
        break;
      }
      case ColumnType::Bool:
        if (v.is_bool()) return v;
        if (v.is_int()) return Value::boolean(v.as_int() != 0);
        if (v.is_text()) {
          std::string lower = ascii_lower(v.as_text());
          if (lower == "true") return Value::boolean(true);
          if (lower == "false") return Value::boolean(false);
        }
        break;
    }
    throw ExecError(ExecErrorKind::TypeMismatch,
                    "cannot cast " + v.to_text() + " to " + to_string(call.cast_type));
  }

  Value eval_aggregate(const FuncCall& call) {
    if (frames_.empty() || !frames_.back().group) {
      throw ExecError(ExecErrorKind::AggregateMisuse,
                      std::string(to_string(call.kind)) + " outside an aggregate query");
    }
    Frame& frame = frames_.back();
    if (frame.aggregate_row) {
      throw ExecError(ExecErrorKind::AggregateMisuse, "nested aggregate");
    }
    const std::vector<const Row*>& rows = *frame.group;
    if (call.kind == FuncKind::Count && call.star) {
      return Value::integer(static_cast<std::int64_t>(rows.size()));
    }
    std::vector<Value> values;
    for (const Row* row : rows) {
      frame.aggregate_row = row;
      Value v;
      try {
        v = eval(call.args[0]);
      } catch (...) {
        frame.aggregate_row = nullptr;
        throw;
      }
      frame.aggregate_row = nullptr;
      if (!v.is_null()) values.push_back(std::move(v));
    }
    switch (call.kind) {
      case FuncKind::Count:
        return Value::integer(static_cast<std::int64_t>(values.size()));
      case FuncKind::Sum:
      case FuncKind::Avg: {
        if (values.empty()) return Value::null();
        bool all_int = true;
        for (const Value& v : values) {
          if (!v.is_numeric()) {
            throw ExecError(ExecErrorKind::TypeMismatch, "SUM/AVG over non-numeric values");
          }
          if (!v.is_int()) all_int = false;
        }
        if (call.kind == FuncKind::Sum && all_int) {
          std::int64_t total = 0;
          for (const Value& v : values) total += v.as_int();
          return Value::integer(total);
        }
        double total = 0.0;
        for (const Value& v : values) total += v.numeric();
        return call.kind == FuncKind::Sum
                   ? Value::real(total)
                   : Value::real(total / static_cast<double>(values.size()));
      }
      case FuncKind::Min:
      case FuncKind::Max: {
        if (values.empty()) return Value::null();
        Value best = values[0];
        for (std::size_t i = 1; i < values.size(); ++i) {
          std::optional<int> c = values[i].compare(best);
          if (!c) continue;
          if ((call.kind == FuncKind::Min && *c < 0) || (call.kind == FuncKind::Max && *c > 0)) {
            best = values[i];
          }
        }
        return best;
      }
      default:
        break;
    }
    throw ExecError(ExecErrorKind::AggregateMisuse, "unsupported aggregate");
  }

  // --- ordering and dedup ---------------------------------------------------

  void sort_rows(std::vector<Row>& rows, const std::vector<std::size_t>& key_cols,
                 const std::vector<bool>& descending) {
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
      for (std::size_t k = 0; k < key_cols.size(); ++k) {
        const Value& va = a[key_cols[k]];
        const Value& vb = b[key_cols[k]];
        bool na = va.is_null(), nb = vb.is_null();
        if (na || nb) {
          if (na == nb) continue;  // both NULL: tie on this key
          return nb;               // NULLs last in both directions
        }
        std::optional<int> c = va.compare(vb);
        if (*c == 0) continue;
        bool less = *c < 0;
        return descending[k] ? !less : less;
      }
      return false;
    });
  }

  std::vector<std::size_t> tie_groups(const std::vector<Row>& rows,
                                      const std::vector<std::size_t>& key_cols) {
    std::vector<std::size_t> groups;
    std::size_t i = 0;
    while (i < rows.size()) {
      std::size_t j = i + 1;
      while (j < rows.size()) {
        bool tie = true;
        for (std::size_t key : key_cols) {
          if (!same_value(rows[i][key], rows[j][key])) {
            tie = false;
            break;
          }
        }
        if (!tie) break;
        ++j;
      }
      groups.push_back(j - i);
      i = j;
    }
    return groups;
  }

  static void dedupe(std::vector<Row>& rows, std::size_t arity) {
    std::vector<Row> unique;
    for (Row& row : rows) {
      bool seen = false;
      for (const Row& kept : unique) {
        bool equal_rows = true;
        for (std::size_t i = 0; i < arity; ++i) {
          if (!same_value(kept[i], row[i])) {
            equal_rows = false;
            break;
          }
        }
        if (equal_rows) {
          seen = true;
          break;
        }
      }
      if (!seen) unique.push_back(std::move(row));
    }
    rows = std::move(unique);
  }

  // DISTINCT compares only the visible prefix; hidden sort keys ride along
  // with the first occurrence.
  static void dedupe_visible(std::vector<Row>& rows, std::size_t visible) {
    dedupe(rows, visible);
  }

  const DatabaseInstance& db_;
  std::vector<Frame> frames_;
};

}  // namespace

ResultTable execute(const SelectStmt& stmt, const DatabaseInstance& instance) {
  return Executor(instance).statement(stmt);
}

}  // namespace sqleq
