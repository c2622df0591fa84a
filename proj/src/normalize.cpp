#include "sqleq/normalize.hpp"

#include <algorithm>

#include "sqleq/errors.hpp"
#include "sqleq/parse.hpp"

namespace sqleq {

namespace {

// Formats an ISO date into a YYYY/MM/DD-style pattern.
std::string format_date(const std::string& iso, const std::string& pattern) {
  std::string out;
  out.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern.compare(i, 4, "YYYY") == 0) {
      out += iso.substr(0, 4);
      i += 4;
    } else if (pattern.compare(i, 2, "MM") == 0) {
      out += iso.substr(5, 2);
      i += 2;
    } else if (pattern.compare(i, 2, "DD") == 0) {
      out += iso.substr(8, 2);
      i += 2;
    } else {
      out.push_back(pattern[i]);
      ++i;
    }
  }
  return out;
}

class NormalizePass {
 public:
  explicit NormalizePass(const NormalizationConfig& config) : config_(config) {}

  SelectStmt statement(const SelectStmt& stmt) {
    SelectStmt out;
    for (const SelectCore& core : stmt.cores) out.cores.push_back(this->core(core));
    out.union_all = stmt.union_all;
    for (const OrderKey& key : stmt.order_by) {
      out.order_by.push_back({expr(key.expr), key.descending});
    }
    out.limit = stmt.limit;
    return out;
  }

 private:
  SelectCore core(const SelectCore& in) {
    SelectCore out;
    out.distinct = in.distinct;
    for (const SelectItem& item : in.items) {
      out.items.push_back({item.star, item.star ? nullptr : expr(item.expr), item.alias});
    }
    for (const FromItem& item : in.from) {
      FromItem mapped;
      mapped.first = source(item.first);
      for (const JoinClause& join : item.joins) {
        mapped.joins.push_back({join.kind, source(join.source), expr(join.on)});
      }
      out.from.push_back(std::move(mapped));
    }
    out.where = predicate(in.where);
    for (const ExprPtr& key : in.group_by) out.group_by.push_back(expr(key));
    out.having = predicate(in.having);
    return out;
  }

  TableSource source(const TableSource& in) {
    TableSource out = in;
    if (in.derived) {
      out.derived = std::make_shared<const SelectStmt>(statement(*in.derived));
    }
    return out;
  }

  // WHERE / HAVING get their top-level AND conjuncts stable-sorted by
  // rendered text after each conjunct is normalized.
  ExprPtr predicate(const ExprPtr& in) {
    if (!in) return nullptr;
    std::vector<ExprPtr> conjuncts = split_conjuncts(in);
    for (ExprPtr& conjunct : conjuncts) conjunct = expr(conjunct);
    if (config_.sort_commutative_conjuncts && conjuncts.size() > 1) {
      std::stable_sort(conjuncts.begin(), conjuncts.end(),
                       [](const ExprPtr& a, const ExprPtr& b) { return render(a) < render(b); });
    }
    return join_conjuncts(conjuncts);
  }

  ExprPtr expr(const ExprPtr& in) {
    if (!in) return nullptr;
    const Expr::Node& node = in->node;
    if (auto* literal = std::get_if<Literal>(&node)) {
      if (literal->value.is_text()) {
        std::string canonical = canonicalize_date_text(literal->value.as_text(), config_);
        if (canonical != literal->value.as_text()) {
          return make_expr<Literal>(Value::text(std::move(canonical)));
        }
      }
      return in;
    }
    if (auto* negate = std::get_if<Negate>(&node)) return make_expr<Negate>(expr(negate->operand));
    if (auto* inversion = std::get_if<Not>(&node)) return make_expr<Not>(expr(inversion->operand));
    if (auto* binary = std::get_if<Binary>(&node))
      return make_expr<Binary>(binary->op, expr(binary->lhs), expr(binary->rhs));
    if (auto* compare = std::get_if<Compare>(&node))
      return make_expr<Compare>(compare->op, expr(compare->lhs), expr(compare->rhs));
    if (auto* logic = std::get_if<Logic>(&node))
      return make_expr<Logic>(logic->op, expr(logic->lhs), expr(logic->rhs));
    if (auto* like = std::get_if<Like>(&node))
      return make_expr<Like>(expr(like->operand), expr(like->pattern), like->negated);
    if (auto* isnull = std::get_if<IsNull>(&node))
      return make_expr<IsNull>(expr(isnull->operand), isnull->negated);
    if (auto* in_list = std::get_if<InList>(&node)) {
      std::vector<ExprPtr> items;
      for (const ExprPtr& item : in_list->items) items.push_back(expr(item));
      return make_expr<InList>(expr(in_list->operand), std::move(items), in_list->negated);
    }
    if (auto* in_subquery = std::get_if<InSubquery>(&node)) {
      return make_expr<InSubquery>(expr(in_subquery->operand),
                                   std::make_shared<const SelectStmt>(statement(*in_subquery->subquery)),
                                   in_subquery->negated);
    }
    if (auto* exists = std::get_if<Exists>(&node)) {
      return make_expr<Exists>(std::make_shared<const SelectStmt>(statement(*exists->subquery)),
                               exists->negated);
    }
    if (auto* scalar = std::get_if<ScalarSubquery>(&node)) {
      return make_expr<ScalarSubquery>(std::make_shared<const SelectStmt>(statement(*scalar->subquery)));
    }
    if (auto* case_when = std::get_if<CaseWhen>(&node)) {
      CaseWhen mapped;
      for (const auto& [condition, result] : case_when->branches) {
        mapped.branches.emplace_back(expr(condition), expr(result));
      }
      mapped.else_expr = expr(case_when->else_expr);
      return std::make_shared<const Expr>(Expr{std::move(mapped)});
    }
    if (auto* call = std::get_if<FuncCall>(&node)) {
      FuncCall mapped = *call;
      mapped.args.clear();
      for (const ExprPtr& arg : call->args) mapped.args.push_back(expr(arg));
      return std::make_shared<const Expr>(Expr{std::move(mapped)});
    }
    return in;  // ColumnRef
  }

  const NormalizationConfig& config_;
};

}  // namespace

std::string canonicalize_date_text(const std::string& text, const NormalizationConfig& config) {
  auto date = Date::parse(text);
  if (!date) return text;
  return format_date(date->iso(), config.canonical_date_format);
}

SelectStmt normalize(const SelectStmt& stmt, const NormalizationConfig& config) {
  // Round-trip guard: the canonical date pattern itself must be recognizable,
  // otherwise normalization would not be idempotent.
  std::string probe = format_date("2024-01-31", config.canonical_date_format);
  if (!Date::parse(probe)) {
    throw InputFormatError("normalization config", 1,
                           "canonical date format '" + config.canonical_date_format +
                               "' does not round-trip");
  }
  return NormalizePass(config).statement(stmt);
}

RenderStyle style_from(const NormalizationConfig& config) {
  RenderStyle style;
  style.uppercase_keywords = config.uppercase_keywords;
  style.explicit_alias_keyword = config.normalize_alias_keyword;
  style.trailing_semicolon = !config.strip_trailing_semicolon;
  return style;
}

std::string normalize_text(std::string_view sql, const NormalizationConfig& config) {
  SelectStmt normalized = normalize(parse(sql), config);
  return render(normalized, style_from(config));
}

}  // namespace sqleq
