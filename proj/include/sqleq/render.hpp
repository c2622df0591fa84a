#pragma once

#include <string>

#include "sqleq/ast.hpp"

namespace sqleq {

// Render style knobs; the defaults produce the canonical form used by the
// matcher (uppercase keywords, single spaces, explicit AS, no semicolon).
struct RenderStyle {
  bool uppercase_keywords = true;
  bool explicit_alias_keyword = true;
  bool trailing_semicolon = false;
};

// Deterministic canonical rendering. render(parse(text)) re-parses to a
// structurally identical statement.
std::string render(const SelectStmt& stmt);
std::string render(const SelectStmt& stmt, const RenderStyle& style);
std::string render(const ExprPtr& expr);
std::string render(const ExprPtr& expr, const RenderStyle& style);

}  // namespace sqleq
