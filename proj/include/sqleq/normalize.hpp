#pragma once

#include <string>

#include "sqleq/ast.hpp"
#include "sqleq/render.hpp"

namespace sqleq {

// Controls the canonicalization applied before matching. Defaults produce the
// canonical form the matcher compares.
struct NormalizationConfig {
  bool uppercase_keywords = true;
  bool strip_trailing_semicolon = true;
  // Target pattern for date-shaped text literals; tokens YYYY, MM, DD plus a
  // single separator character, e.g. "YYYY-MM-DD".
  std::string canonical_date_format = "YYYY-MM-DD";
  bool collapse_whitespace = true;
  bool normalize_alias_keyword = true;  // render aliases with an explicit AS
  bool sort_commutative_conjuncts = true;
};

// AST-level normalization: rewrites date-shaped text literals into the
// canonical date format and stable-sorts top-level AND conjuncts of WHERE and
// HAVING clauses by rendered text. Idempotent and semantics-preserving.
SelectStmt normalize(const SelectStmt& stmt, const NormalizationConfig& config = {});

// Text-level convenience: parse, normalize, render with the config's style.
// Whitespace collapse and keyword casing fall out of re-rendering.
std::string normalize_text(std::string_view sql, const NormalizationConfig& config = {});

// Reformats a recognized date literal into the configured pattern; returns
// the input unchanged when it is not date-shaped.
std::string canonicalize_date_text(const std::string& text, const NormalizationConfig& config);

RenderStyle style_from(const NormalizationConfig& config);

}  // namespace sqleq
