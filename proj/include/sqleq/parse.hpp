#pragma once

#include <string_view>

#include "sqleq/ast.hpp"
#include "sqleq/errors.hpp"

namespace sqleq {

// Parses one SELECT statement (optionally ';'-terminated). Identifiers fold
// to lower case; comments (-- and /* */) are stripped; TOP n becomes LIMIT n.
// Throws ParseError with a byte offset and an expected-token hint.
SelectStmt parse(std::string_view sql);

// True when the text parses; never throws.
bool parsable(std::string_view sql);

}  // namespace sqleq
