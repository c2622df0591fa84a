#include "sqleq/parse.hpp"

#include <cctype>
#include <charconv>
#include <unordered_set>

namespace sqleq {

namespace {

enum class TokenKind {
  Ident,
  Integer,
  Float,
  String,
  Punct,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;   // identifiers folded to lower case; punct verbatim
  std::size_t offset = 0;
  std::int64_t int_value = 0;
  double float_value = 0.0;
};

const std::unordered_set<std::string>& reserved_words() {
  static const std::unordered_set<std::string> words = {
      "select", "distinct", "top", "from", "where", "group", "by", "having", "order",
      "asc", "desc", "limit", "union", "all", "join", "inner", "left", "outer", "on",
      "as", "and", "or", "not", "in", "exists", "like", "is", "null", "true", "false",
      "case", "when", "then", "else", "end", "cast"};
  return words;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) {
        tokens.push_back({TokenKind::End, "", pos_, 0, 0.0});
        return tokens;
      }
      tokens.push_back(next_token());
    }
  }

 private:
  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        std::size_t start = pos_;
        pos_ += 2;
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) ++pos_;
        if (pos_ + 1 >= text_.size()) {
          throw ParseError("unterminated block comment", start, "*/");
        }
        pos_ += 2;
      } else {
        return;
      }
    }
  }

  Token next_token() {
    std::size_t start = pos_;
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_]))));
        ++pos_;
      }
      return {TokenKind::Ident, std::move(word), start, 0, 0.0};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      return lex_number(start);
    }
    if (c == '\'') {
      return lex_string(start);
    }
    return lex_punct(start);
  }

  Token lex_number(std::size_t start) {
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    bool is_float = false;
    if (end < text_.size() && text_[end] == '.' && end + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[end + 1]))) {
      is_float = true;
      ++end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < text_.size() && (text_[exp] == '+' || text_[exp] == '-')) ++exp;
      if (exp < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp]))) {
        is_float = true;
        end = exp;
        while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      }
    }
    std::string_view body = text_.substr(start, end - start);
    Token token{is_float ? TokenKind::Float : TokenKind::Integer, std::string(body), start, 0, 0.0};
    if (is_float) {
      token.float_value = std::stod(token.text);
    } else {
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), token.int_value);
      if (ec != std::errc() || ptr != body.data() + body.size()) {
        throw ParseError("integer literal out of range", start, "integer");
      }
    }
    pos_ = end;
    return token;
  }

  Token lex_string(std::size_t start) {
    std::string body;
    ++pos_;  // opening quote
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\'') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
          body.push_back('\'');
          pos_ += 2;
          continue;
        }
        ++pos_;
        return {TokenKind::String, std::move(body), start, 0, 0.0};
      }
      body.push_back(c);
      ++pos_;
    }
    throw ParseError("unterminated string literal", start, "'");
  }

  Token lex_punct(std::size_t start) {
    auto two = text_.substr(pos_, 2);
    if (two == "<>" || two == "!=" || two == "<=" || two == ">=") {
      pos_ += 2;
      return {TokenKind::Punct, std::string(two == "!=" ? "<>" : two), start, 0, 0.0};
    }
    char c = text_[pos_];
    static const std::string singles = "(),.+-*/=<>;";
    if (singles.find(c) == std::string::npos) {
      throw ParseError(std::string("unexpected character '") + c + "'", start, "token");
    }
    ++pos_;
    return {TokenKind::Punct, std::string(1, c), start, 0, 0.0};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view sql) : tokens_(Lexer(sql).run()) {}

  SelectStmt run() {
    SelectStmt stmt = parse_statement();
    if (accept_punct(";")) {
      // trailing semicolon tolerated
    }
    if (!at_end()) {
      throw ParseError("trailing input after statement", peek().offset, "end of input");
    }
    return stmt;
  }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  bool at_end() const { return peek().kind == TokenKind::End; }

  const Token& advance() { return tokens_[pos_++]; }

  bool peek_keyword(const std::string& word, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Ident && t.text == word;
  }

  bool accept_keyword(const std::string& word) {
    if (peek_keyword(word)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_keyword(const std::string& word) {
    if (!accept_keyword(word)) {
      throw ParseError("expected " + upper(word), peek().offset, upper(word));
    }
  }

  bool peek_punct(const std::string& p) const {
    return peek().kind == TokenKind::Punct && peek().text == p;
  }

  bool accept_punct(const std::string& p) {
    if (peek_punct(p)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_punct(const std::string& p) {
    if (!accept_punct(p)) {
      throw ParseError("expected '" + p + "'", peek().offset, p);
    }
  }

  static std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }

  std::string expect_identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != TokenKind::Ident || reserved_words().count(t.text)) {
      throw ParseError(std::string("expected ") + what, t.offset, what);
    }
    ++pos_;
    return t.text;
  }

  // --- statements ----------------------------------------------------------

  SelectStmt parse_statement() {
    SelectStmt stmt;
    stmt.cores.push_back(parse_core(&stmt));
    while (peek_keyword("union")) {
      advance();
      bool all = accept_keyword("all");
      stmt.union_all.push_back(all);
      stmt.cores.push_back(parse_core(nullptr));
    }
    if (accept_keyword("order")) {
      expect_keyword("by");
      do {
        OrderKey key;
        key.expr = parse_expr();
        if (accept_keyword("desc")) {
          key.descending = true;
        } else {
          accept_keyword("asc");
        }
        stmt.order_by.push_back(std::move(key));
      } while (accept_punct(","));
    }
    if (peek_keyword("limit")) {
      std::size_t offset = peek().offset;
      advance();
      if (stmt.limit) {
        throw ParseError("duplicate row limit", offset, "end of input");
      }
      stmt.limit = expect_limit_count();
    }
    check_union_arity(stmt);
    return stmt;
  }

  std::int64_t expect_limit_count() {
    const Token& t = peek();
    if (t.kind != TokenKind::Integer || t.int_value < 0) {
      throw ParseError("expected a non-negative integer row count", t.offset, "integer");
    }
    ++pos_;
    return t.int_value;
  }

  void check_union_arity(const SelectStmt& stmt) {
    if (stmt.cores.size() < 2) return;
    // Arity is only statically known when no arm projects *.
    std::size_t arity = 0;
    bool known = true;
    for (const SelectCore& core : stmt.cores) {
      for (const SelectItem& item : core.items) {
        if (item.star) known = false;
      }
    }
    if (!known) return;
    arity = stmt.cores.front().items.size();
    for (const SelectCore& core : stmt.cores) {
      if (core.items.size() != arity) {
        throw ParseError("union arms project different column counts", 0, "matching arity");
      }
    }
  }

  SelectCore parse_core(SelectStmt* top) {
    expect_keyword("select");
    SelectCore core;
    core.distinct = accept_keyword("distinct");
    if (peek_keyword("top")) {
      std::size_t offset = peek().offset;
      advance();
      std::int64_t n = expect_limit_count();
      if (!top) {
        throw ParseError("TOP is only supported on the first select", offset, "select item");
      }
      top->limit = n;
    }
    do {
      core.items.push_back(parse_select_item());
    } while (accept_punct(","));
    if (accept_keyword("from")) {
      do {
        core.from.push_back(parse_from_item());
      } while (accept_punct(","));
    }
    if (accept_keyword("where")) {
      core.where = parse_expr();
    }
    if (accept_keyword("group")) {
      expect_keyword("by");
      do {
        core.group_by.push_back(parse_expr());
      } while (accept_punct(","));
    }
    if (accept_keyword("having")) {
      core.having = parse_expr();
    }
    return core;
  }

  SelectItem parse_select_item() {
    SelectItem item;
    if (accept_punct("*")) {
      item.star = true;
      return item;
    }
    item.expr = parse_expr();
    if (accept_keyword("as")) {
      item.alias = expect_identifier("alias");
    } else if (peek().kind == TokenKind::Ident && !reserved_words().count(peek().text)) {
      item.alias = advance().text;
    }
    return item;
  }

  TableSource parse_table_source() {
    TableSource source;
    if (accept_punct("(")) {
      source.derived = std::make_shared<const SelectStmt>(parse_statement());
      expect_punct(")");
      accept_keyword("as");
      source.alias = expect_identifier("derived table alias");
      return source;
    }
    source.table = expect_identifier("table name");
    if (accept_keyword("as")) {
      source.alias = expect_identifier("alias");
    } else if (peek().kind == TokenKind::Ident && !reserved_words().count(peek().text)) {
      source.alias = advance().text;
    }
    return source;
  }

  FromItem parse_from_item() {
    FromItem item;
    item.first = parse_table_source();
    while (true) {
      JoinClause join;
      if (accept_keyword("inner")) {
        join.kind = JoinKind::Inner;
        expect_keyword("join");
      } else if (accept_keyword("left")) {
        accept_keyword("outer");
        join.kind = JoinKind::Left;
        expect_keyword("join");
      } else if (accept_keyword("join")) {
        join.kind = JoinKind::Inner;
      } else {
        break;
      }
      join.source = parse_table_source();
      expect_keyword("on");
      join.on = parse_expr();
      item.joins.push_back(std::move(join));
    }
    return item;
  }

  // --- expressions ---------------------------------------------------------

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (accept_keyword("or")) {
      ExprPtr rhs = parse_and();
      lhs = make_expr<Logic>(LogicOp::Or, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (accept_keyword("and")) {
      ExprPtr rhs = parse_not();
      lhs = make_expr<Logic>(LogicOp::And, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (accept_keyword("not")) {
      if (peek_keyword("exists")) {
        ExprPtr inner = parse_not();
        Exists exists = std::get<Exists>(inner->node);
        exists.negated = !exists.negated;
        return std::make_shared<const Expr>(Expr{std::move(exists)});
      }
      return make_expr<Not>(parse_not());
    }
    return parse_predicate();
  }

  ExprPtr parse_predicate() {
    ExprPtr lhs = parse_additive();
    static const std::vector<std::pair<std::string, CompareOp>> ops = {
        {"=", CompareOp::Eq},  {"<>", CompareOp::Ne}, {"<=", CompareOp::Le},
        {">=", CompareOp::Ge}, {"<", CompareOp::Lt},  {">", CompareOp::Gt}};
    for (const auto& [text, op] : ops) {
      if (accept_punct(text)) {
        return make_expr<Compare>(op, std::move(lhs), parse_additive());
      }
    }
    if (accept_keyword("is")) {
      bool negated = accept_keyword("not");
      expect_keyword("null");
      return make_expr<IsNull>(std::move(lhs), negated);
    }
    bool negated = false;
    if (peek_keyword("not") && (peek_keyword("like", 1) || peek_keyword("in", 1))) {
      advance();
      negated = true;
    }
    if (accept_keyword("like")) {
      return make_expr<Like>(std::move(lhs), parse_additive(), negated);
    }
    if (accept_keyword("in")) {
      expect_punct("(");
      if (peek_keyword("select")) {
        auto subquery = std::make_shared<const SelectStmt>(parse_statement());
        expect_punct(")");
        return make_expr<InSubquery>(std::move(lhs), std::move(subquery), negated);
      }
      std::vector<ExprPtr> items;
      do {
        items.push_back(parse_expr());
      } while (accept_punct(","));
      expect_punct(")");
      return make_expr<InList>(std::move(lhs), std::move(items), negated);
    }
    if (negated) {
      throw ParseError("expected LIKE or IN after NOT", peek().offset, "LIKE or IN");
    }
    return lhs;
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    while (true) {
      if (accept_punct("+")) {
        lhs = make_expr<Binary>(BinaryOp::Add, std::move(lhs), parse_multiplicative());
      } else if (accept_punct("-")) {
        lhs = make_expr<Binary>(BinaryOp::Sub, std::move(lhs), parse_multiplicative());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_unary();
    while (true) {
      if (accept_punct("*")) {
        lhs = make_expr<Binary>(BinaryOp::Mul, std::move(lhs), parse_unary());
      } else if (accept_punct("/")) {
        lhs = make_expr<Binary>(BinaryOp::Div, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept_punct("-")) {
      return make_expr<Negate>(parse_unary());
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Integer:
        ++pos_;
        return make_expr<Literal>(Value::integer(t.int_value));
      case TokenKind::Float:
        ++pos_;
        return make_expr<Literal>(Value::real(t.float_value));
      case TokenKind::String:
        ++pos_;
        return make_expr<Literal>(Value::text(t.text));
      case TokenKind::Punct:
        if (t.text == "(") {
          ++pos_;
          if (peek_keyword("select")) {
            auto subquery = std::make_shared<const SelectStmt>(parse_statement());
            expect_punct(")");
            return make_expr<ScalarSubquery>(std::move(subquery));
          }
          ExprPtr inner = parse_expr();
          expect_punct(")");
          return inner;
        }
        break;
      case TokenKind::Ident:
        return parse_ident_expr();
      case TokenKind::End:
        break;
    }
    throw ParseError("expected an expression", t.offset, "expression");
  }

  ExprPtr parse_ident_expr() {
    const Token& t = peek();
    if (t.text == "null") {
      ++pos_;
      return make_expr<Literal>(Value::null());
    }
    if (t.text == "true" || t.text == "false") {
      ++pos_;
      return make_expr<Literal>(Value::boolean(t.text == "true"));
    }
    if (t.text == "case") {
      return parse_case();
    }
    if (t.text == "exists") {
      ++pos_;
      expect_punct("(");
      auto subquery = std::make_shared<const SelectStmt>(parse_statement());
      expect_punct(")");
      return make_expr<Exists>(std::move(subquery), false);
    }
    if (t.text == "cast") {
      return parse_cast();
    }
    if (peek(1).kind == TokenKind::Punct && peek(1).text == "(" && !reserved_words().count(t.text)) {
      return parse_function_call();
    }
    if (reserved_words().count(t.text)) {
      throw ParseError("expected an expression", t.offset, "expression");
    }
    ++pos_;
    std::string first = t.text;
    if (accept_punct(".")) {
      std::string column = expect_identifier("column name");
      return make_expr<ColumnRef>(std::move(first), std::move(column));
    }
    return make_expr<ColumnRef>(std::string(), std::move(first));
  }

  ExprPtr parse_case() {
    expect_keyword("case");
    CaseWhen node;
    ExprPtr subject;  // simple CASE desugars to searched CASE
    if (!peek_keyword("when")) {
      subject = parse_expr();
    }
    if (!peek_keyword("when")) {
      throw ParseError("expected WHEN in CASE expression", peek().offset, "WHEN");
    }
    while (accept_keyword("when")) {
      ExprPtr condition = parse_expr();
      if (subject) {
        condition = make_expr<Compare>(CompareOp::Eq, subject, std::move(condition));
      }
      expect_keyword("then");
      ExprPtr result = parse_expr();
      node.branches.emplace_back(std::move(condition), std::move(result));
    }
    if (accept_keyword("else")) {
      node.else_expr = parse_expr();
    }
    expect_keyword("end");
    return std::make_shared<const Expr>(Expr{std::move(node)});
  }

  ExprPtr parse_cast() {
    std::size_t offset = peek().offset;
    expect_keyword("cast");
    expect_punct("(");
    FuncCall call;
    call.kind = FuncKind::Cast;
    call.args.push_back(parse_expr());
    expect_keyword("as");
    const Token& name = peek();
    std::string type_name = name.kind == TokenKind::Ident ? name.text : "";
    if (type_name == "integer") type_name = "int";
    auto type = column_type_from_string(type_name);
    if (!type) {
      throw ParseError("expected a type name (INT, FLOAT, TEXT, DATE, BOOL)", name.offset, "type");
    }
    ++pos_;
    call.cast_type = *type;
    expect_punct(")");
    (void)offset;
    return std::make_shared<const Expr>(Expr{std::move(call)});
  }

  ExprPtr parse_function_call() {
    const Token& name = peek();
    static const std::vector<std::pair<std::string, FuncKind>> functions = {
        {"count", FuncKind::Count},   {"sum", FuncKind::Sum},
        {"avg", FuncKind::Avg},       {"min", FuncKind::Min},
        {"max", FuncKind::Max},       {"lower", FuncKind::Lower},
        {"upper", FuncKind::Upper},   {"length", FuncKind::Length},
        {"char_length", FuncKind::CharLength},
        {"substring", FuncKind::Substring}};
    FuncCall call;
    bool known = false;
    for (const auto& [text, kind] : functions) {
      if (name.text == text) {
        call.kind = kind;
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unknown function '" + name.text + "'", name.offset, "function name");
    }
    ++pos_;
    expect_punct("(");
    if (call.kind == FuncKind::Count && accept_punct("*")) {
      call.star = true;
      expect_punct(")");
      return std::make_shared<const Expr>(Expr{std::move(call)});
    }
    if (!peek_punct(")")) {
      do {
        call.args.push_back(parse_expr());
      } while (accept_punct(","));
    }
    expect_punct(")");
    validate_arity(call, name.offset);
    return std::make_shared<const Expr>(Expr{std::move(call)});
  }

  void validate_arity(const FuncCall& call, std::size_t offset) {
    std::size_t n = call.args.size();
    switch (call.kind) {
      case FuncKind::Count:
      case FuncKind::Sum:
      case FuncKind::Avg:
      case FuncKind::Min:
      case FuncKind::Max:
      case FuncKind::Lower:
      case FuncKind::Upper:
      case FuncKind::Length:
      case FuncKind::CharLength:
        if (n != 1) {
          throw ParseError(std::string(to_string(call.kind)) + " takes one argument", offset,
                           "one argument");
        }
        return;
      case FuncKind::Substring:
        if (n != 2 && n != 3) {
          throw ParseError("SUBSTRING takes two or three arguments", offset, "2-3 arguments");
        }
        return;
      case FuncKind::Cast:
        return;
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

SelectStmt parse(std::string_view sql) { return Parser(sql).run(); }

bool parsable(std::string_view sql) {
  try {
    parse(sql);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace sqleq
