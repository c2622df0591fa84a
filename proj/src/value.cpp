#include "sqleq/value.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "sqleq/errors.hpp"

namespace sqleq {

const char* to_string(ColumnType type) {
  switch (type) {
    case ColumnType::Int: return "int";
    case ColumnType::Float: return "float";
    case ColumnType::Text: return "text";
    case ColumnType::Date: return "date";
    case ColumnType::Bool: return "bool";
  }
  return "?";
}

std::optional<ColumnType> column_type_from_string(std::string_view name) {
  if (name == "int") return ColumnType::Int;
  if (name == "float") return ColumnType::Float;
  if (name == "text") return ColumnType::Text;
  if (name == "date") return ColumnType::Date;
  if (name == "bool") return ColumnType::Bool;
  return std::nullopt;
}

const char* to_string(ExecErrorKind kind) {
  switch (kind) {
    case ExecErrorKind::UnknownTable: return "unknown table";
    case ExecErrorKind::UnknownColumn: return "unknown column";
    case ExecErrorKind::AmbiguousColumn: return "ambiguous column";
    case ExecErrorKind::TypeMismatch: return "type mismatch";
    case ExecErrorKind::ScalarSubqueryCardinality: return "scalar subquery cardinality";
    case ExecErrorKind::AggregateMisuse: return "aggregate misuse";
    case ExecErrorKind::UngroupedColumn: return "ungrouped column";
    case ExecErrorKind::DivisionByZero: return "division by zero";
    case ExecErrorKind::UnionMismatch: return "union mismatch";
  }
  return "?";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

int days_in_month(int year, int month) {
  static const std::array<int, 12> days = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return days[month - 1];
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10) return std::nullopt;
  char sep = text[4];
  if ((sep != '-' && sep != '/' && sep != '.') || text[7] != sep) return std::nullopt;
  std::string_view ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) return std::nullopt;
  int year = (ys[0] - '0') * 1000 + (ys[1] - '0') * 100 + (ys[2] - '0') * 10 + (ys[3] - '0');
  int month = (ms[0] - '0') * 10 + (ms[1] - '0');
  int day = (ds[0] - '0') * 10 + (ds[1] - '0');
  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
  std::string iso(text);
  iso[4] = '-';
  iso[7] = '-';
  return Date(std::move(iso));
}

namespace {

// Comparable numeric/text/date/bool rank used by compare() after coercion.
std::optional<int> compare_same_kind(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric()) {
    double x = a.numeric(), y = b.numeric();
    if (x < y) return -1;
    if (x > y) return 1;
    return 0;
  }
  if (a.is_text() && b.is_text()) return a.as_text().compare(b.as_text()) < 0 ? -1 : (a.as_text() == b.as_text() ? 0 : 1);
  if (a.is_date() && b.is_date()) return a.as_date().iso().compare(b.as_date().iso()) < 0 ? -1 : (a.as_date() == b.as_date() ? 0 : 1);
  if (a.is_bool() && b.is_bool()) return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
  return std::nullopt;
}

Value coerce_text_to_date(const Value& v) {
  auto date = Date::parse(v.as_text());
  if (!date) {
    throw ExecError(ExecErrorKind::TypeMismatch,
                    "cannot interpret '" + v.as_text() + "' as a date");
  }
  return Value::date(*date);
}

}  // namespace

std::optional<int> Value::compare(const Value& other) const {
  if (is_null() || other.is_null()) return std::nullopt;
  if (is_date() && other.is_text()) return compare_same_kind(*this, coerce_text_to_date(other));
  if (is_text() && other.is_date()) return compare_same_kind(coerce_text_to_date(*this), other);
  auto result = compare_same_kind(*this, other);
  if (!result) {
    throw ExecError(ExecErrorKind::TypeMismatch,
                    "cannot compare " + to_text() + " with " + other.to_text());
  }
  return result;
}

bool same_value(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
  if (a.is_numeric() && b.is_numeric()) return a.numeric() == b.numeric();
  if (a.is_text() && b.is_text()) return a.as_text() == b.as_text();
  if (a.is_date() && b.is_date()) return a.as_date() == b.as_date();
  if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
  return false;
}

namespace {

int type_rank(const Value& v) {
  if (v.is_null()) return 0;
  if (v.is_bool()) return 1;
  if (v.is_numeric()) return 2;
  if (v.is_text()) return 3;
  return 4;  // date
}

}  // namespace

int order_value(const Value& a, const Value& b) {
  int ra = type_rank(a), rb = type_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) return 0;
  if (ra == 1) return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
  if (ra == 2) {
    double x = a.numeric(), y = b.numeric();
    if (x < y) return -1;
    if (x > y) return 1;
    // Keep int/float distinction stable so sorting is deterministic.
    return static_cast<int>(a.is_float()) - static_cast<int>(b.is_float());
  }
  if (ra == 3) {
    int c = a.as_text().compare(b.as_text());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  int c = a.as_date().iso().compare(b.as_date().iso());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  std::string s(buf, end);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string Value::to_text() const {
  if (is_null()) return "NULL";
  if (is_int()) return std::to_string(as_int());
  if (is_float()) return format_double(as_float());
  if (is_text()) return as_text();
  if (is_date()) return as_date().iso();
  return as_bool() ? "TRUE" : "FALSE";
}

}  // namespace sqleq
