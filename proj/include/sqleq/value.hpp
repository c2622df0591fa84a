#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sqleq {

enum class ColumnType { Int, Float, Text, Date, Bool };

const char* to_string(ColumnType type);
std::optional<ColumnType> column_type_from_string(std::string_view name);

// Calendar date held as a validated ISO string "YYYY-MM-DD".
class Date {
 public:
  Date() = default;

  // Accepts YYYY-MM-DD, YYYY/MM/DD and YYYY.MM.DD with range-checked fields.
  static std::optional<Date> parse(std::string_view text);

  const std::string& iso() const { return iso_; }
  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(std::string iso) : iso_(std::move(iso)) {}
  std::string iso_;
};

// A single SQL value: NULL, integer, float, text, date or boolean.
class Value {
 public:
  Value() = default;  // NULL

  static Value null() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Rep(v)); }
  static Value real(double v) { return Value(Rep(v)); }
  static Value text(std::string v) { return Value(Rep(std::move(v))); }
  static Value date(Date v) { return Value(Rep(std::move(v))); }
  static Value boolean(bool v) { return Value(Rep(v)); }

  bool is_null() const { return std::holds_alternative<std::monostate>(rep_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(rep_); }
  bool is_float() const { return std::holds_alternative<double>(rep_); }
  bool is_numeric() const { return is_int() || is_float(); }
  bool is_text() const { return std::holds_alternative<std::string>(rep_); }
  bool is_date() const { return std::holds_alternative<Date>(rep_); }
  bool is_bool() const { return std::holds_alternative<bool>(rep_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(rep_); }
  double as_float() const { return std::get<double>(rep_); }
  const std::string& as_text() const { return std::get<std::string>(rep_); }
  const Date& as_date() const { return std::get<Date>(rep_); }
  bool as_bool() const { return std::get<bool>(rep_); }

  // Numeric view: ints widen to double.
  double numeric() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }

  // Three-valued SQL comparison: nullopt when either side is NULL.
  // Throws ExecError(TypeMismatch) for incomparable types; text coerces to
  // date when compared against a date.
  std::optional<int> compare(const Value& other) const;

  // Equality used for GROUP BY / DISTINCT / result bags: NULLs are equal to
  // each other and 1 == 1.0.
  friend bool same_value(const Value& a, const Value& b);

  // Total deterministic ordering used to sort rows for multiset comparison:
  // NULL first, then bool, numeric, text, date.
  friend int order_value(const Value& a, const Value& b);

  // Human/JSON-facing rendering; NULL renders as "NULL".
  std::string to_text() const;

 private:
  using Rep = std::variant<std::monostate, std::int64_t, double, std::string, Date, bool>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

// Shortest round-trip formatting for doubles; always contains '.' or 'e'.
std::string format_double(double v);

}  // namespace sqleq
