#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqleq {

// Raised by the lexer/parser; offset is a byte position into the input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset, std::string expected)
      : std::runtime_error(message + " at offset " + std::to_string(offset)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

enum class ExecErrorKind {
  UnknownTable,
  UnknownColumn,
  AmbiguousColumn,
  TypeMismatch,
  ScalarSubqueryCardinality,
  AggregateMisuse,
  UngroupedColumn,
  DivisionByZero,
  UnionMismatch,
};

const char* to_string(ExecErrorKind kind);

// Raised while executing a statement against a database instance.
class ExecError : public std::runtime_error {
 public:
  ExecError(ExecErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ExecErrorKind kind() const { return kind_; }

 private:
  ExecErrorKind kind_;
};

// Raised by the rewriter when a subquery pattern falls outside the rule set.
class UnsupportedSubquery : public std::runtime_error {
 public:
  explicit UnsupportedSubquery(const std::string& site)
      : std::runtime_error("unsupported subquery: " + site), site_(site) {}

  const std::string& site() const { return site_; }

 private:
  std::string site_;
};

// Raised when a prompt template requires a slot the request did not provide.
class MissingSlot : public std::runtime_error {
 public:
  explicit MissingSlot(const std::string& slot)
      : std::runtime_error("missing prompt slot: " + slot), slot_(slot) {}

  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

// Raised after the provider retry budget is exhausted.
class ProviderError : public std::runtime_error {
 public:
  explicit ProviderError(const std::string& message)
      : std::runtime_error("provider error: " + message) {}
};

// Raised for malformed dataset / pair / config input files; line is 1-based.
class InputFormatError : public std::runtime_error {
 public:
  InputFormatError(const std::string& file, std::size_t line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised when metrics are requested for a record lacking a gold label.
class MissingGoldLabel : public std::runtime_error {
 public:
  explicit MissingGoldLabel(const std::string& pair_id)
      : std::runtime_error("missing gold label for pair: " + pair_id) {}
};

// Raised when the dataset generator cannot produce a verified pair in budget.
class GenerationExhausted : public std::runtime_error {
 public:
  GenerationExhausted(const std::string& category, int attempts)
      : std::runtime_error("could not generate a verified pair for category " + category +
                           " in " + std::to_string(attempts) + " attempts") {}
};

// Raised when a shipped fixture file is malformed or internally inconsistent.
class FixtureCorrupt : public std::runtime_error {
 public:
  FixtureCorrupt(const std::string& file, std::size_t line, const std::string& message)
      : std::runtime_error("fixture " + file + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sqleq
