#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqleq/value.hpp"

namespace sqleq {

struct ColumnDef {
  std::string name;
  ColumnType type = ColumnType::Int;
};

struct ForeignKey {
  std::string column;
  std::string ref_table;
  std::string ref_column;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::optional<std::string> primary_key;
  std::vector<ForeignKey> foreign_keys;

  const ColumnDef* find_column(const std::string& column) const;
  std::size_t column_index(const std::string& column) const;  // throws ExecError
};

struct Schema {
  std::vector<TableDef> tables;

  const TableDef* find_table(const std::string& table) const;

  // Checks that primary keys and foreign keys reference declared columns and
  // that names are unique; throws InputFormatError on violations.
  void validate() const;

  // Tables reordered so foreign keys always point at earlier tables; throws
  // InputFormatError on reference cycles.
  std::vector<const TableDef*> topological_order() const;

  std::string to_json() const;
  static Schema from_json(const std::string& text);
};

using Row = std::vector<Value>;

struct DatabaseInstance {
  Schema schema;
  std::map<std::string, std::vector<Row>> data;
  std::int64_t seed = 0;

  // Checks arity, column types, primary-key uniqueness and foreign-key
  // referential integrity; throws InputFormatError on violations.
  void validate() const;

  std::string to_json() const;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<Row> rows;
  bool ordered = false;
  // Sizes of consecutive runs of rows whose ORDER BY keys tie; only
  // meaningful when ordered is true. Sums to rows.size().
  std::vector<std::size_t> tie_group_sizes;

  std::string to_json() const;
};

}  // namespace sqleq
