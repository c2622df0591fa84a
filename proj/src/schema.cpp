#include "sqleq/schema.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "sqleq/errors.hpp"

namespace sqleq {

using nlohmann::ordered_json;

const ColumnDef* TableDef::find_column(const std::string& column) const {
  for (const ColumnDef& def : columns) {
    if (def.name == column) return &def;
  }
  return nullptr;
}

std::size_t TableDef::column_index(const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return i;
  }
  throw ExecError(ExecErrorKind::UnknownColumn, name + "." + column);
}

const TableDef* Schema::find_table(const std::string& table) const {
  for (const TableDef& def : tables) {
    if (def.name == table) return &def;
  }
  return nullptr;
}

void Schema::validate() const {
  std::set<std::string> table_names;
  for (const TableDef& table : tables) {
    if (!table_names.insert(table.name).second) {
      throw InputFormatError("schema", 1, "duplicate table name: " + table.name);
    }
    std::set<std::string> column_names;
    for (const ColumnDef& column : table.columns) {
      if (!column_names.insert(column.name).second) {
        throw InputFormatError("schema", 1,
                               "duplicate column " + table.name + "." + column.name);
      }
    }
    if (table.primary_key && !table.find_column(*table.primary_key)) {
      throw InputFormatError("schema", 1,
                             "primary key references unknown column " + *table.primary_key);
    }
    for (const ForeignKey& fk : table.foreign_keys) {
      if (!table.find_column(fk.column)) {
        throw InputFormatError("schema", 1, "foreign key on unknown column " + fk.column);
      }
      const TableDef* parent = find_table(fk.ref_table);
      if (!parent || !parent->find_column(fk.ref_column)) {
        throw InputFormatError("schema", 1,
                               "foreign key references unknown " + fk.ref_table + "." +
                                   fk.ref_column);
      }
    }
  }
  topological_order();
}

std::vector<const TableDef*> Schema::topological_order() const {
  std::vector<const TableDef*> order;
  std::set<std::string> placed;
  bool progress = true;
  while (order.size() < tables.size() && progress) {
    progress = false;
    for (const TableDef& table : tables) {
      if (placed.count(table.name)) continue;
      bool ready = true;
      for (const ForeignKey& fk : table.foreign_keys) {
        if (fk.ref_table != table.name && !placed.count(fk.ref_table)) ready = false;
      }
      if (ready) {
        order.push_back(&table);
        placed.insert(table.name);
        progress = true;
      }
    }
  }
  if (order.size() < tables.size()) {
    throw InputFormatError("schema", 1, "foreign keys form a reference cycle");
  }
  return order;
}

namespace {

ordered_json schema_to_json_object(const Schema& schema) {
  ordered_json tables = ordered_json::array();
  for (const TableDef& table : schema.tables) {
    ordered_json columns = ordered_json::array();
    for (const ColumnDef& column : table.columns) {
      columns.push_back({{"name", column.name}, {"type", to_string(column.type)}});
    }
    ordered_json entry;
    entry["name"] = table.name;
    entry["columns"] = columns;
    if (table.primary_key) entry["primary_key"] = *table.primary_key;
    if (!table.foreign_keys.empty()) {
      ordered_json fks = ordered_json::array();
      for (const ForeignKey& fk : table.foreign_keys) {
        fks.push_back({{"column", fk.column}, {"ref_table", fk.ref_table},
                       {"ref_column", fk.ref_column}});
      }
      entry["foreign_keys"] = fks;
    }
    tables.push_back(std::move(entry));
  }
  return ordered_json{{"tables", std::move(tables)}};
}

ordered_json value_to_json(const Value& value) {
  if (value.is_null()) return nullptr;
  if (value.is_int()) return value.as_int();
  if (value.is_float()) return value.as_float();
  if (value.is_text()) return value.as_text();
  if (value.is_date()) return value.as_date().iso();
  return value.as_bool();
}

}  // namespace

std::string Schema::to_json() const { return schema_to_json_object(*this).dump(); }

Schema Schema::from_json(const std::string& text) {
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& error) {
    throw InputFormatError("schema", 1, std::string("invalid JSON: ") + error.what());
  }
  return [&parsed] {
    Schema schema;
    if (!parsed.is_object() || !parsed.contains("tables") || !parsed["tables"].is_array()) {
      throw InputFormatError("schema", 1, "expected an object with a tables array");
    }
    for (const auto& table_json : parsed["tables"]) {
      TableDef table;
      if (!table_json.contains("name") || !table_json.contains("columns")) {
        throw InputFormatError("schema", 1, "table entries need name and columns");
      }
      table.name = table_json["name"].get<std::string>();
      for (const auto& column_json : table_json["columns"]) {
        ColumnDef column;
        column.name = column_json.at("name").get<std::string>();
        auto type = column_type_from_string(column_json.at("type").get<std::string>());
        if (!type) {
          throw InputFormatError("schema", 1,
                                 "unknown column type " +
                                     column_json.at("type").get<std::string>());
        }
        column.type = *type;
        table.columns.push_back(std::move(column));
      }
      if (table_json.contains("primary_key")) {
        table.primary_key = table_json["primary_key"].get<std::string>();
      }
      if (table_json.contains("foreign_keys")) {
        for (const auto& fk_json : table_json["foreign_keys"]) {
          table.foreign_keys.push_back({fk_json.at("column").get<std::string>(),
                                        fk_json.at("ref_table").get<std::string>(),
                                        fk_json.at("ref_column").get<std::string>()});
        }
      }
      schema.tables.push_back(std::move(table));
    }
    schema.validate();
    return schema;
  }();
}

void DatabaseInstance::validate() const {
  schema.validate();
  for (const TableDef& table : schema.tables) {
    auto it = data.find(table.name);
    if (it == data.end()) {
      throw InputFormatError("instance", 1, "missing data for table " + table.name);
    }
    std::vector<Row> pk_seen;
    for (const Row& row : it->second) {
      if (row.size() != table.columns.size()) {
        throw InputFormatError("instance", 1, "row arity mismatch in " + table.name);
      }
      for (std::size_t i = 0; i < row.size(); ++i) {
        const Value& value = row[i];
        if (value.is_null()) continue;
        bool ok = false;
        switch (table.columns[i].type) {
          case ColumnType::Int: ok = value.is_int(); break;
          case ColumnType::Float: ok = value.is_numeric(); break;
          case ColumnType::Text: ok = value.is_text(); break;
          case ColumnType::Date: ok = value.is_date(); break;
          case ColumnType::Bool: ok = value.is_bool(); break;
        }
        if (!ok) {
          throw InputFormatError("instance", 1,
                                 "value type mismatch in " + table.name + "." +
                                     table.columns[i].name);
        }
      }
    }
    if (table.primary_key) {
      std::size_t pk = table.column_index(*table.primary_key);
      for (std::size_t a = 0; a < it->second.size(); ++a) {
        if (it->second[a][pk].is_null()) {
          throw InputFormatError("instance", 1, "NULL primary key in " + table.name);
        }
        for (std::size_t b = a + 1; b < it->second.size(); ++b) {
          if (same_value(it->second[a][pk], it->second[b][pk])) {
            throw InputFormatError("instance", 1, "duplicate primary key in " + table.name);
          }
        }
      }
    }
    for (const ForeignKey& fk : table.foreign_keys) {
      std::size_t child_col = table.column_index(fk.column);
      const TableDef* parent = schema.find_table(fk.ref_table);
      std::size_t parent_col = parent->column_index(fk.ref_column);
      const std::vector<Row>& parent_rows = data.at(fk.ref_table);
      for (const Row& row : it->second) {
        if (row[child_col].is_null()) continue;
        bool found = false;
        for (const Row& parent_row : parent_rows) {
          if (same_value(parent_row[parent_col], row[child_col])) {
            found = true;
            break;
          }
        }
        if (!found) {
          throw InputFormatError("instance", 1,
                                 "dangling foreign key " + table.name + "." + fk.column);
        }
      }
    }
  }
}

std::string DatabaseInstance::to_json() const {
  ordered_json out;
  out["seed"] = seed;
  out["schema"] = schema_to_json_object(schema);
  ordered_json tables;
  for (const TableDef& table : schema.tables) {
    ordered_json rows = ordered_json::array();
    auto it = data.find(table.name);
    if (it != data.end()) {
      for (const Row& row : it->second) {
        ordered_json values = ordered_json::array();
        for (const Value& value : row) values.push_back(value_to_json(value));
        rows.push_back(std::move(values));
      }
    }
    tables[table.name] = std::move(rows);
  }
  out["tables"] = std::move(tables);
  return out.dump();
}

std::string ResultTable::to_json() const {
  ordered_json out;
  out["columns"] = columns;
  ordered_json rows_json = ordered_json::array();
  for (const Row& row : rows) {
    ordered_json values = ordered_json::array();
    for (const Value& value : row) values.push_back(value_to_json(value));
    rows_json.push_back(std::move(values));
  }
  out["rows"] = std::move(rows_json);
  out["ordered"] = ordered;
  if (ordered) out["tie_group_sizes"] = tie_group_sizes;
  return out.dump();
}

}  // namespace sqleq
