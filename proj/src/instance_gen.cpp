#include "sqleq/instance_gen.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "sqleq/errors.hpp"

namespace sqleq {

namespace {

// splitmix64: decorrelates nearby seeds before feeding the engine.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Bounded draw from raw engine words; implementation-defined distributions
// from <random> are avoided so output is identical across standard libraries.
std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

bool chance(std::mt19937_64& rng, double p) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

const std::vector<std::string>& text_pool(const std::string& column_name) {
  // Pools are keyed by lowercased column name so that schemas written in
  // CamelCase (e.g. "Department") draw the same values.
  std::string column;
  column.reserve(column_name.size());
  for (char c : column_name) {
    column.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  static const std::vector<std::vector<std::string>> named = {
      {"Sales", "Engineering", "HR", "Marketing"},        // 0 department/dname
      {"Widget", "Gadget", "Sprocket", "Caf\xc3\xa9 Latte"},  // 1 product_name
      {"Electronics", "Books", "Toys", "Garden"},         // 2 category
      {"Acme Corp", "Globex", "Initech", "Umbrella"},     // 3 customer_name
      {"Paris", "London", "Tokyo", "Oslo"},               // 4 city
      {"shipped", "pending", "returned", "paid"},         // 5 status
      {"Engineer", "Manager", "Analyst", "Clerk"},        // 6 job_title
      {"Alice", "Bob", "Carol", "Dave"},                  // 7 name
      {"Algebra", "Biology", "Chemistry", "Drama"},       // 8 course
      {"Physics", "History", "Music", "Economics"},       // 9 major
      {"Ann Lee", "Ben Ray", "Cara Fox", "Dan Poe"},      // 10 student_name
      {"North", "South", "East", "West"},                 // 11 region
  };
  if (column == "department" || column == "dname" || column == "dept") return named[0];
  if (column == "product_name") return named[1];
  if (column == "category") return named[2];
  if (column == "customer_name") return named[3];
  if (column == "city") return named[4];
  if (column == "status") return named[5];
  if (column == "job_title") return named[6];
  if (column == "name") return named[7];
  if (column == "course") return named[8];
  if (column == "major") return named[9];
  if (column == "student_name") return named[10];
  if (column == "region") return named[11];
  return named[fnv1a(column) % named.size()];
}

const std::vector<double>& float_pool() {
  static const std::vector<double> pool = {0.0, 10.0, 50.0, 99.5, 100.0, 150.0};
  return pool;
}

const std::vector<std::string>& date_pool() {
  static const std::vector<std::string> pool = {
      "2024-01-05", "2024-02-14", "2024-03-21", "2024-04-02",
      "2024-06-15", "2024-08-01", "2024-10-31", "2024-12-25"};
  return pool;
}

Value pool_value(std::mt19937_64& rng, const std::string& column, ColumnType type) {
  switch (type) {
    case ColumnType::Int:
      if (column == "active") return Value::integer(static_cast<std::int64_t>(pick(rng, 2)));
      return Value::integer(static_cast<std::int64_t>(pick(rng, 10)));
    case ColumnType::Float: {
      const auto& pool = float_pool();
      return Value::real(pool[pick(rng, pool.size())]);
    }
    case ColumnType::Text: {
      const auto& pool = text_pool(column);
      return Value::text(pool[pick(rng, pool.size())]);
    }
    case ColumnType::Date: {
      const auto& pool = date_pool();
      return Value::date(*Date::parse(pool[pick(rng, pool.size())]));
    }
    case ColumnType::Bool:
      return Value::boolean(pick(rng, 2) == 1);
  }
  return Value::null();
}

// A fresh primary-key value not present in `used`.
Value fresh_pk(std::mt19937_64& rng, const std::string& column, ColumnType type,
               const std::vector<Value>& used, std::size_t ordinal) {
  auto taken = [&](const Value& v) {
    for (const Value& u : used) {
      if (same_value(u, v)) return true;
    }
    return false;
  };
  if (type == ColumnType::Int) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Value v = Value::integer(static_cast<std::int64_t>(pick(rng, 100) + 1));
      if (!taken(v)) return v;
    }
    std::int64_t next = 1;
    while (taken(Value::integer(next))) ++next;
    return Value::integer(next);
  }
  if (type == ColumnType::Text) {
    const auto& pool = text_pool(column);
    // Prefer bare pool words so predicates over the pool still hit PK columns.
    for (std::size_t i = 0; i < pool.size(); ++i) {
      Value v = Value::text(pool[pick(rng, pool.size())]);
      if (!taken(v)) return v;
    }
    for (std::size_t suffix = ordinal;; ++suffix) {
      Value v = Value::text(pool[pick(rng, pool.size())] + " " + std::to_string(suffix));
      if (!taken(v)) return v;
    }
  }
  if (type == ColumnType::Date) {
    const auto& pool = date_pool();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      Value v = Value::date(*Date::parse(pool[pick(rng, pool.size())]));
      if (!taken(v)) return v;
    }
    for (int year = 2025;; ++year) {  // pool exhausted: unique fallback dates
      Value v = Value::date(*Date::parse(std::to_string(year) + "-01-01"));
      if (!taken(v)) return v;
    }
  }
  // Remaining key types (float, bool) fall back to sequential integers cast
  // into the column type.
  for (std::int64_t next = 1;; ++next) {
    Value v = type == ColumnType::Float ? Value::real(static_cast<double>(next))
                                        : Value::integer(next);
    if (!taken(v)) return v;
  }
}

const ForeignKey* foreign_key_for(const TableDef& table, const std::string& column) {
  for (const ForeignKey& fk : table.foreign_keys) {
    if (fk.column == column) return &fk;
  }
  return nullptr;
}

std::vector<Value> column_values(const DatabaseInstance& db, const std::string& table,
                                 const std::string& column) {
  std::vector<Value> values;
  const TableDef* def = db.schema.find_table(table);
  if (!def) return values;
  std::size_t index = def->column_index(column);
  auto it = db.data.find(table);
  if (it == db.data.end()) return values;
  for (const Row& row : it->second) values.push_back(row[index]);
  return values;
}

Row generate_row(std::mt19937_64& rng, const DatabaseInstance& db, const TableDef& table,
                 const std::vector<Value>& used_pks, std::size_t ordinal,
                 const InstanceGenConfig& config) {
  Row row;
  for (const ColumnDef& column : table.columns) {
    bool is_pk = table.primary_key && *table.primary_key == column.name;
    const ForeignKey* fk = foreign_key_for(table, column.name);
    if (is_pk) {
      row.push_back(fresh_pk(rng, column.name, column.type, used_pks, ordinal));
    } else if (fk) {
      std::vector<Value> parents = column_values(db, fk->ref_table, fk->ref_column);
      if (!parents.empty() && chance(rng, config.fk_match_probability)) {
        row.push_back(parents[pick(rng, parents.size())]);
      } else {
        row.push_back(Value::null());
      }
    } else if (chance(rng, config.null_probability)) {
      row.push_back(Value::null());
    } else {
      row.push_back(pool_value(rng, column.name, column.type));
    }
  }
  return row;
}

}  // namespace

DatabaseInstance generate_instance(const Schema& schema, std::uint64_t seed,
                                   const InstanceGenConfig& config) {
  schema.validate();
  DatabaseInstance db;
  db.schema = schema;
  db.seed = static_cast<std::int64_t>(seed);
  for (const TableDef* table : schema.topological_order()) {
    std::mt19937_64 rng(mix(seed) ^ fnv1a(table->name));
    std::vector<Row>& rows = db.data[table->name];
    std::vector<Value> used_pks;
    for (int i = 0; i < config.rows_per_table; ++i) {
      Row row = generate_row(rng, db, *table, used_pks, static_cast<std::size_t>(i), config);
      if (table->primary_key) {
        used_pks.push_back(row[table->column_index(*table->primary_key)]);
      }
      rows.push_back(std::move(row));
    }
  }
  db.validate();
  return db;
}

namespace {

// Columns some foreign key points at; mutating them could strand children.
bool is_referenced(const Schema& schema, const std::string& table, const std::string& column) {
  for (const TableDef& other : schema.tables) {
    for (const ForeignKey& fk : other.foreign_keys) {
      if (fk.ref_table == table && fk.ref_column == column) return true;
    }
  }
  return false;
}

// After removing a parent row, null out child references whose target value
// no longer exists anywhere in the parent column.
void repair_references(DatabaseInstance& db, const TableDef& parent, const Row& removed) {
  for (const TableDef& child : db.schema.tables) {
    for (const ForeignKey& fk : child.foreign_keys) {
      if (fk.ref_table != parent.name) continue;
      std::size_t ref_index = parent.column_index(fk.ref_column);
      const Value& gone = removed[ref_index];
      if (gone.is_null()) continue;
      bool still_present = false;
      for (const Row& row : db.data[parent.name]) {
        if (same_value(row[ref_index], gone)) {
          still_present = true;
          break;
        }
      }
      if (still_present) continue;
      std::size_t fk_index = child.column_index(fk.column);
      for (Row& row : db.data[child.name]) {
        if (!row[fk_index].is_null() && same_value(row[fk_index], gone)) {
          row[fk_index] = Value::null();
        }
      }
    }
  }
}

}  // namespace

DatabaseInstance perturb_instance(const DatabaseInstance& base, std::uint64_t seed) {
  DatabaseInstance db = base;
  db.seed = static_cast<std::int64_t>(seed);
  std::mt19937_64 rng(mix(seed));
  InstanceGenConfig config;
  std::vector<const TableDef*> tables = db.schema.topological_order();

  std::size_t mutations = 1 + pick(rng, 3);
  for (std::size_t m = 0; m < mutations; ++m) {
    const TableDef& table = *tables[pick(rng, tables.size())];
    std::vector<Row>& rows = db.data[table.name];
    std::size_t action = pick(rng, 3);
    if (action == 0) {  // insert
      std::vector<Value> used_pks;
      if (table.primary_key) {
        used_pks = column_values(db, table.name, *table.primary_key);
      }
      rows.push_back(generate_row(rng, db, table, used_pks, rows.size() + 100, config));
    } else if (action == 1 && !rows.empty()) {  // delete + null out references
      std::size_t victim = pick(rng, rows.size());
      Row removed = rows[victim];
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(victim));
      repair_references(db, table, removed);
    } else if (!rows.empty()) {  // rewrite one non-key cell
      std::size_t victim = pick(rng, rows.size());
      std::vector<std::size_t> mutable_columns;
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        bool is_pk = table.primary_key && *table.primary_key == table.columns[c].name;
        if (!is_pk && !is_referenced(db.schema, table.name, table.columns[c].name)) {
          mutable_columns.push_back(c);
        }
      }
      if (mutable_columns.empty()) continue;
      std::size_t c = mutable_columns[pick(rng, mutable_columns.size())];
      const ColumnDef& column = table.columns[c];
      const ForeignKey* fk = foreign_key_for(table, column.name);
      Value next;
      if (fk) {
        std::vector<Value> parents = column_values(db, fk->ref_table, fk->ref_column);
        next = (!parents.empty() && chance(rng, config.fk_match_probability))
                   ? parents[pick(rng, parents.size())]
                   : Value::null();
      } else if (chance(rng, config.null_probability)) {
        next = Value::null();
      } else {
        next = pool_value(rng, column.name, column.type);
      }
      rows[victim][c] = next;
    }
  }
  db.validate();
  return db;
}

}  // namespace sqleq
