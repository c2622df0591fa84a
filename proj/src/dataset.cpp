#include "sqleq/dataset.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sqleq/errors.hpp"
#include "sqleq/oracle.hpp"
#include "sqleq/parse.hpp"
#include "sqleq/universes.hpp"

namespace sqleq {

namespace {

// splitmix64, as used by the instance generator, so nearby seeds decorrelate.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

template <typename T, std::size_t N>
const T& pick_one(std::mt19937_64& rng, const std::array<T, N>& pool) {
  return pool[pick(rng, N)];
}

std::string ascii_upper(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

std::string ascii_lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// Vocabulary the synthetic predicates draw from; mirrors the value pools of
// the instance generator so filters actually select rows.
const std::array<std::string, 4>& predicate_words(const std::string& column) {
  static const std::array<std::array<std::string, 4>, 10> pools = {{
      {"Sales", "Engineering", "HR", "Marketing"},       // department / dname
      {"Electronics", "Books", "Toys", "Garden"},        // category
      {"Paris", "London", "Tokyo", "Oslo"},              // city
      {"shipped", "pending", "returned", "paid"},        // status
      {"Engineer", "Manager", "Analyst", "Clerk"},       // job_title
      {"Algebra", "Biology", "Chemistry", "Drama"},      // course
      {"Physics", "History", "Music", "Economics"},      // major
      {"North", "South", "East", "West"},                // region
      {"Widget", "Gadget", "Sprocket", "Caf\xc3\xa9 Latte"},  // product_name
      {"Alice", "Bob", "Carol", "Dave"},                 // name
  }};
  if (column == "department" || column == "dname") return pools[0];
  if (column == "category") return pools[1];
  if (column == "city") return pools[2];
  if (column == "status") return pools[3];
  if (column == "job_title") return pools[4];
  if (column == "course") return pools[5];
  if (column == "major") return pools[6];
  if (column == "region") return pools[7];
  if (column == "product_name") return pools[8];
  return pools[9];
}

// One parent/child pair joined through a foreign key. `pname` is a column
// that is unique per parent row (the primary key), so collapsing duplicates
// after a join cannot merge distinct parents.
struct Relation {
  const char* universe;
  const char* parent;
  const char* pkey;   // join column on the parent side
  const char* pname;  // projected parent column (unique per row)
  const char* child;
  const char* ckey;  // foreign-key column on the child side
  const char* num;   // numeric measure on the child
  const char* text;  // text column on the child
  const char* parent_noun;
  const char* child_noun;
};

const std::array<Relation, 4> kRelations = {{
    {"company", "departments", "dname", "dname", "employees", "department", "salary",
     "job_title", "department", "employee"},
    {"commerce", "customers", "customer_id", "customer_name", "orders", "customer_id",
     "amount", "status", "customer", "order"},
    {"inventory", "products", "product_id", "product_id", "sales", "product_id", "amount",
     "region", "product", "sale"},
    {"school", "students", "student_id", "student_name", "enrollments", "student_id",
     "grade", "course", "student", "enrollment"},
}};

struct NumericSlot {
  const char* universe;
  const char* table;
  const char* column;
  bool is_int;
};

const std::array<NumericSlot, 7> kNumericSlots = {{
    {"inventory", "products", "price", false},
    {"company", "employees", "salary", false},
    {"commerce", "orders", "amount", false},
    {"company", "departments", "budget", false},
    {"school", "students", "gpa", false},
    {"inventory", "sales", "amount", false},
    {"school", "enrollments", "grade", false},
}};

struct TextSlot {
  const char* universe;
  const char* table;
  const char* column;
};

const std::array<TextSlot, 8> kTextSlots = {{
    {"inventory", "products", "category"},
    {"company", "employees", "job_title"},
    {"commerce", "orders", "status"},
    {"inventory", "sales", "region"},
    {"school", "students", "major"},
    {"school", "enrollments", "course"},
    {"commerce", "customers", "city"},
    {"company", "employees", "department"},
}};

struct DateSlot {
  const char* universe;
  const char* table;
  const char* column;
};

const std::array<DateSlot, 4> kDateSlots = {{
    {"company", "employees", "hire_date"},
    {"commerce", "orders", "order_date"},
    {"inventory", "sales", "sale_date"},
    {"school", "enrollments", "enroll_date"},
}};

// Table + predicate material for OR/AND filter pairs: a text column with its
// word pool and a numeric column with a plausible threshold.
struct FilterSlot {
  const char* universe;
  const char* table;
  const char* text_column;
  const char* num_column;
  bool num_is_int;
};

const std::array<FilterSlot, 6> kFilterSlots = {{
    {"inventory", "products", "category", "price", false},
    {"company", "employees", "job_title", "salary", false},
    {"commerce", "orders", "status", "amount", false},
    {"inventory", "sales", "region", "amount", false},
    {"school", "students", "major", "gpa", false},
    {"school", "enrollments", "course", "grade", false},
}};

// Tables with an integer primary key, used for CASE bucketing: the key is
// never NULL, so a threshold splits rows into exactly two buckets.
struct IntKeySlot {
  const char* universe;
  const char* table;
  const char* pk;
  const char* text_column;
};

const std::array<IntKeySlot, 5> kIntKeySlots = {{
    {"company", "employees", "emp_id", "name"},
    {"commerce", "orders", "order_id", "status"},
    {"inventory", "sales", "sale_id", "region"},
    {"school", "enrollments", "enroll_id", "course"},
    {"inventory", "products", "product_id", "product_name"},
}};

double float_threshold(std::mt19937_64& rng) {
  static const std::array<double, 3> pool = {10, 50, 100};
  return pick_one(rng, pool);
}

int int_threshold(std::mt19937_64& rng) {
  static const std::array<int, 3> pool = {2, 5, 7};
  return pick_one(rng, pool);
}

std::string number_text(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

QueryPair base_pair(const char* universe) {
  QueryPair pair;
  pair.schema = sqleq::universe(universe);
  return pair;
}

// --- Equivalent templates ---------------------------------------------------

QueryPair join_vs_subquery(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  pair.nl_question = std::string("Find each ") + r.parent_noun + " that has at least one " +
                     r.child_noun + ".";
  pair.sql1 = std::string("SELECT ") + r.pname + " FROM " + r.parent + " WHERE " + r.pkey +
              " IN (SELECT " + r.ckey + " FROM " + r.child + ")";
  std::string join = std::string(r.parent) + " JOIN " + r.child + " ON " + r.parent + "." +
                     r.pkey + " = " + r.child + "." + r.ckey;
  if (pick(rng, 2) == 0) {
    pair.sql2 = std::string("SELECT DISTINCT ") + r.parent + "." + r.pname + " FROM " + join;
  } else {
    pair.sql2 = std::string("SELECT ") + r.parent + "." + r.pname + " FROM " + join +
                " GROUP BY " + r.parent + "." + r.pname;
  }
  return pair;
}

QueryPair distinct_vs_group_by(std::mt19937_64& rng) {
  const TextSlot& s = pick_one(rng, kTextSlots);
  QueryPair pair = base_pair(s.universe);
  pair.nl_question = std::string("Get the unique list of ") + s.column + " values from " +
                     s.table + ".";
  pair.sql1 = std::string("SELECT DISTINCT ") + s.column + " FROM " + s.table;
  pair.sql2 = std::string("SELECT ") + s.column + " FROM " + s.table + " GROUP BY " + s.column;
  return pair;
}

QueryPair implicit_vs_explicit_join(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  const char* ccol = pick(rng, 2) == 0 ? r.num : r.text;
  bool filtered = pick(rng, 2) == 0;
  std::string filter =
      std::string(r.child) + "." + r.num + " > " + number_text(float_threshold(rng));
  pair.nl_question = std::string("Show each ") + r.parent_noun + " with the " + ccol +
                     " of its " + r.child_noun + "s" +
                     (filtered ? " where the " + std::string(r.num) + " is large enough." : ".");
  std::string items = std::string(r.parent) + "." + r.pname + ", " + r.child + "." + ccol;
  pair.sql1 = "SELECT " + items + " FROM " + r.parent + ", " + r.child + " WHERE " + r.parent +
              "." + r.pkey + " = " + r.child + "." + r.ckey;
  pair.sql2 = "SELECT " + items + " FROM " + r.parent + " JOIN " + r.child + " ON " + r.parent +
              "." + r.pkey + " = " + r.child + "." + r.ckey;
  if (filtered) {
    pair.sql1 += " AND " + filter;
    pair.sql2 += " WHERE " + filter;
  }
  return pair;
}

QueryPair alias_vs_full_name(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  static const std::array<std::pair<const char*, const char*>, 3> alias_pairs = {
      {{"a", "b"}, {"t1", "t2"}, {"x", "y"}}};
  auto [ca, pa] = pick_one(rng, alias_pairs);
  std::string threshold = number_text(float_threshold(rng));
  pair.nl_question = std::string("List the ") + r.text + " and " + r.parent_noun + " of every " +
                     r.child_noun + " whose " + r.num + " exceeds " + threshold + ".";
  pair.sql1 = std::string("SELECT ") + r.child + "." + r.text + ", " + r.parent + "." + r.pname +
              " FROM " + r.child + " JOIN " + r.parent + " ON " + r.child + "." + r.ckey + " = " +
              r.parent + "." + r.pkey + " WHERE " + r.child + "." + r.num + " > " + threshold;
  pair.sql2 = std::string("SELECT ") + ca + "." + r.text + ", " + pa + "." + r.pname + " FROM " +
              r.child + " AS " + ca + " JOIN " + r.parent + " AS " + pa + " ON " + ca + "." +
              r.ckey + " = " + pa + "." + r.pkey + " WHERE " + ca + "." + r.num + " > " +
              threshold;
  return pair;
}

QueryPair date_format(std::mt19937_64& rng) {
  const DateSlot& s = pick_one(rng, kDateSlots);
  QueryPair pair = base_pair(s.universe);
  // Months present in the generated date pool, with their 2024 end day.
  static const std::array<std::pair<const char*, const char*>, 8> months = {
      {{"01", "31"},
       {"02", "29"},
       {"03", "31"},
       {"04", "30"},
       {"06", "30"},
       {"08", "31"},
       {"10", "31"},
       {"12", "31"}}};
  static const std::array<std::string, 8> days = {"2024-01-05", "2024-02-14", "2024-03-21",
                                                  "2024-04-02", "2024-06-15", "2024-08-01",
                                                  "2024-10-31", "2024-12-25"};
  switch (pick(rng, 3)) {
    case 0: {  // month window vs text prefix
      auto [mm, last] = pick_one(rng, months);
      pair.nl_question = std::string("Find ") + s.table + " rows dated in 2024-" + mm + ".";
      pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + s.column + " >= '2024-" +
                  mm + "-01' AND " + s.column + " <= '2024-" + mm + "-" + last + "'";
      pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE CAST(" + s.column +
                  " AS TEXT) LIKE '2024-" + mm + "%'";
      break;
    }
    case 1: {  // date literal vs text comparison
      const std::string& day = pick_one(rng, days);
      pair.nl_question = std::string("Find ") + s.table + " rows dated exactly " + day + ".";
      pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + s.column + " = '" + day +
                  "'";
      pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE CAST(" + s.column +
                  " AS TEXT) = '" + day + "'";
      break;
    }
    default: {  // year window vs substring of the text form
      pair.nl_question = std::string("Find ") + s.table + " rows dated in 2024.";
      pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + s.column +
                  " >= '2024-01-01' AND " + s.column + " <= '2024-12-31'";
      pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE SUBSTRING(CAST(" + s.column +
                  " AS TEXT), 1, 4) = '2024'";
      break;
    }
  }
  return pair;
}

QueryPair case_formatting(std::mt19937_64& rng) {
  const TextSlot& s = pick_one(rng, kTextSlots);
  QueryPair pair = base_pair(s.universe);
  const std::string& word = pick_one(rng, predicate_words(s.column));
  if (pick(rng, 2) == 0) {  // UPPER vs LOWER comparison
    pair.nl_question = std::string("Find ") + s.table + " rows whose " + s.column +
                       " matches '" + word + "' ignoring letter case.";
    pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE UPPER(" + s.column + ") = '" +
                ascii_upper(word) + "'";
    pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE LOWER(" + s.column + ") = '" +
                ascii_lower(word) + "'";
  } else {  // LIKE prefix vs SUBSTRING prefix
    std::size_t len = std::min<std::size_t>(3, word.size());
    std::string prefix = word.substr(0, len);
    pair.nl_question = std::string("Find ") + s.table + " rows whose " + s.column +
                       " starts with '" + prefix + "'.";
    pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + s.column + " LIKE '" +
                prefix + "%'";
    pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE SUBSTRING(" + s.column +
                ", 1, " + std::to_string(len) + ") = '" + prefix + "'";
  }
  return pair;
}

QueryPair aggregation_methods(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  static const std::array<std::pair<const char*, const char*>, 4> aggs = {
      {{"SUM", "total"}, {"AVG", "average"}, {"MIN", "lowest"}, {"MAX", "highest"}}};
  auto [fn, adjective] = pick_one(rng, aggs);
  std::string alias = ascii_lower(fn) + "_" + r.num;
  pair.nl_question = std::string("Get the ") + adjective + " " + r.num + " for each known " +
                     r.ckey + " in " + r.child + ".";
  pair.sql1 = std::string("SELECT ") + r.ckey + ", " + fn + "(" + r.num + ") AS " + alias +
              " FROM " + r.child + " WHERE " + r.ckey + " IS NOT NULL GROUP BY " + r.ckey;
  pair.sql2 = std::string("SELECT t.") + r.ckey + ", (SELECT " + fn + "(u." + r.num + ") FROM " +
              r.child + " AS u WHERE u." + r.ckey + " = t." + r.ckey + ") AS " + alias +
              " FROM " + r.child + " AS t WHERE t." + r.ckey + " IS NOT NULL GROUP BY t." +
              r.ckey;
  return pair;
}

QueryPair filtering_methods(std::mt19937_64& rng) {
  const FilterSlot& s = pick_one(rng, kFilterSlots);
  QueryPair pair = base_pair(s.universe);
  const auto& words = predicate_words(s.text_column);
  if (pick(rng, 2) == 0) {  // text match OR numeric threshold
    const std::string& word = pick_one(rng, words);
    std::string threshold =
        s.num_is_int ? std::to_string(int_threshold(rng)) : number_text(float_threshold(rng));
    std::string left = std::string(s.text_column) + " = '" + word + "'";
    std::string right = std::string(s.num_column) + " > " + threshold;
    pair.nl_question = std::string("Retrieve all ") + s.table + " rows whose " + s.text_column +
                       " is '" + word + "' or whose " + s.num_column + " is above " + threshold +
                       ".";
    pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + left + " OR " + right;
    pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE " + left + " UNION SELECT * FROM " +
                s.table + " WHERE " + right;
  } else {  // disjunction over two values of the same column
    std::size_t first = pick(rng, words.size());
    std::size_t second = (first + 1 + pick(rng, words.size() - 1)) % words.size();
    std::string left = std::string(s.text_column) + " = '" + words[first] + "'";
    std::string right = std::string(s.text_column) + " = '" + words[second] + "'";
    pair.nl_question = std::string("Get all ") + s.table + " rows whose " + s.text_column +
                       " is '" + words[first] + "' or '" + words[second] + "'.";
    pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + left + " OR " + right;
    pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE " + left + " UNION SELECT * FROM " +
                s.table + " WHERE " + right;
  }
  return pair;
}

QueryPair case_vs_union_where(std::mt19937_64& rng) {
  const IntKeySlot& s = pick_one(rng, kIntKeySlots);
  QueryPair pair = base_pair(s.universe);
  static const std::array<int, 5> thresholds = {20, 40, 50, 60, 80};
  static const std::array<std::pair<const char*, const char*>, 3> labels = {
      {{"High", "Low"}, {"New", "Legacy"}, {"Priority", "Standard"}}};
  int k = pick_one(rng, thresholds);
  auto [hi, lo] = pick_one(rng, labels);
  pair.nl_question = std::string("Show each ") + s.table + " row's " + s.text_column +
                     " with a bucket of '" + hi + "' when " + s.pk + " exceeds " +
                     std::to_string(k) + ", else '" + lo + "'.";
  pair.sql1 = std::string("SELECT ") + s.text_column + ", CASE WHEN " + s.pk + " > " +
              std::to_string(k) + " THEN '" + hi + "' ELSE '" + lo + "' END AS bucket FROM " +
              s.table;
  pair.sql2 = std::string("SELECT ") + s.text_column + ", '" + hi + "' AS bucket FROM " +
              s.table + " WHERE " + s.pk + " > " + std::to_string(k) + " UNION ALL SELECT " +
              s.text_column + ", '" + lo + "' AS bucket FROM " + s.table + " WHERE " + s.pk +
              " <= " + std::to_string(k);
  return pair;
}

QueryPair order_by_variants(std::mt19937_64& rng) {
  const NumericSlot& s = pick_one(rng, kNumericSlots);
  QueryPair pair = base_pair(s.universe);
  if (pick(rng, 2) == 0) {  // descending vs negated ascending
    pair.nl_question = std::string("List all ") + s.table + " rows ordered by " + s.column +
                       " from highest to lowest.";
    pair.sql1 = std::string("SELECT * FROM ") + s.table + " ORDER BY " + s.column + " DESC";
    pair.sql2 = std::string("SELECT * FROM ") + s.table + " ORDER BY " + s.column + " * -1 ASC";
  } else {  // implicit vs explicit ascending
    pair.nl_question = std::string("List all ") + s.table + " rows ordered by " + s.column +
                       " from lowest to highest.";
    pair.sql1 = std::string("SELECT * FROM ") + s.table + " ORDER BY " + s.column + " ASC";
    pair.sql2 = std::string("SELECT * FROM ") + s.table + " ORDER BY " + s.column;
  }
  return pair;
}

QueryPair exists_vs_join(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  pair.nl_question = std::string("Find each ") + r.parent_noun + " with at least one " +
                     r.child_noun + " on record.";
  pair.sql1 = std::string("SELECT ") + r.pname + " FROM " + r.parent +
              " WHERE EXISTS (SELECT 1 FROM " + r.child + " WHERE " + r.parent + "." + r.pkey +
              " = " + r.child + "." + r.ckey + ")";
  pair.sql2 = std::string("SELECT DISTINCT a.") + r.pname + " FROM " + r.parent + " AS a JOIN " +
              r.child + " AS b ON a." + r.pkey + " = b." + r.ckey;
  return pair;
}

// --- Inequivalent templates -------------------------------------------------

QueryPair wrong_join_condition(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  // A type-compatible but wrong child column for the join key.
  const char* wrong = nullptr;
  if (std::string(r.universe) == "company") wrong = "name";
  if (std::string(r.universe) == "commerce") wrong = "order_id";
  if (std::string(r.universe) == "inventory") wrong = "sale_id";
  if (std::string(r.universe) == "school") wrong = "enroll_id";
  pair.nl_question = std::string("Retrieve every ") + r.child_noun + " with its " +
                     r.parent_noun + ".";
  std::string items = std::string(r.child) + "." + r.num + ", " + r.parent + "." + r.pname;
  pair.sql1 = "SELECT " + items + " FROM " + r.child + " JOIN " + r.parent + " ON " + r.child +
              "." + r.ckey + " = " + r.parent + "." + r.pkey;
  pair.sql2 = "SELECT " + items + " FROM " + r.child + " JOIN " + r.parent + " ON " + r.child +
              "." + wrong + " = " + r.parent + "." + r.pkey;
  return pair;
}

QueryPair wrong_where(std::mt19937_64& rng) {
  const NumericSlot& s = pick_one(rng, kNumericSlots);
  QueryPair pair = base_pair(s.universe);
  static const std::array<std::pair<const char*, const char*>, 4> ops = {
      {{">", ">="}, {"<", "<="}, {">=", ">"}, {"<=", "<"}}};
  auto [op1, op2] = pick_one(rng, ops);
  std::string threshold =
      s.is_int ? std::to_string(int_threshold(rng)) : number_text(float_threshold(rng));
  pair.nl_question = std::string("Find all ") + s.table + " rows with " + s.column + " " + op1 +
                     " " + threshold + ".";
  pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + s.column + " " + op1 + " " +
              threshold;
  pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE " + s.column + " " + op2 + " " +
              threshold;
  return pair;
}

QueryPair wrong_aggregation(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  static const std::array<std::pair<const char*, const char*>, 3> fns = {
      {{"SUM", "AVG"}, {"MIN", "MAX"}, {"SUM", "COUNT"}}};
  auto [good, bad] = pick_one(rng, fns);
  pair.nl_question = std::string("Get the ") + ascii_lower(good) + " of " + r.num +
                     " for each " + r.ckey + " in " + r.child + ".";
  pair.sql1 = std::string("SELECT ") + r.ckey + ", " + good + "(" + r.num +
              ") AS agg_value FROM " + r.child + " GROUP BY " + r.ckey;
  pair.sql2 = std::string("SELECT ") + r.ckey + ", " + bad + "(" + r.num +
              ") AS agg_value FROM " + r.child + " GROUP BY " + r.ckey;
  return pair;
}

QueryPair distinct_group_by_misuse(std::mt19937_64& rng) {
  const FilterSlot& s = pick_one(rng, kFilterSlots);
  QueryPair pair = base_pair(s.universe);
  pair.nl_question = std::string("Get the unique list of ") + s.text_column + " values from " +
                     s.table + ".";
  pair.sql1 = std::string("SELECT DISTINCT ") + s.text_column + " FROM " + s.table;
  pair.sql2 = std::string("SELECT ") + s.text_column + " FROM " + s.table + " GROUP BY " +
              s.text_column + ", " + s.num_column;
  return pair;
}

QueryPair wrong_subquery(std::mt19937_64& rng) {
  const Relation& r = pick_one(rng, kRelations);
  QueryPair pair = base_pair(r.universe);
  pair.nl_question = std::string("List each ") + r.parent_noun + " that has a " + r.child_noun +
                     ".";
  pair.sql1 = std::string("SELECT ") + r.pname + " FROM " + r.parent + " WHERE " + r.pkey +
              " IN (SELECT " + r.ckey + " FROM " + r.child + ")";
  pair.sql2 = std::string("SELECT ") + r.pname + " FROM " + r.parent + " WHERE " + r.pkey +
              " = (SELECT " + r.ckey + " FROM " + r.child + ")";
  return pair;
}

QueryPair and_or_error(std::mt19937_64& rng) {
  const FilterSlot& s = pick_one(rng, kFilterSlots);
  QueryPair pair = base_pair(s.universe);
  const std::string& word = pick_one(rng, predicate_words(s.text_column));
  std::string threshold =
      s.num_is_int ? std::to_string(int_threshold(rng)) : number_text(float_threshold(rng));
  std::string left = std::string(s.text_column) + " = '" + word + "'";
  std::string right = std::string(s.num_column) + " > " + threshold;
  pair.nl_question = std::string("Retrieve all ") + s.table + " rows whose " + s.text_column +
                     " is '" + word + "' and whose " + s.num_column + " is above " + threshold +
                     ".";
  pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE " + left + " AND " + right;
  pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE " + left + " OR " + right;
  return pair;
}

QueryPair wrong_order_by(std::mt19937_64& rng) {
  const NumericSlot& s = pick_one(rng, kNumericSlots);
  QueryPair pair = base_pair(s.universe);
  pair.nl_question = std::string("List all ") + s.table + " rows ordered by " + s.column +
                     " from highest to lowest.";
  pair.sql1 = std::string("SELECT * FROM ") + s.table + " ORDER BY " + s.column + " DESC";
  pair.sql2 = std::string("SELECT * FROM ") + s.table + " ORDER BY " + s.column + " ASC";
  return pair;
}

QueryPair function_misuse(std::mt19937_64& rng) {
  if (pick(rng, 2) == 0) {  // byte length vs code-point length
    QueryPair pair = base_pair("inventory");
    pair.nl_question = "Find the length of each product name.";
    pair.sql1 = "SELECT product_name, LENGTH(product_name) AS name_length FROM products";
    pair.sql2 = "SELECT product_name, CHAR_LENGTH(product_name) AS name_length FROM products";
    return pair;
  }
  // Wrong case function: UPPER of a value can never equal a lowercase word.
  const TextSlot& s = pick_one(rng, kTextSlots);
  QueryPair pair = base_pair(s.universe);
  const std::string& word = pick_one(rng, predicate_words(s.column));
  pair.nl_question = std::string("Find ") + s.table + " rows whose " + s.column + " matches '" +
                     word + "' ignoring letter case.";
  pair.sql1 = std::string("SELECT * FROM ") + s.table + " WHERE LOWER(" + s.column + ") = '" +
              ascii_lower(word) + "'";
  pair.sql2 = std::string("SELECT * FROM ") + s.table + " WHERE UPPER(" + s.column + ") = '" +
              ascii_lower(word) + "'";
  return pair;
}

}  // namespace

const char* to_string(PairLabel label) {
  return label == PairLabel::Equivalent ? "equivalent" : "inequivalent";
}

std::optional<PairLabel> pair_label_from_string(const std::string& name) {
  if (name == "equivalent") return PairLabel::Equivalent;
  if (name == "inequivalent") return PairLabel::Inequivalent;
  return std::nullopt;
}

const char* to_string(PatternCategory category) {
  switch (category) {
    case PatternCategory::JoinVsSubquery: return "join_vs_subquery";
    case PatternCategory::DistinctVsGroupBy: return "distinct_vs_group_by";
    case PatternCategory::ImplicitVsExplicitJoin: return "implicit_vs_explicit_join";
    case PatternCategory::AliasVsFullName: return "alias_vs_full_name";
    case PatternCategory::DateFormat: return "date_format";
    case PatternCategory::CaseFormatting: return "case_formatting";
    case PatternCategory::AggregationMethods: return "aggregation_methods";
    case PatternCategory::FilteringMethods: return "filtering_methods";
    case PatternCategory::CaseVsUnionWhere: return "case_vs_union_where";
    case PatternCategory::OrderByVariants: return "order_by_variants";
    case PatternCategory::ExistsVsJoin: return "exists_vs_join";
    case PatternCategory::WrongJoinCondition: return "wrong_join_condition";
    case PatternCategory::WrongWhere: return "wrong_where";
    case PatternCategory::WrongAggregation: return "wrong_aggregation";
    case PatternCategory::DistinctGroupByMisuse: return "distinct_group_by_misuse";
    case PatternCategory::WrongSubquery: return "wrong_subquery";
    case PatternCategory::AndOrError: return "and_or_error";
    case PatternCategory::WrongOrderBy: return "wrong_order_by";
    case PatternCategory::FunctionMisuse: return "function_misuse";
  }
  return "unknown";
}

std::optional<PatternCategory> category_from_string(const std::string& name) {
  for (PatternCategory c : all_categories()) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

PairLabel polarity(PatternCategory category) {
  switch (category) {
    case PatternCategory::JoinVsSubquery:
    case PatternCategory::DistinctVsGroupBy:
    case PatternCategory::ImplicitVsExplicitJoin:
    case PatternCategory::AliasVsFullName:
    case PatternCategory::DateFormat:
    case PatternCategory::CaseFormatting:
    case PatternCategory::AggregationMethods:
    case PatternCategory::FilteringMethods:
    case PatternCategory::CaseVsUnionWhere:
    case PatternCategory::OrderByVariants:
    case PatternCategory::ExistsVsJoin:
      return PairLabel::Equivalent;
    default:
      return PairLabel::Inequivalent;
  }
}

const std::vector<PatternCategory>& all_categories() {
  static const std::vector<PatternCategory> all = {
      PatternCategory::JoinVsSubquery,      PatternCategory::DistinctVsGroupBy,
      PatternCategory::ImplicitVsExplicitJoin, PatternCategory::AliasVsFullName,
      PatternCategory::DateFormat,          PatternCategory::CaseFormatting,
      PatternCategory::AggregationMethods,  PatternCategory::FilteringMethods,
      PatternCategory::CaseVsUnionWhere,    PatternCategory::OrderByVariants,
      PatternCategory::ExistsVsJoin,        PatternCategory::WrongJoinCondition,
      PatternCategory::WrongWhere,          PatternCategory::WrongAggregation,
      PatternCategory::DistinctGroupByMisuse, PatternCategory::WrongSubquery,
      PatternCategory::AndOrError,          PatternCategory::WrongOrderBy,
      PatternCategory::FunctionMisuse,
  };
  return all;
}

const std::vector<PatternCategory>& equivalent_categories() {
  static const std::vector<PatternCategory> eq = [] {
    std::vector<PatternCategory> out;
    for (PatternCategory c : all_categories()) {
      if (polarity(c) == PairLabel::Equivalent) out.push_back(c);
    }
    return out;
  }();
  return eq;
}

const std::vector<PatternCategory>& inequivalent_categories() {
  static const std::vector<PatternCategory> ineq = [] {
    std::vector<PatternCategory> out;
    for (PatternCategory c : all_categories()) {
      if (polarity(c) == PairLabel::Inequivalent) out.push_back(c);
    }
    return out;
  }();
  return ineq;
}

std::string to_json_line(const QueryPair& pair) {
  nlohmann::ordered_json record;
  record["id"] = pair.id;
  record["nl_question"] = pair.nl_question;
  record["sql1"] = pair.sql1;
  record["sql2"] = pair.sql2;
  if (pair.gold) record["label"] = to_string(*pair.gold);
  if (pair.category) record["category"] = to_string(*pair.category);
  record["schema"] = nlohmann::ordered_json::parse(pair.schema.to_json());
  return record.dump();
}

QueryPair query_pair_from_json(const std::string& line) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InputFormatError("record", 0, std::string("invalid JSON: ") + e.what());
  }
  if (!record.is_object()) {
    throw InputFormatError("record", 0, "expected a JSON object per line");
  }
  QueryPair pair;
  for (const char* key : {"id", "nl_question", "sql1", "sql2", "schema"}) {
    if (!record.contains(key)) {
      throw InputFormatError("record", 0, std::string("missing required field: ") + key);
    }
  }
  pair.id = record.at("id").get<std::string>();
  pair.nl_question = record.at("nl_question").get<std::string>();
  pair.sql1 = record.at("sql1").get<std::string>();
  pair.sql2 = record.at("sql2").get<std::string>();
  pair.schema = Schema::from_json(record.at("schema").dump());
  if (record.contains("label")) {
    auto label = pair_label_from_string(record.at("label").get<std::string>());
    if (!label) {
      throw InputFormatError("record", 0,
                             "unknown label: " + record.at("label").get<std::string>());
    }
    pair.gold = *label;
  }
  if (record.contains("category")) {
    auto category = category_from_string(record.at("category").get<std::string>());
    if (!category) {
      throw InputFormatError("record", 0,
                             "unknown category: " + record.at("category").get<std::string>());
    }
    pair.category = *category;
  }
  // Both statements must be well-formed SQL.
  parse(pair.sql1);
  parse(pair.sql2);
  return pair;
}

std::vector<QueryPair> load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputFormatError(path, 0, "cannot open file");
  std::vector<QueryPair> pairs;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      pairs.push_back(query_pair_from_json(line));
    } catch (const InputFormatError& e) {
      throw InputFormatError(path, line_number, e.what());
    } catch (const ParseError& e) {
      throw InputFormatError(path, line_number, std::string("bad SQL: ") + e.what());
    }
  }
  return pairs;
}

void write_pairs(const std::string& path, const std::vector<QueryPair>& pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputFormatError(path, 0, "cannot open file for writing");
  for (const QueryPair& pair : pairs) {
    out << to_json_line(pair) << "\n";
  }
}

QueryPair generate_pair(PatternCategory category, std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed));
  QueryPair pair;
  switch (category) {
    case PatternCategory::JoinVsSubquery: pair = join_vs_subquery(rng); break;
    case PatternCategory::DistinctVsGroupBy: pair = distinct_vs_group_by(rng); break;
    case PatternCategory::ImplicitVsExplicitJoin: pair = implicit_vs_explicit_join(rng); break;
    case PatternCategory::AliasVsFullName: pair = alias_vs_full_name(rng); break;
    case PatternCategory::DateFormat: pair = date_format(rng); break;
    case PatternCategory::CaseFormatting: pair = case_formatting(rng); break;
    case PatternCategory::AggregationMethods: pair = aggregation_methods(rng); break;
    case PatternCategory::FilteringMethods: pair = filtering_methods(rng); break;
    case PatternCategory::CaseVsUnionWhere: pair = case_vs_union_where(rng); break;
    case PatternCategory::OrderByVariants: pair = order_by_variants(rng); break;
    case PatternCategory::ExistsVsJoin: pair = exists_vs_join(rng); break;
    case PatternCategory::WrongJoinCondition: pair = wrong_join_condition(rng); break;
    case PatternCategory::WrongWhere: pair = wrong_where(rng); break;
    case PatternCategory::WrongAggregation: pair = wrong_aggregation(rng); break;
    case PatternCategory::DistinctGroupByMisuse: pair = distinct_group_by_misuse(rng); break;
    case PatternCategory::WrongSubquery: pair = wrong_subquery(rng); break;
    case PatternCategory::AndOrError: pair = and_or_error(rng); break;
    case PatternCategory::WrongOrderBy: pair = wrong_order_by(rng); break;
    case PatternCategory::FunctionMisuse: pair = function_misuse(rng); break;
  }
  pair.gold = polarity(category);
  pair.category = category;
  return pair;
}

std::map<PatternCategory, int> default_counts() {
  std::map<PatternCategory, int> counts;
  const auto& eq = equivalent_categories();
  for (std::size_t i = 0; i < eq.size(); ++i) {
    counts[eq[i]] = i < 3 ? 8 : 7;  // 3*8 + 8*7 = 80
  }
  for (PatternCategory c : inequivalent_categories()) {
    counts[c] = 10;  // 8*10 = 80
  }
  return counts;
}

namespace {

std::uint64_t slot_base(std::uint64_t seed, PatternCategory category, int slot) {
  std::uint64_t c = static_cast<std::uint64_t>(category);
  return mix(seed ^ mix((c << 32) | static_cast<std::uint64_t>(slot)));
}

}  // namespace

DatasetFiles generate_dataset(const DatasetSpec& spec) {
  if (spec.attempt_limit < 1) {
    throw InputFormatError("dataset spec", 0, "attempt_limit must be at least 1");
  }
  DifferentialConfig verify;
  verify.seed = kVerifySeed;
  verify.instances = kVerifyInstances;
  verify.rows_per_table = spec.rows_per_table;
  verify.mode = CompareMode::Bag;

  std::vector<QueryPair> equivalent;
  std::vector<QueryPair> inequivalent;
  for (PatternCategory category : all_categories()) {
    auto it = spec.counts.find(category);
    int want = it == spec.counts.end() ? 0 : it->second;
    for (int slot = 0; slot < want; ++slot) {
      bool accepted = false;
      for (int attempt = 0; attempt < spec.attempt_limit; ++attempt) {
        std::uint64_t pair_seed =
            slot_base(spec.seed, category, slot) + static_cast<std::uint64_t>(attempt) * 1000003;
        QueryPair candidate = generate_pair(category, pair_seed);
        OracleReport report = differential_test(parse(candidate.sql1), parse(candidate.sql2),
                                                candidate.schema, verify);
        bool want_equivalent = polarity(category) == PairLabel::Equivalent;
        bool verified = want_equivalent
                            ? report.status == OracleStatus::EquivalentOnAllInstances
                            : report.status == OracleStatus::CounterexampleFound;
        if (!verified) continue;
        char suffix[8];
        std::snprintf(suffix, sizeof(suffix), "%03d", slot + 1);
        candidate.id = std::string(to_string(category)) + "-" + suffix;
        (want_equivalent ? equivalent : inequivalent).push_back(std::move(candidate));
        accepted = true;
        break;
      }
      if (!accepted) {
        throw GenerationExhausted(to_string(category), spec.attempt_limit);
      }
    }
  }

  // Every fourth equivalent pair goes to the holdout file, so both files
  // sample all categories; 80 pairs split 60/20.
  std::vector<QueryPair> main_pairs;
  std::vector<QueryPair> holdout_pairs;
  for (std::size_t i = 0; i < equivalent.size(); ++i) {
    (i % 4 == 3 ? holdout_pairs : main_pairs).push_back(equivalent[i]);
  }

  namespace fs = std::filesystem;
  fs::path dir = spec.output_dir.empty() ? fs::path(".") : fs::path(spec.output_dir);
  fs::create_directories(dir);
  DatasetFiles files;
  files.equivalent_main = (dir / "equivalent_main.jsonl").string();
  files.equivalent_holdout = (dir / "equivalent_holdout.jsonl").string();
  files.inequivalent = (dir / "inequivalent.jsonl").string();
  write_pairs(files.equivalent_main, main_pairs);
  write_pairs(files.equivalent_holdout, holdout_pairs);
  write_pairs(files.inequivalent, inequivalent);

  files.pairs = std::move(main_pairs);
  files.pairs.insert(files.pairs.end(), holdout_pairs.begin(), holdout_pairs.end());
  files.pairs.insert(files.pairs.end(), inequivalent.begin(), inequivalent.end());
  return files;
}

}  // namespace sqleq
