#include <catch2/catch_amalgamated.hpp>

#include "sqleq/errors.hpp"
#include "sqleq/execute.hpp"
#include "sqleq/instance_gen.hpp"
#include "sqleq/oracle.hpp"
#include "sqleq/parse.hpp"
#include "sqleq/universes.hpp"

using namespace sqleq;

namespace {

Value I(std::int64_t v) { return Value::integer(v); }
Value T(const char* v) { return Value::text(v); }

ResultTable table(std::vector<std::string> columns, std::vector<Row> rows) {
  ResultTable t;
  t.columns = std::move(columns);
  t.rows = std::move(rows);
  return t;
}

OracleReport differ(const char* a, const char* b, const Schema& schema,
                    DifferentialConfig config = {}) {
  return differential_test(parse(a), parse(b), schema, config);
}

}  // namespace

TEST_CASE("instance generation is deterministic and valid") {
  const Schema& schema = universe("company");
  auto a = generate_instance(schema, 7);
  auto b = generate_instance(schema, 7);
  CHECK(a.to_json() == b.to_json());

  auto c = generate_instance(schema, 8);
  CHECK(a.to_json() != c.to_json());

  for (const auto& name : universe_names()) {
    auto db = generate_instance(universe(name), 0);
    for (const TableDef& t : db.schema.tables) {
      CHECK(db.data.at(t.name).size() == 5);
    }
  }
}

TEST_CASE("generated values stay inside the curated pools") {
  auto db = generate_instance(universe("company"), 3);
  const TableDef* employees = db.schema.find_table("employees");
  std::size_t dept = employees->column_index("department");
  std::size_t salary = employees->column_index("salary");
  for (const Row& row : db.data.at("employees")) {
    if (!row[dept].is_null()) {
      const std::string& d = row[dept].as_text();
      bool pooled = d == "Sales" || d == "Engineering" || d == "HR" || d == "Marketing" ||
                    d.find(' ') != std::string::npos;  // suffixed parent keys
      CHECK(pooled);
    }
    if (!row[salary].is_null()) {
      double s = row[salary].numeric();
      CHECK((s == 0.0 || s == 10.0 || s == 50.0 || s == 99.5 || s == 100.0 || s == 150.0));
    }
  }
}

TEST_CASE("perturbation is deterministic and preserves validity") {
  auto base = generate_instance(universe("commerce"), 1);
  auto p1 = perturb_instance(base, 42);
  auto p2 = perturb_instance(base, 42);
  CHECK(p1.to_json() == p2.to_json());
  CHECK(p1.to_json() != base.to_json());

  // Chains stay valid (validate throws otherwise).
  auto current = base;
  for (int k = 1; k <= 20; ++k) {
    current = perturb_instance(current, static_cast<std::uint64_t>(k));
  }
  SUCCEED("20 chained perturbations kept referential integrity");
}

TEST_CASE("strict mode requires names, positional ignores them") {
  auto a = table({"x", "y"}, {{I(1), T("a")}, {I(2), T("b")}});
  auto renamed = table({"u", "v"}, {{I(1), T("a")}, {I(2), T("b")}});
  CHECK(results_match(a, renamed, CompareMode::Positional));
  CHECK(results_match(a, renamed, CompareMode::Bag));
  CHECK_FALSE(results_match(a, renamed, CompareMode::Strict));
  CHECK(results_match(a, a, CompareMode::Strict));
}

TEST_CASE("bag mode allows row and column permutations") {
  auto a = table({"x", "y"}, {{I(1), T("a")}, {I(2), T("b")}});
  auto row_swapped = table({"x", "y"}, {{I(2), T("b")}, {I(1), T("a")}});
  CHECK_FALSE(results_match(a, row_swapped, CompareMode::Positional));
  CHECK(results_match(a, row_swapped, CompareMode::Bag));

  auto col_swapped = table({"y", "x"}, {{T("a"), I(1)}, {T("b"), I(2)}});
  CHECK_FALSE(results_match(a, col_swapped, CompareMode::Positional));
  CHECK(results_match(a, col_swapped, CompareMode::Bag));

  auto different = table({"x", "y"}, {{I(1), T("a")}, {I(3), T("b")}});
  CHECK_FALSE(results_match(a, different, CompareMode::Bag));

  // Duplicate multiplicity matters under bag semantics.
  auto twice = table({"x"}, {{I(1)}, {I(1)}});
  auto once = table({"x"}, {{I(1)}});
  CHECK_FALSE(results_match(twice, once, CompareMode::Bag));

  auto wide = table({"x", "y", "z"}, {{I(1), T("a"), I(9)}});
  CHECK_FALSE(results_match(a, wide, CompareMode::Bag));
}

TEST_CASE("bag mode distinguishes tricky column permutations") {
  // Columns have identical value multisets but only one arrangement lines up
  // row-wise; the search must backtrack rather than trust column signatures.
  auto a = table({"p", "q"}, {{I(1), I(2)}, {I(2), I(1)}});
  auto b = table({"p", "q"}, {{I(2), I(1)}, {I(1), I(2)}});
  CHECK(results_match(a, b, CompareMode::Bag));

  auto c = table({"p", "q"}, {{I(1), I(1)}, {I(2), I(2)}});
  CHECK_FALSE(results_match(a, c, CompareMode::Bag));
}

TEST_CASE("mode acceptance is nested: strict within positional within bag") {
  std::vector<ResultTable> tables;
  tables.push_back(table({"x", "y"}, {{I(1), T("a")}, {I(2), T("b")}}));
  tables.push_back(table({"x", "y"}, {{I(2), T("b")}, {I(1), T("a")}}));
  tables.push_back(table({"u", "y"}, {{I(1), T("a")}, {I(2), T("b")}}));
  tables.push_back(table({"y", "x"}, {{T("a"), I(1)}, {T("b"), I(2)}}));
  tables.push_back(table({"x", "y"}, {{I(1), T("a")}}));
  tables.push_back(table({"x"}, {{I(1)}}));
  auto ordered = table({"x", "y"}, {{I(1), T("a")}, {I(2), T("b")}});
  ordered.ordered = true;
  ordered.tie_group_sizes = {1, 1};
  tables.push_back(ordered);

  for (const auto& a : tables) {
    for (const auto& b : tables) {
      if (results_match(a, b, CompareMode::Strict)) {
        CHECK(results_match(a, b, CompareMode::Positional));
      }
      if (results_match(a, b, CompareMode::Positional)) {
        CHECK(results_match(a, b, CompareMode::Bag));
      }
      // All three are symmetric.
      CHECK(results_match(a, b, CompareMode::Strict) ==
            results_match(b, a, CompareMode::Strict));
      CHECK(results_match(a, b, CompareMode::Positional) ==
            results_match(b, a, CompareMode::Positional));
      CHECK(results_match(a, b, CompareMode::Bag) == results_match(b, a, CompareMode::Bag));
    }
  }
}

TEST_CASE("ordered results compare tie groups, not raw positions") {
  // Same bag, both ordered by a key that ties the two middle rows: the rows
  // inside a tie group may appear in either order.
  auto a = table({"n", "s"}, {{T("x"), I(1)}, {T("y"), I(5)}, {T("z"), I(5)}});
  a.ordered = true;
  a.tie_group_sizes = {1, 2};
  auto b = table({"n", "s"}, {{T("x"), I(1)}, {T("z"), I(5)}, {T("y"), I(5)}});
  b.ordered = true;
  b.tie_group_sizes = {1, 2};
  CHECK(results_match(a, b, CompareMode::Bag));
  CHECK_FALSE(results_match(a, b, CompareMode::Positional));

  // Same rows but incompatible orderings: z before y is required by c.
  auto c = table({"n", "s"}, {{T("z"), I(5)}, {T("y"), I(5)}, {T("x"), I(1)}});
  c.ordered = true;
  c.tie_group_sizes = {2, 1};
  CHECK_FALSE(results_match(a, c, CompareMode::Bag));

  // A fully pinned ordering is compatible with a coarser one when it lies
  // inside the coarser ordering's tie groups.
  auto pinned = table({"n", "s"}, {{T("x"), I(1)}, {T("y"), I(5)}, {T("z"), I(5)}});
  pinned.ordered = true;
  pinned.tie_group_sizes = {1, 1, 1};
  CHECK(results_match(a, pinned, CompareMode::Bag));

  // Ordered against unordered compares as plain bags.
  auto unordered = table({"n", "s"}, {{T("z"), I(5)}, {T("x"), I(1)}, {T("y"), I(5)}});
  CHECK(results_match(a, unordered, CompareMode::Bag));
}

TEST_CASE("differential testing confirms equivalent rewrites") {
  const Schema& commerce = universe("commerce");
  auto r = differ(
      "SELECT DISTINCT customer_name FROM customers JOIN orders "
      "ON customers.customer_id = orders.customer_id",
      "SELECT customer_name FROM customers WHERE customer_id IN "
      "(SELECT customer_id FROM orders)",
      commerce);
  CHECK(r.status == OracleStatus::EquivalentOnAllInstances);
  CHECK(r.instances_tried == 8);
  CHECK_FALSE(r.counterexample.has_value());

  const Schema& company = universe("company");
  auto w = differ("SELECT name FROM employees WHERE salary > 50 AND active = 1",
                  "SELECT name FROM employees WHERE active = 1 AND salary > 50", company);
  CHECK(w.status == OracleStatus::EquivalentOnAllInstances);
}

TEST_CASE("differential testing finds counterexamples") {
  const Schema& company = universe("company");
  auto r = differ("SELECT name FROM employees WHERE salary > 50",
                  "SELECT name FROM employees WHERE salary >= 50", company);
  REQUIRE(r.status == OracleStatus::CounterexampleFound);
  REQUIRE(r.counterexample.has_value());
  REQUIRE(r.first_result.has_value());
  REQUIRE(r.second_result.has_value());

  // The embedded instance replays: executing both queries on it reproduces
  // the mismatch.
  auto ra = execute(parse("SELECT name FROM employees WHERE salary > 50"), *r.counterexample);
  auto rb = execute(parse("SELECT name FROM employees WHERE salary >= 50"), *r.counterexample);
  CHECK_FALSE(results_match(ra, rb, CompareMode::Bag));
  CHECK(results_match(ra, *r.first_result, CompareMode::Strict));
  CHECK(results_match(rb, *r.second_result, CompareMode::Strict));
}

TEST_CASE("NULL handling differences surface as counterexamples") {
  const Schema& company = universe("company");
  // department <> 'Sales' drops NULL departments; the IS NULL variant keeps
  // them.
  auto r = differ(
      "SELECT name FROM employees WHERE department <> 'Sales'",
      "SELECT name FROM employees WHERE department <> 'Sales' OR department IS NULL",
      company);
  CHECK(r.status == OracleStatus::CounterexampleFound);

  // COUNT(*) vs COUNT(nullable column).
  auto c = differ("SELECT COUNT(*) FROM employees", "SELECT COUNT(salary) FROM employees",
                  company);
  CHECK(c.status == OracleStatus::CounterexampleFound);
}

TEST_CASE("one-sided execution failure is a counterexample") {
  const Schema& company = universe("company");
  auto r = differ("SELECT name FROM employees",
                  "SELECT wrong_column FROM employees", company);
  REQUIRE(r.status == OracleStatus::CounterexampleFound);
  CHECK(r.first_result.has_value());
  CHECK_FALSE(r.second_result.has_value());
  CHECK(r.detail.find("second query failed") != std::string::npos);

  // A data-dependent error also counts once an instance triggers it: a
  // scalar subquery over a non-unique key eventually returns two rows.
  auto s = differ(
      "SELECT dname FROM departments WHERE budget = (SELECT budget FROM departments "
      "WHERE deptno = deptno)",
      "SELECT dname FROM departments WHERE budget = budget", company,
      DifferentialConfig{0, 16, 5, CompareMode::Bag});
  CHECK(s.status == OracleStatus::CounterexampleFound);
}

TEST_CASE("both queries failing everywhere reports execution failure") {
  const Schema& company = universe("company");
  auto r = differ("SELECT nope FROM employees", "SELECT also_nope FROM employees", company);
  CHECK(r.status == OracleStatus::ExecutionFailed);
  CHECK_FALSE(r.counterexample.has_value());
  CHECK(r.instances_tried == 8);
}

TEST_CASE("UNION against UNION ALL diverges once duplicates arise") {
  const Schema& company = universe("company");
  auto r = differ(
      "SELECT department FROM employees UNION SELECT department FROM employees",
      "SELECT department FROM employees UNION ALL SELECT department FROM employees",
      company);
  CHECK(r.status == OracleStatus::CounterexampleFound);
}

TEST_CASE("ordering differences only matter when both queries order") {
  const Schema& company = universe("company");
  // Same rows, one ordered: not a counterexample under bag comparison.
  auto r = differ("SELECT name FROM employees ORDER BY salary",
                  "SELECT name FROM employees", company);
  CHECK(r.status == OracleStatus::EquivalentOnAllInstances);

  // Opposite orderings on real data diverge.
  auto o = differ("SELECT name, salary FROM employees ORDER BY salary",
                  "SELECT name, salary FROM employees ORDER BY salary DESC", company);
  CHECK(o.status == OracleStatus::CounterexampleFound);

  // DESC on a column equals ASC on its negation (floats include 0, and the
  // comparison treats -0.0 as equal to 0.0); NULLs sort last either way.
  auto n = differ("SELECT name, salary FROM employees ORDER BY salary DESC",
                  "SELECT name, salary FROM employees ORDER BY salary * -1", company);
  CHECK(n.status == OracleStatus::EquivalentOnAllInstances);
}

TEST_CASE("differential verdicts are seed-stable") {
  const Schema& school = universe("school");
  auto a = differ("SELECT student_name FROM students WHERE gpa > 50",
                  "SELECT student_name FROM students WHERE gpa > 50.0", school);
  auto b = differ("SELECT student_name FROM students WHERE gpa > 50",
                  "SELECT student_name FROM students WHERE gpa > 50.0", school);
  CHECK(a.status == OracleStatus::EquivalentOnAllInstances);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("oracle report serializes to JSON") {
  const Schema& company = universe("company");
  auto r = differ("SELECT COUNT(*) FROM employees", "SELECT COUNT(salary) FROM employees",
                  company);
  std::string json = r.to_json();
  CHECK(json.find("counterexample_found") != std::string::npos);
  CHECK(json.find("\"counterexample\"") != std::string::npos);
  CHECK(json.find("\"first_result\"") != std::string::npos);
}
