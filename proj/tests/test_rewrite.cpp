#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include "sqleq/errors.hpp"
#include "sqleq/matcher.hpp"
#include "sqleq/oracle.hpp"
#include "sqleq/parse.hpp"
#include "sqleq/render.hpp"
#include "sqleq/rewrite.hpp"
#include "sqleq/universes.hpp"

using namespace sqleq;

namespace {

RewriteReport rewrite_sql(const std::string& sql) { return rewrite_subqueries(parse(sql)); }

std::string rewritten_text(const std::string& sql) {
  return render(rewrite_sql(sql).statement);
}

bool applied(const RewriteReport& report, const std::string& rule) {
  return std::count(report.rules_applied.begin(), report.rules_applied.end(), rule) > 0;
}

bool skipped(const RewriteReport& report, const std::string& reason) {
  return std::count(report.skipped.begin(), report.skipped.end(), reason) > 0;
}

// The rewrite must never change what the query returns (as a set for the
// DISTINCT-introducing rules, which the bag-mode oracle only observes when
// duplicates arise; these fixtures keep outer rows unique).
void expect_equivalent(const Schema& schema, const std::string& sql) {
  RewriteReport report = rewrite_sql(sql);
  REQUIRE_FALSE(report.unchanged);
  std::string after = render(report.statement);
  DifferentialConfig config;
  config.instances = 16;
  OracleReport oracle = differential_test(parse(sql), report.statement, schema, config);
  INFO("before: " << sql);
  INFO("after:  " << after);
  INFO(oracle.detail);
  REQUIRE(oracle.status == OracleStatus::EquivalentOnAllInstances);
}

}  // namespace

TEST_CASE("uncorrelated IN flattens to an inner join with DISTINCT") {
  RewriteReport report = rewrite_sql(
      "SELECT customer_name FROM customers WHERE customer_id IN "
      "(SELECT customer_id FROM orders)");
  REQUIRE(applied(report, "in_to_join"));
  REQUIRE_FALSE(report.unchanged);
  std::string text = render(report.statement);
  REQUIRE(text ==
          "SELECT DISTINCT customers.customer_name FROM customers JOIN orders AS sq1 "
          "ON customers.customer_id = sq1.customer_id");

  // Same shape as writing the join by hand, up to aliasing.
  MatchConfig config;
  MatchOutcome outcome = exact_set_match(
      report.statement,
      parse("SELECT DISTINCT customers.customer_name FROM customers JOIN orders "
            "ON customers.customer_id = orders.customer_id"),
      config);
  REQUIRE(outcome.matched);
}

TEST_CASE("IN subquery WHERE clause folds into the join condition") {
  std::string text = rewritten_text(
      "SELECT name FROM employees WHERE department IN "
      "(SELECT dname FROM departments WHERE budget > 100)");
  REQUIRE(text ==
          "SELECT DISTINCT employees.name FROM employees JOIN departments AS sq1 "
          "ON employees.department = sq1.dname AND sq1.budget > 100");
}

TEST_CASE("aggregated IN subquery joins as a derived table") {
  RewriteReport report = rewrite_sql(
      "SELECT product_name FROM products WHERE product_id IN "
      "(SELECT product_id FROM sales GROUP BY product_id HAVING SUM(amount) > 100)");
  REQUIRE(applied(report, "in_to_join"));
  std::string text = render(report.statement);
  REQUIRE(text ==
          "SELECT DISTINCT products.product_name FROM products JOIN "
          "(SELECT product_id FROM sales GROUP BY product_id HAVING SUM(amount) > 100) AS sq1 "
          "ON products.product_id = sq1.product_id");
}

TEST_CASE("correlated EXISTS becomes an inner join carrying every conjunct") {
  RewriteReport report = rewrite_sql(
      "SELECT customer_name FROM customers c WHERE EXISTS "
      "(SELECT 1 FROM orders o WHERE o.customer_id = c.customer_id AND o.amount > 50)");
  REQUIRE(applied(report, "exists_to_join"));
  std::string text = render(report.statement);
  REQUIRE(text ==
          "SELECT DISTINCT c.customer_name FROM customers AS c JOIN orders AS sq1 "
          "ON sq1.customer_id = c.customer_id AND sq1.amount > 50");
}

TEST_CASE("correlated scalar aggregate moves to a grouped LEFT JOIN") {
  RewriteReport report = rewrite_sql(
      "SELECT d.dname, (SELECT SUM(e.salary) FROM employees e WHERE e.department = d.dname) "
      "AS total FROM departments d");
  REQUIRE(applied(report, "scalar_agg_to_join"));
  std::string text = render(report.statement);
  REQUIRE(text ==
          "SELECT d.dname, sq1.v AS total FROM departments AS d LEFT JOIN "
          "(SELECT e.department AS k, SUM(e.salary) AS v FROM employees AS e "
          "GROUP BY e.department) AS sq1 ON sq1.k = d.dname");
}

TEST_CASE("scalar rewrite keeps purely local filters inside the derived table") {
  std::string text = rewritten_text(
      "SELECT d.dname, (SELECT AVG(e.salary) FROM employees e "
      "WHERE d.dname = e.department AND e.active = 1) FROM departments d");
  REQUIRE(text ==
          "SELECT d.dname, sq1.v FROM departments AS d LEFT JOIN "
          "(SELECT e.department AS k, AVG(e.salary) AS v FROM employees AS e "
          "WHERE e.active = 1 GROUP BY e.department) AS sq1 ON sq1.k = d.dname");
}

TEST_CASE("rewrites are idempotent") {
  const std::vector<std::string> queries = {
      "SELECT customer_name FROM customers WHERE customer_id IN "
      "(SELECT customer_id FROM orders)",
      "SELECT customer_name FROM customers c WHERE EXISTS "
      "(SELECT 1 FROM orders o WHERE o.customer_id = c.customer_id)",
      "SELECT d.dname, (SELECT MAX(e.salary) FROM employees e WHERE e.department = d.dname) "
      "FROM departments d",
      "SELECT product_name FROM products WHERE product_id IN "
      "(SELECT product_id FROM sales GROUP BY product_id HAVING COUNT(*) > 1)",
  };
  for (const auto& sql : queries) {
    RewriteReport first = rewrite_sql(sql);
    REQUIRE_FALSE(first.unchanged);
    RewriteReport second = rewrite_subqueries(first.statement);
    INFO(sql);
    REQUIRE(second.unchanged);
    REQUIRE(second.rules_applied.empty());
    REQUIRE(render(second.statement) ==
            render(first.statement));
  }
}

TEST_CASE("NOT IN is never rewritten") {
  RewriteReport report = rewrite_sql(
      "SELECT name FROM employees WHERE department NOT IN "
      "(SELECT dname FROM departments)");
  REQUIRE(report.unchanged);
  REQUIRE(report.rules_applied.empty());
  REQUIRE(skipped(report, "not_in"));
  REQUIRE(render(report.statement) ==
          render(parse("SELECT name FROM employees WHERE department NOT IN "
                       "(SELECT dname FROM departments)")));
}

TEST_CASE("other recognized-but-unsafe shapes are skipped, not rewritten") {
  SECTION("NOT EXISTS") {
    RewriteReport report = rewrite_sql(
        "SELECT customer_name FROM customers c WHERE NOT EXISTS "
        "(SELECT 1 FROM orders o WHERE o.customer_id = c.customer_id)");
    REQUIRE(report.unchanged);
    REQUIRE(skipped(report, "not_exists"));
  }
  SECTION("correlated IN") {
    RewriteReport report = rewrite_sql(
        "SELECT name FROM employees e WHERE salary IN "
        "(SELECT budget FROM departments d WHERE d.dname = e.department)");
    REQUIRE(report.unchanged);
    REQUIRE(skipped(report, "correlated_in"));
  }
  SECTION("COUNT scalar subquery: empty group yields 0, unmatched join yields NULL") {
    RewriteReport report = rewrite_sql(
        "SELECT d.dname, (SELECT COUNT(*) FROM employees e WHERE e.department = d.dname) "
        "FROM departments d");
    REQUIRE(report.unchanged);
    REQUIRE(skipped(report, "count_scalar"));
  }
  SECTION("scalar comparison in WHERE") {
    RewriteReport report = rewrite_sql(
        "SELECT name FROM employees WHERE salary > "
        "(SELECT AVG(salary) FROM employees)");
    REQUIRE(report.unchanged);
    REQUIRE(skipped(report, "scalar_comparison"));
  }
  SECTION("IN under grouping would distort aggregates") {
    RewriteReport report = rewrite_sql(
        "SELECT department, COUNT(*) FROM employees WHERE department IN "
        "(SELECT dname FROM departments) GROUP BY department");
    REQUIRE(report.unchanged);
    REQUIRE(skipped(report, "in_under_grouping"));
  }
}

TEST_CASE("out-of-ruleset subquery positions are rejected") {
  SECTION("nested deeper than two levels") {
    REQUIRE_THROWS_AS(
        rewrite_sql("SELECT name FROM employees WHERE department IN "
                    "(SELECT dname FROM departments WHERE budget IN "
                    "(SELECT salary FROM employees WHERE emp_id IN "
                    "(SELECT deptno FROM departments)))"),
        UnsupportedSubquery);
  }
  SECTION("subquery inside arithmetic in the projection") {
    REQUIRE_THROWS_AS(
        rewrite_sql("SELECT (SELECT MAX(salary) FROM employees) + 1 FROM departments"),
        UnsupportedSubquery);
  }
  SECTION("subquery under OR cannot become an inner join") {
    REQUIRE_THROWS_AS(
        rewrite_sql("SELECT name FROM employees WHERE active = 1 OR department IN "
                    "(SELECT dname FROM departments)"),
        UnsupportedSubquery);
  }
  SECTION("subquery in HAVING") {
    REQUIRE_THROWS_AS(
        rewrite_sql("SELECT department FROM employees GROUP BY department "
                    "HAVING COUNT(*) > (SELECT MIN(deptno) FROM departments)"),
        UnsupportedSubquery);
  }
  SECTION("subquery in ORDER BY") {
    REQUIRE_THROWS_AS(
        rewrite_sql("SELECT name FROM employees ORDER BY "
                    "(SELECT MAX(budget) FROM departments)"),
        UnsupportedSubquery);
  }
}

TEST_CASE("queries without subqueries pass through unchanged") {
  const std::string sql =
      "SELECT department, SUM(salary) FROM employees WHERE active = 1 "
      "GROUP BY department HAVING COUNT(*) > 1 ORDER BY 2 DESC LIMIT 3";
  RewriteReport report = rewrite_sql(sql);
  REQUIRE(report.unchanged);
  REQUIRE(report.rules_applied.empty());
  REQUIRE(report.skipped.empty());
  REQUIRE(render(report.statement) ==
          render(parse(sql)));
}

TEST_CASE("rewrite recurses into derived tables and union arms") {
  RewriteReport report = rewrite_sql(
      "SELECT city FROM (SELECT city FROM customers WHERE customer_id IN "
      "(SELECT customer_id FROM orders)) t "
      "UNION SELECT region FROM sales WHERE product_id IN "
      "(SELECT product_id FROM products)");
  REQUIRE(std::count(report.rules_applied.begin(), report.rules_applied.end(),
                     "in_to_join") == 2);
  REQUIRE_FALSE(report.unchanged);
  // Fresh aliases never collide across the statement.
  std::string text = render(report.statement);
  REQUIRE(text.find("sq1") != std::string::npos);
  REQUIRE(text.find("sq2") != std::string::npos);
}

TEST_CASE("fresh aliases avoid names already used in the query") {
  std::string text = rewritten_text(
      "SELECT customer_name FROM customers sq1 WHERE customer_id IN "
      "(SELECT customer_id FROM orders)");
  REQUIRE(text.find("AS sq2") != std::string::npos);
}

TEST_CASE("multi-item FROM attaches the join as a comma source with WHERE conditions") {
  RewriteReport report = rewrite_sql(
      "SELECT e.name, d.budget FROM employees e, departments d "
      "WHERE e.department = d.dname AND e.emp_id IN (SELECT deptno FROM departments)");
  REQUIRE(applied(report, "in_to_join"));
  std::string text = render(report.statement);
  REQUIRE(text ==
          "SELECT DISTINCT e.name, d.budget FROM employees AS e, departments AS d, "
          "departments AS sq1 WHERE e.department = d.dname AND e.emp_id = sq1.deptno");
}

TEST_CASE("rewritten queries stay equivalent under differential testing") {
  const Schema& commerce = universe("commerce");
  const Schema& company = universe("company");

  expect_equivalent(commerce,
                    "SELECT customer_name FROM customers WHERE customer_id IN "
                    "(SELECT customer_id FROM orders)");
  expect_equivalent(commerce,
                    "SELECT customer_name FROM customers WHERE customer_id IN "
                    "(SELECT customer_id FROM orders WHERE amount > 50)");
  expect_equivalent(commerce,
                    "SELECT customer_name FROM customers c WHERE EXISTS "
                    "(SELECT 1 FROM orders o WHERE o.customer_id = c.customer_id)");
  expect_equivalent(commerce,
                    "SELECT c.customer_name, "
                    "(SELECT SUM(o.amount) FROM orders o WHERE o.customer_id = c.customer_id) "
                    "FROM customers c");
  expect_equivalent(commerce,
                    "SELECT c.customer_name, "
                    "(SELECT MIN(o.amount) FROM orders o "
                    "WHERE o.customer_id = c.customer_id AND o.amount > 20) "
                    "FROM customers c");
  expect_equivalent(company,
                    "SELECT dname FROM departments WHERE dname IN "
                    "(SELECT department FROM employees GROUP BY department "
                    "HAVING COUNT(*) > 1)");
  expect_equivalent(company,
                    "SELECT dname FROM departments WHERE dname IN "
                    "(SELECT department FROM employees UNION SELECT dname FROM departments)");
}

TEST_CASE("rewrite report lists applications in document order") {
  RewriteReport report = rewrite_sql(
      "SELECT c.customer_name, "
      "(SELECT MAX(o.amount) FROM orders o WHERE o.customer_id = c.customer_id) "
      "FROM customers c WHERE EXISTS "
      "(SELECT 1 FROM orders o2 WHERE o2.customer_id = c.customer_id)");
  REQUIRE(report.rules_applied ==
          std::vector<std::string>{"exists_to_join", "scalar_agg_to_join"});
}
