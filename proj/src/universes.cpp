#include "sqleq/universes.hpp"

#include <map>

#include "sqleq/errors.hpp"

namespace sqleq {

namespace {

Schema make_company() {
  Schema s;
  s.tables = {
      TableDef{"departments",
               {{"dname", ColumnType::Text},
                {"deptno", ColumnType::Int},
                {"budget", ColumnType::Float}},
               "dname",
               {}},
      TableDef{"employees",
               {{"emp_id", ColumnType::Int},
                {"name", ColumnType::Text},
                {"department", ColumnType::Text},
                {"salary", ColumnType::Float},
                {"hire_date", ColumnType::Date},
                {"active", ColumnType::Int},
                {"job_title", ColumnType::Text}},
               "emp_id",
               {{"department", "departments", "dname"}}},
  };
  s.validate();
  return s;
}

Schema make_commerce() {
  Schema s;
  s.tables = {
      TableDef{"customers",
               {{"customer_name", ColumnType::Text},
                {"customer_id", ColumnType::Int},
                {"city", ColumnType::Text}},
               "customer_name",
               {}},
      TableDef{"orders",
               {{"order_id", ColumnType::Int},
                {"customer_id", ColumnType::Int},
                {"amount", ColumnType::Float},
                {"order_date", ColumnType::Date},
                {"status", ColumnType::Text}},
               "order_id",
               {{"customer_id", "customers", "customer_id"}}},
  };
  s.validate();
  return s;
}

Schema make_inventory() {
  Schema s;
  s.tables = {
      TableDef{"products",
               {{"product_id", ColumnType::Int},
                {"product_name", ColumnType::Text},
                {"category", ColumnType::Text},
                {"price", ColumnType::Float},
                {"stock", ColumnType::Int}},
               "product_id",
               {}},
      TableDef{"sales",
               {{"sale_id", ColumnType::Int},
                {"product_id", ColumnType::Int},
                {"amount", ColumnType::Float},
                {"sale_date", ColumnType::Date},
                {"region", ColumnType::Text}},
               "sale_id",
               {{"product_id", "products", "product_id"}}},
  };
  s.validate();
  return s;
}

Schema make_school() {
  Schema s;
  s.tables = {
      TableDef{"students",
               {{"student_name", ColumnType::Text},
                {"student_id", ColumnType::Int},
                {"major", ColumnType::Text},
                {"gpa", ColumnType::Float}},
               "student_name",
               {}},
      TableDef{"enrollments",
               {{"enroll_id", ColumnType::Int},
                {"student_id", ColumnType::Int},
                {"course", ColumnType::Text},
                {"grade", ColumnType::Float},
                {"enroll_date", ColumnType::Date}},
               "enroll_id",
               {{"student_id", "students", "student_id"}}},
  };
  s.validate();
  return s;
}

}  // namespace

const std::vector<std::string>& universe_names() {
  static const std::vector<std::string> names = {"company", "commerce", "inventory", "school"};
  return names;
}

const Schema& universe(const std::string& name) {
  static const std::map<std::string, Schema> all = {
      {"company", make_company()},
      {"commerce", make_commerce()},
      {"inventory", make_inventory()},
      {"school", make_school()},
  };
  auto it = all.find(name);
  if (it == all.end()) {
    throw InputFormatError("universe", 0, "unknown schema universe: " + name);
  }
  return it->second;
}

}  // namespace sqleq
