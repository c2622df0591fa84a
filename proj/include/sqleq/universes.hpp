#pragma once

#include <string>
#include <vector>

#include "sqleq/schema.hpp"

namespace sqleq {

// Built-in parent/child schema pairs used by the synthetic dataset generator
// and the test fixtures. Each parent's primary key is a display-name text
// column so that joining on it and projecting it are interchangeable.
//   company:    departments(dname PK) / employees
//   commerce:   customers(customer_name PK) / orders
//   inventory:  products(product_id PK)  / sales
//   school:     students(student_name PK) / enrollments
const std::vector<std::string>& universe_names();

// Throws InputFormatError for an unknown name.
const Schema& universe(const std::string& name);

}  // namespace sqleq
