#include "sqleq/oracle.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "sqleq/errors.hpp"
#include "sqleq/execute.hpp"

namespace sqleq {

namespace {

using ColumnMap = std::vector<std::size_t>;  // b column index for each a column

bool rows_equal_mapped(const Row& a, const Row& b, const ColumnMap& map) {
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!same_value(a[i], b[map[i]])) return false;
  }
  return true;
}

// Multiset equality of two row spans under a column mapping.
bool bags_equal(const std::vector<const Row*>& a, const std::vector<const Row*>& b,
                const ColumnMap& map) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Row* ra : a) {
    bool matched = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      if (rows_equal_mapped(*ra, *b[j], map)) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

std::vector<const Row*> row_pointers(const ResultTable& t) {
  std::vector<const Row*> out;
  out.reserve(t.rows.size());
  for (const Row& row : t.rows) out.push_back(&row);
  return out;
}

// Tie groups as row-pointer spans; a missing/shorter tie vector treats the
// remainder as one group.
std::vector<std::vector<const Row*>> groups_of(const ResultTable& t) {
  std::vector<std::vector<const Row*>> groups;
  std::size_t at = 0;
  for (std::size_t size : t.tie_group_sizes) {
    std::vector<const Row*> group;
    for (std::size_t i = 0; i < size && at < t.rows.size(); ++i) group.push_back(&t.rows[at++]);
    if (!group.empty()) groups.push_back(std::move(group));
  }
  if (at < t.rows.size()) {
    std::vector<const Row*> rest;
    while (at < t.rows.size()) rest.push_back(&t.rows[at++]);
    groups.push_back(std::move(rest));
  }
  return groups;
}

// Decides whether two ordered results could have been printed as the same
// sequence: walk both group lists, always emitting a row available in the
// current group of each side. An exchange argument shows that any pick from
// the intersection preserves completability, so no backtracking is needed.
bool orders_compatible(const ResultTable& a, const ResultTable& b, const ColumnMap& map) {
  auto ga = groups_of(a);
  auto gb = groups_of(b);
  std::size_t ia = 0, ib = 0;
  std::vector<const Row*> avail_a, avail_b;
  std::size_t remaining = a.rows.size();
  while (remaining > 0) {
    if (avail_a.empty() && ia < ga.size()) avail_a = ga[ia++];
    if (avail_b.empty() && ib < gb.size()) avail_b = gb[ib++];
    bool emitted = false;
    for (std::size_t i = 0; i < avail_a.size() && !emitted; ++i) {
      for (std::size_t j = 0; j < avail_b.size(); ++j) {
        if (rows_equal_mapped(*avail_a[i], *avail_b[j], map)) {
          avail_a.erase(avail_a.begin() + static_cast<std::ptrdiff_t>(i));
          avail_b.erase(avail_b.begin() + static_cast<std::ptrdiff_t>(j));
          --remaining;
          emitted = true;
          break;
        }
      }
    }
    if (!emitted) return false;
  }
  return true;
}

bool rows_match_under(const ResultTable& a, const ResultTable& b, const ColumnMap& map) {
  if (a.ordered && b.ordered) {
    std::vector<const Row*> pa = row_pointers(a), pb = row_pointers(b);
    if (!bags_equal(pa, pb, map)) return false;
    return orders_compatible(a, b, map);
  }
  // When only one side is ordered the ordering is extra information, not a
  // difference: compare as bags.
  return bags_equal(row_pointers(a), row_pointers(b), map);
}

// Column signature: multiset of the column's values, used to prune mappings.
bool columns_could_map(const ResultTable& a, std::size_t ca, const ResultTable& b,
                       std::size_t cb) {
  std::vector<bool> used(b.rows.size(), false);
  for (const Row& ra : a.rows) {
    bool matched = false;
    for (std::size_t j = 0; j < b.rows.size(); ++j) {
      if (used[j]) continue;
      if (same_value(ra[ca], b.rows[j][cb])) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

bool search_mapping(const ResultTable& a, const ResultTable& b, ColumnMap& map,
                    std::vector<bool>& taken, std::size_t column) {
  if (column == map.size()) return rows_match_under(a, b, map);
  for (std::size_t j = 0; j < map.size(); ++j) {
    if (taken[j]) continue;
    if (!columns_could_map(a, column, b, j)) continue;
    map[column] = j;
    taken[j] = true;
    if (search_mapping(a, b, map, taken, column + 1)) return true;
    taken[j] = false;
  }
  return false;
}

std::optional<std::string> bag_mismatch(const ResultTable& a, const ResultTable& b) {
  ColumnMap identity(a.columns.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  if (rows_match_under(a, b, identity)) return std::nullopt;
  ColumnMap map(a.columns.size(), 0);
  std::vector<bool> taken(a.columns.size(), false);
  if (search_mapping(a, b, map, taken, 0)) return std::nullopt;
  if (a.rows.size() != b.rows.size()) {
    return "row counts differ: " + std::to_string(a.rows.size()) + " vs " +
           std::to_string(b.rows.size());
  }
  return "no column arrangement makes the row bags" +
         std::string(a.ordered && b.ordered ? " and orderings" : "") + " agree";
}

}  // namespace

const char* to_string(CompareMode mode) {
  switch (mode) {
    case CompareMode::Strict: return "strict";
    case CompareMode::Positional: return "positional";
    case CompareMode::Bag: return "bag";
  }
  return "?";
}

std::optional<CompareMode> compare_mode_from_string(const std::string& name) {
  if (name == "strict") return CompareMode::Strict;
  if (name == "positional") return CompareMode::Positional;
  if (name == "bag") return CompareMode::Bag;
  return std::nullopt;
}

const char* to_string(OracleStatus status) {
  switch (status) {
    case OracleStatus::EquivalentOnAllInstances: return "equivalent_on_all_instances";
    case OracleStatus::CounterexampleFound: return "counterexample_found";
    case OracleStatus::ExecutionFailed: return "execution_failed";
  }
  return "?";
}

std::optional<std::string> results_mismatch(const ResultTable& a, const ResultTable& b,
                                            CompareMode mode) {
  if (a.columns.size() != b.columns.size()) {
    return "column counts differ: " + std::to_string(a.columns.size()) + " vs " +
           std::to_string(b.columns.size());
  }
  if (mode == CompareMode::Strict) {
    for (std::size_t i = 0; i < a.columns.size(); ++i) {
      if (a.columns[i] != b.columns[i]) {
        return "column " + std::to_string(i + 1) + " named '" + a.columns[i] + "' vs '" +
               b.columns[i] + "'";
      }
    }
  }
  if (mode == CompareMode::Strict || mode == CompareMode::Positional) {
    if (a.rows.size() != b.rows.size()) {
      return "row counts differ: " + std::to_string(a.rows.size()) + " vs " +
             std::to_string(b.rows.size());
    }
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      for (std::size_t c = 0; c < a.columns.size(); ++c) {
        if (!same_value(a.rows[r][c], b.rows[r][c])) {
          return "row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                 ": " + a.rows[r][c].to_text() + " vs " + b.rows[r][c].to_text();
        }
      }
    }
    return std::nullopt;
  }
  return bag_mismatch(a, b);
}

bool results_match(const ResultTable& a, const ResultTable& b, CompareMode mode) {
  return !results_mismatch(a, b, mode).has_value();
}

std::string OracleReport::to_json() const {
  nlohmann::ordered_json j;
  j["status"] = to_string(status);
  j["instances_tried"] = instances_tried;
  j["detail"] = detail;
  if (counterexample) {
    j["counterexample"] = nlohmann::ordered_json::parse(counterexample->to_json());
  }
  if (first_result) j["first_result"] = nlohmann::ordered_json::parse(first_result->to_json());
  if (second_result) j["second_result"] = nlohmann::ordered_json::parse(second_result->to_json());
  return j.dump(2);
}

OracleReport differential_test(const SelectStmt& first, const SelectStmt& second,
                               const Schema& schema, const DifferentialConfig& config) {
  OracleReport report;
  InstanceGenConfig gen;
  gen.rows_per_table = config.rows_per_table;

  DatabaseInstance instance = generate_instance(schema, config.seed, gen);
  int informative = 0;
  std::string last_error;
  for (int k = 0; k < config.instances; ++k) {
    if (k > 0) instance = perturb_instance(instance, config.seed + static_cast<std::uint64_t>(k));
    ++report.instances_tried;

    std::optional<ResultTable> ra, rb;
    std::string error_a, error_b;
    try {
      ra = execute(first, instance);
    } catch (const ExecError& e) {
      error_a = e.what();
    }
    try {
      rb = execute(second, instance);
    } catch (const ExecError& e) {
      error_b = e.what();
    }

    if (ra && rb) {
      ++informative;
      std::optional<std::string> mismatch = results_mismatch(*ra, *rb, config.mode);
      if (mismatch) {
        report.status = OracleStatus::CounterexampleFound;
        report.counterexample = instance;
        report.first_result = std::move(ra);
        report.second_result = std::move(rb);
        report.detail = *mismatch;
        return report;
      }
    } else if (ra.has_value() != rb.has_value()) {
      // One side executed, the other failed: observable divergence.
      report.status = OracleStatus::CounterexampleFound;
      report.counterexample = instance;
      report.first_result = std::move(ra);
      report.second_result = std::move(rb);
      report.detail = ra ? "second query failed: " + error_b
                         : "first query failed: " + error_a;
      return report;
    } else {
      // Both failed: nothing to compare on this instance.
      last_error = "first: " + error_a + "; second: " + error_b;
    }
  }

  if (informative == 0) {
    report.status = OracleStatus::ExecutionFailed;
    report.detail = "both queries failed on every instance; " + last_error;
  } else {
    report.status = OracleStatus::EquivalentOnAllInstances;
    report.detail = "outputs matched on " + std::to_string(informative) + " of " +
                    std::to_string(report.instances_tried) + " instances";
  }
  return report;
}

}  // namespace sqleq
