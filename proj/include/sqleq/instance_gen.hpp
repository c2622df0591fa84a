#pragma once

#include <cstdint>

#include "sqleq/schema.hpp"

namespace sqleq {

struct InstanceGenConfig {
  int rows_per_table = 5;
  double null_probability = 0.1;      // per non-key nullable cell
  double fk_match_probability = 0.8;  // foreign keys otherwise stay NULL
};

// Deterministically fills a schema with rows drawn from small curated value
// pools (so equality predicates and joins hit often). Primary keys are
// unique, foreign keys reference existing parent rows or are NULL, and other
// cells go NULL with a small probability. The same seed always produces the
// same instance.
DatabaseInstance generate_instance(const Schema& schema, std::uint64_t seed,
                                   const InstanceGenConfig& config = {});

// Applies one to three random mutations (insert a row, delete a row and
// null out references to it, or rewrite a non-key cell) while keeping the
// instance valid. Deterministic in (base, seed).
DatabaseInstance perturb_instance(const DatabaseInstance& base, std::uint64_t seed);

}  // namespace sqleq
