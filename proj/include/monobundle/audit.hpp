#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "monobundle/problems.hpp"
#include "monobundle/solver.hpp"

namespace monobundle {

// One audited invariant. `worst_margin` is the smallest slack observed
// (tolerance included); pass iff every check had nonnegative slack, or
// strictly positive slack for strict inequalities.
struct AuditEntry {
  std::string name;
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::int64_t checks = 0;
  std::string detail;
};

struct AuditOptions {
  int certificate_samples = 1000;
  std::uint64_t seed = 0;
};

// Every name returned here appears exactly once, in this order, in the
// result of audit_run.
const std::vector<std::string>& audit_invariant_names();

/// Re-checks a finished run against the operator: replays the bundle from
/// the records, recomputes the reduced index sets, and verifies every
/// per-iteration inequality plus the run-level properties (Fejer decrease
/// and boundedness when a solution is known, certificate membership, growth
/// of j).
std::vector<AuditEntry> audit_run(const ProblemInstance& problem, const SolverConfig& config,
                                  const SolveReport& report, const AuditOptions& opts = {});

bool all_pass(const std::vector<AuditEntry>& audit);
const AuditEntry* first_failure(const std::vector<AuditEntry>& audit);

}  // namespace monobundle
