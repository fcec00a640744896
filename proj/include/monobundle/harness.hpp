#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "monobundle/audit.hpp"
#include "monobundle/problems.hpp"
#include "monobundle/solver.hpp"

namespace monobundle {

class BaselineUnavailable : public std::runtime_error {
 public:
  explicit BaselineUnavailable(const std::string& what) : std::runtime_error(what) {}
};

/// Exact proximal point iteration x^{t+1} = (I + cT)^{-1} x^t from
/// problem.x0. Returns x^0 .. x^iters. Throws BaselineUnavailable when the
/// operator has no closed-form resolvent.
std::vector<Vector> run_ppa_baseline(const ProblemInstance& problem, double c, int iters);

struct SolverVariant {
  enum class Method { Bundle, Ppa };
  std::string name;
  Method method = Method::Bundle;
  SolverConfig config;  // bundle only; x0 comes from the problem
  double ppa_c = 1.0;
  int ppa_iters = 500;
};

struct SuiteConfig {
  std::vector<ProblemInstance> problems;
  std::vector<SolverVariant> variants;
  AuditOptions audit;
  unsigned workers = 0;  // 0: hardware concurrency
};

// Throws ConfigError with a JSON-pointer location on any malformed entry.
SuiteConfig parse_suite_config(const nlohmann::json& j, const std::string& source);
SuiteConfig load_suite_config(const std::string& path);

struct RunArtifact {
  std::string problem;
  std::string variant;
  SolverVariant::Method method = SolverVariant::Method::Bundle;
  SolveReport report;                 // bundle runs
  std::vector<Vector> ppa_trajectory;  // baseline runs
  std::vector<AuditEntry> audit;
  double wall_seconds = 0.0;
  std::string error;  // baseline declined, solver threw, ...
};

struct SummaryRow {
  std::string problem;
  std::string method;
  std::string status;
  int serious_steps = 0;
  std::int64_t oracle_calls = 0;
  double final_distance = std::numeric_limits<double>::quiet_NaN();
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  double baseline_gap = std::numeric_limits<double>::quiet_NaN();
  bool invariants_pass = true;
};

struct SuiteResult {
  std::vector<RunArtifact> runs;
  std::vector<SummaryRow> rows;
  int exit_code = 0;
  std::string failure;  // first failing run / invariant
};

// Runs every problem under every variant, writes one trace and one artifact
// per run plus summary.ndjson / summary.txt into out_dir.
SuiteResult run_suite(const SuiteConfig& config, const std::filesystem::path& out_dir);

// CLI entry point: 0 all good, 1 audit or convergence failure, 2 config error.
int run_suite(const std::string& suite_config_path, const std::string& output_dir);

std::string format_summary_table(const std::vector<SummaryRow>& rows);
std::string format_audit_table(const std::vector<AuditEntry>& audit);

}  // namespace monobundle
