// monobundle: command-line front end.
//
//   monobundle solve    --problem diag10 --trace-out run.ndjson
//   monobundle baseline --problem skew2 --c 1 --iters 200
//   monobundle suite    --config configs/acceptance.json --out results/
//   monobundle audit    --trace run.ndjson

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "monobundle/audit.hpp"
#include "monobundle/harness.hpp"
#include "monobundle/trace.hpp"

using namespace monobundle;

namespace {

void print_vector(const char* label, const Vector& v) {
  std::printf("%s [", label);
  for (Eigen::Index i = 0; i < v.size(); ++i) std::printf(i ? ", %.17g" : "%.17g", v[i]);
  std::printf("]\n");
}

int cmd_solve(const std::string& problem_name, std::uint64_t seed, SolverConfig cfg,
              const std::string& lambda_rule, const std::string& trace_out, bool audit) {
  const ProblemInstance problem = load_problem(problem_name, seed);
  auto rule = parse_lambda_rule(lambda_rule);
  if (!rule) {
    std::cerr << "unknown --lambda-rule '" << lambda_rule << "'\n";
    return 2;
  }
  cfg.lambda_rule = *rule;
  cfg.x0 = problem.x0;
  const SolveReport rep = solve(problem.spec, cfg);
  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    if (!out) {
      std::cerr << "cannot write " << trace_out << '\n';
      return 2;
    }
    write_trace(out, problem, cfg, rep);
  }
  std::printf("problem       %s\n", problem.name.c_str());
  std::printf("status        %s%s%s\n", to_string(rep.status), rep.message.empty() ? "" : "  # ",
              rep.message.c_str());
  std::printf("serious steps %d\n", rep.serious_steps);
  std::printf("oracle calls  %lld\n", static_cast<long long>(rep.oracle_calls));
  std::printf("bundle size   %zu\n", rep.bundle_size_final);
  print_vector("x_final      ", rep.x_final);
  if (problem.known_solution) {
    std::printf("distance      %.6e\n", (rep.x_final - *problem.known_solution).norm());
  }
  std::printf("residual      %.6e\n", eval_oracle(problem.spec, rep.x_final).norm());
  if (rep.certificate) {
    std::printf("certificate   j=%d |s|=%.6e eps=%.6e\n", rep.certificate_j, rep.certificate->uhat.norm(),
                rep.certificate->epshat);
  }
  bool ok = rep.status != Status::MaxIterations;
  if (audit) {
    const auto entries = audit_run(problem, cfg, rep);
    std::printf("\n%s", format_audit_table(entries).c_str());
    ok = ok && all_pass(entries);
  }
  return ok ? 0 : 1;
}

int cmd_baseline(const std::string& problem_name, std::uint64_t seed, double c, int iters, bool all) {
  const ProblemInstance problem = load_problem(problem_name, seed);
  std::vector<Vector> traj;
  try {
    traj = run_ppa_baseline(problem, c, iters);
  } catch (const BaselineUnavailable& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  if (all) {
    for (std::size_t t = 0; t < traj.size(); ++t) {
      char label[32];
      std::snprintf(label, sizeof label, "x[%zu]", t);
      print_vector(label, traj[t]);
    }
  } else {
    print_vector("x_final", traj.back());
  }
  if (problem.known_solution) {
    std::printf("distance %.6e\n", (traj.back() - *problem.known_solution).norm());
  }
  return 0;
}

int cmd_audit(const std::string& path, int samples) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << '\n';
    return 2;
  }
  LoadedTrace t = read_trace(in);
  AuditOptions opts;
  opts.certificate_samples = samples;
  const auto entries = audit_run(t.problem, t.config, t.report, opts);
  std::printf("%s", format_audit_table(entries).c_str());
  const AuditEntry* bad = first_failure(entries);
  if (bad) std::cerr << "audit failed: " << bad->name << ' ' << bad->detail << '\n';
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bundle method with double polyhedral approximation for monotone inclusions"};
  app.require_subcommand(1);

  SolverConfig cfg;
  std::string problem;
  std::uint64_t seed = 0;
  std::string lambda_rule = "best_vertex";
  std::string trace_out;
  bool audit = false;
  double tol = -1.0;
  double radius_floor = -1.0;

  auto* solve_cmd = app.add_subcommand("solve", "Run the bundle solver on one problem");
  solve_cmd->add_option("--problem", problem, "Builtin name (diag10, skew2, l1_10) or problem JSON")->required();
  solve_cmd->add_option("--seed", seed, "Seed for generated problems");
  solve_cmd->add_option("--tau", cfg.tau, "tau > 0")->capture_default_str();
  solve_cmd->add_option("--radius", cfg.radius, "R > 0")->capture_default_str();
  solve_cmd->add_option("--tol", tol, "Stopping tolerance on |u^k| (default 1e-8 (1 + |u^0|))");
  solve_cmd->add_option("--radius-floor", radius_floor, "Certificate trigger (default 1e-12 R)");
  solve_cmd->add_option("--max-serious", cfg.max_serious)->capture_default_str();
  solve_cmd->add_option("--max-null", cfg.max_null_per_serious, "Null steps allowed per serious step")
      ->capture_default_str();
  solve_cmd->add_option("--lambda-rule", lambda_rule, "best_vertex | min_norm | uniform")->capture_default_str();
  solve_cmd->add_option("--trace-out", trace_out, "Write an NDJSON trace here");
  solve_cmd->add_flag("--audit", audit, "Audit invariants after the run");

  double c = 1.0;
  int iters = 500;
  bool print_all = false;
  auto* base_cmd = app.add_subcommand("baseline", "Exact proximal point iteration");
  base_cmd->add_option("--problem", problem, "Builtin name or problem JSON")->required();
  base_cmd->add_option("--seed", seed);
  base_cmd->add_option("--c", c, "Proximal parameter c > 0")->capture_default_str();
  base_cmd->add_option("--iters", iters)->capture_default_str();
  base_cmd->add_flag("--all", print_all, "Print every iterate");

  std::string config_path;
  std::string out_dir = "suite-out";
  auto* suite_cmd = app.add_subcommand("suite", "Run a suite of problems and solver variants");
  suite_cmd->add_option("--config", config_path, "Suite JSON")->required();
  suite_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string trace_path;
  int samples = 1000;
  auto* audit_cmd = app.add_subcommand("audit", "Re-check invariants on a saved trace");
  audit_cmd->add_option("--trace", trace_path, "Trace file")->required();
  audit_cmd->add_option("--samples", samples, "Graph samples per certificate check")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      if (tol >= 0.0) cfg.tol_stop = tol;
      if (radius_floor > 0.0) cfg.radius_floor = radius_floor;
      return cmd_solve(problem, seed, cfg, lambda_rule, trace_out, audit);
    }
    if (*base_cmd) return cmd_baseline(problem, seed, c, iters, print_all);
    if (*suite_cmd) return run_suite(config_path, out_dir);
    if (*audit_cmd) return cmd_audit(trace_path, samples);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
