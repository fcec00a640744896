#include "monobundle/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "monobundle/trace.hpp"

namespace monobundle {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool succeeded(Status s) { return s != Status::MaxIterations; }

std::string fmt(double v, const char* spec = "%.3e") {
  if (std::isnan(v)) return "-";
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string file_stem(const std::string& problem, const std::string& variant) {
  std::string s = problem + "__" + variant;
  for (auto& ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) ch = '_';
  }
  return s;
}

std::vector<SolverVariant> default_variants(const SolverConfig& base) {
  std::vector<SolverVariant> out;
  for (auto rule : {LambdaRule::BestVertex, LambdaRule::MinNorm, LambdaRule::Uniform}) {
    SolverVariant v;
    v.name = std::string("bundle-") + to_string(rule);
    v.config = base;
    v.config.lambda_rule = rule;
    out.push_back(std::move(v));
  }
  SolverVariant ppa;
  ppa.name = "ppa";
  ppa.method = SolverVariant::Method::Ppa;
  out.push_back(std::move(ppa));
  return out;
}

RunArtifact run_one(const ProblemInstance& problem, const SolverVariant& variant,
                    const AuditOptions& audit_opts, const std::filesystem::path& out_dir) {
  RunArtifact art;
  art.problem = problem.name;
  art.variant = variant.name;
  art.method = variant.method;
  const auto stem = file_stem(problem.name, variant.name);
  const auto t0 = std::chrono::steady_clock::now();

  if (variant.method == SolverVariant::Method::Ppa) {
    std::ofstream trace(out_dir / (stem + ".trace.ndjson"));
    ordered_json header;
    header["type"] = "header";
    header["format"] = "monobundle-ppa/1";
    header["problem"] = ordered_json::parse(problem_to_json(problem).dump());
    header["c"] = variant.ppa_c;
    header["iters"] = variant.ppa_iters;
    trace << dump17(header) << '\n';
    try {
      art.ppa_trajectory = run_ppa_baseline(problem, variant.ppa_c, variant.ppa_iters);
      for (std::size_t t = 0; t < art.ppa_trajectory.size(); ++t) {
        ordered_json r;
        r["type"] = "ppa";
        r["t"] = t;
        ordered_json xs = ordered_json::array();
        for (Eigen::Index i = 0; i < art.ppa_trajectory[t].size(); ++i) xs.push_back(art.ppa_trajectory[t][i]);
        r["x"] = xs;
        trace << dump17(r) << '\n';
      }
    } catch (const BaselineUnavailable& e) {
      art.error = e.what();
    }
  } else {
    SolverConfig cfg = variant.config;
    cfg.x0 = problem.x0;
    try {
      art.report = solve(problem.spec, cfg);
      std::ofstream trace(out_dir / (stem + ".trace.ndjson"));
      write_trace(trace, problem, cfg, art.report);
      art.audit = audit_run(problem, cfg, art.report, audit_opts);
    } catch (const std::exception& e) {
      art.error = e.what();
    }
  }
  art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json doc;
  doc["problem"] = art.problem;
  doc["variant"] = art.variant;
  doc["method"] = variant.method == SolverVariant::Method::Ppa ? "ppa" : "bundle";
  if (!art.error.empty()) doc["error"] = art.error;
  if (variant.method == SolverVariant::Method::Bundle && art.error.empty()) {
    doc["status"] = to_string(art.report.status);
    doc["message"] = art.report.message;
    doc["x_final"] = vector_to_json(art.report.x_final);
    doc["serious_steps"] = art.report.serious_steps;
    doc["oracle_calls"] = art.report.oracle_calls;
    doc["bundle_size_final"] = art.report.bundle_size_final;
  } else if (!art.ppa_trajectory.empty()) {
    doc["x_final"] = vector_to_json(art.ppa_trajectory.back());
    doc["iterations"] = art.ppa_trajectory.size() - 1;
  }
  json audit = json::array();
  for (const auto& e : art.audit) {
    audit.push_back({{"name", e.name},
                     {"pass", e.pass},
                     {"worst_margin", std::isfinite(e.worst_margin) ? json(e.worst_margin) : json(nullptr)},
                     {"checks", e.checks},
                     {"detail", e.detail}});
  }
  doc["audit"] = audit;
  doc["timing"] = {{"wall_seconds", art.wall_seconds}};
  std::ofstream(out_dir / (stem + ".artifact.json")) << doc.dump(2) << '\n';
  return art;
}

}  // namespace

std::vector<Vector> run_ppa_baseline(const ProblemInstance& problem, double c, int iters) {
  require(c > 0.0 && std::isfinite(c), "run_ppa_baseline: c must be positive");
  require(iters >= 0, "run_ppa_baseline: iters must be >= 0");
  std::vector<Vector> traj{problem.x0};
  traj.reserve(static_cast<std::size_t>(iters) + 1);
  for (int t = 0; t < iters; ++t) {
    auto next = resolvent(problem.spec, traj.back(), c);
    if (!next) {
      throw BaselineUnavailable("problem '" + problem.name +
                                "' has no closed-form resolvent; proximal point baseline declined");
    }
    traj.push_back(std::move(*next));
  }
  return traj;
}

SuiteConfig parse_suite_config(const json& j, const std::string& source) {
  const std::string root = source + "#";
  if (!j.is_object()) throw ConfigError(root, "suite config must be an object");
  SuiteConfig cfg;
  SolverConfig base;
  if (j.contains("solver")) base = config_from_json(j["solver"], root + "/solver");
  if (j.contains("workers")) {
    if (!j["workers"].is_number_unsigned()) throw ConfigError(root + "/workers", "expected a count");
    cfg.workers = j["workers"].get<unsigned>();
  }
  if (j.contains("audit")) {
    const auto& a = j["audit"];
    if (!a.is_object()) throw ConfigError(root + "/audit", "expected an object");
    cfg.audit.certificate_samples = a.value("certificate_samples", cfg.audit.certificate_samples);
    cfg.audit.seed = a.value("seed", cfg.audit.seed);
  }
  if (j.contains("problems")) {
    const auto& ps = j["problems"];
    if (!ps.is_array()) throw ConfigError(root + "/problems", "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      cfg.problems.push_back(problem_from_json(ps[i], root + "/problems/" + std::to_string(i)));
    }
  }
  if (j.contains("variants")) {
    const auto& vs = j["variants"];
    if (!vs.is_array()) throw ConfigError(root + "/variants", "expected an array");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string where = root + "/variants/" + std::to_string(i);
      const auto& v = vs[i];
      if (!v.is_object()) throw ConfigError(where, "expected an object");
      SolverVariant var;
      const std::string method = v.value("method", "bundle");
      if (method == "bundle") {
        var.config = config_from_json(v, where, base);
        var.name = v.value("name", std::string("bundle-") + to_string(var.config.lambda_rule));
      } else if (method == "ppa") {
        var.method = SolverVariant::Method::Ppa;
        var.ppa_c = v.value("c", 1.0);
        var.ppa_iters = v.value("iters", 500);
        if (!(var.ppa_c > 0.0) || var.ppa_iters < 0) throw ConfigError(where, "ppa needs c > 0, iters >= 0");
        var.name = v.value("name", std::string("ppa"));
      } else {
        throw ConfigError(where + "/method", "expected 'bundle' or 'ppa'");
      }
      cfg.variants.push_back(std::move(var));
    }
  } else {
    cfg.variants = default_variants(base);
  }
  for (std::size_t i = 0; i < cfg.variants.size(); ++i) {
    if (cfg.variants[i].method != SolverVariant::Method::Bundle) continue;
    SolverConfig probe = cfg.variants[i].config;
    probe.x0 = Vector::Zero(1);
    try {
      probe.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError(root + "/variants/" + std::to_string(i), e.what());
    }
  }
  return cfg;
}

SuiteConfig load_suite_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open suite config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ":byte " + std::to_string(e.byte), e.what());
  }
  return parse_suite_config(j, path);
}

SuiteResult run_suite(const SuiteConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SuiteResult result;

  // Each worker owns whole problems; results land in fixed slots.
  const std::size_t np = config.problems.size();
  std::vector<std::vector<RunArtifact>> slots(np);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p = next++; p < np; p = next++) {
      for (const auto& v : config.variants) {
        slots[p].push_back(run_one(config.problems[p], v, config.audit, out_dir));
      }
    }
  };
  unsigned nworkers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  nworkers = static_cast<unsigned>(std::min<std::size_t>(nworkers, std::max<std::size_t>(np, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  auto fail = [&](const std::string& why) {
    if (result.exit_code == 0) {
      result.exit_code = 1;
      result.failure = why;
    }
  };

  for (std::size_t p = 0; p < np; ++p) {
    const ProblemInstance& prob = config.problems[p];
    std::optional<Vector> ppa_limit;
    for (const auto& art : slots[p]) {
      if (art.method == SolverVariant::Method::Ppa && !art.ppa_trajectory.empty()) {
        ppa_limit = art.ppa_trajectory.back();
      }
    }
    for (auto& art : slots[p]) {
      SummaryRow row;
      row.problem = art.problem;
      row.method = art.variant;
      const std::string tag = art.problem + "/" + art.variant;
      if (art.method == SolverVariant::Method::Ppa) {
        if (!art.error.empty()) {
          row.status = "unavailable";
        } else {
          const Vector& xf = art.ppa_trajectory.back();
          row.status = "baseline";
          row.serious_steps = static_cast<int>(art.ppa_trajectory.size()) - 1;
          if (prob.known_solution) row.final_distance = (xf - *prob.known_solution).norm();
          row.final_residual = eval_oracle(prob.spec, xf).norm();
        }
      } else if (!art.error.empty()) {
        row.status = "error";
        row.invariants_pass = false;
        fail(tag + ": " + art.error);
      } else {
        const SolveReport& rep = art.report;
        row.status = to_string(rep.status);
        row.serious_steps = rep.serious_steps;
        row.oracle_calls = rep.oracle_calls;
        if (prob.known_solution) row.final_distance = (rep.x_final - *prob.known_solution).norm();
        row.final_residual = eval_oracle(prob.spec, rep.x_final).norm();
        row.invariants_pass = all_pass(art.audit);
        if (const AuditEntry* bad = first_failure(art.audit)) {
          fail(tag + ": invariant '" + bad->name + "' failed, " + bad->detail);
        }
        if (ppa_limit) {
          row.baseline_gap = (rep.x_final - *ppa_limit).norm();
          const double allowed = 10.0 * std::max(rep.tol_stop, 1e-6);
          if (row.baseline_gap > allowed) {
            row.invariants_pass = false;
            fail(tag + ": baseline gap " + fmt(row.baseline_gap) + " exceeds " + fmt(allowed));
          }
        }
        if (!succeeded(rep.status)) fail(tag + ": status " + row.status + " (" + rep.message + ")");
      }
      result.rows.push_back(row);
    }
    for (auto& art : slots[p]) result.runs.push_back(std::move(art));
  }

  std::ofstream nd(out_dir / "summary.ndjson");
  for (const auto& r : result.rows) {
    ordered_json j;
    j["problem"] = r.problem;
    j["method"] = r.method;
    j["status"] = r.status;
    j["serious_steps"] = r.serious_steps;
    j["oracle_calls"] = r.oracle_calls;
    j["final_distance"] = r.final_distance;
    j["final_residual"] = r.final_residual;
    j["baseline_gap"] = r.baseline_gap;
    j["invariants_pass"] = r.invariants_pass;
    nd << dump17(j) << '\n';
  }
  std::ofstream(out_dir / "summary.txt") << format_summary_table(result.rows);
  return result;
}

int run_suite(const std::string& suite_config_path, const std::string& output_dir) {
  SuiteConfig cfg;
  try {
    cfg = load_suite_config(suite_config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  const SuiteResult res = run_suite(cfg, output_dir);
  std::cout << format_summary_table(res.rows);
  if (res.exit_code != 0) std::cerr << "suite failed: " << res.failure << '\n';
  return res.exit_code;
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-20s %-15s %8s %10s %11s %11s %11s %s\n", "problem", "method",
                "status", "serious", "oracle", "distance", "residual", "vs_ppa", "invariants");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-20s %-15s %8d %10lld %11s %11s %11s %s\n", r.problem.c_str(),
                  r.method.c_str(), r.status.c_str(), r.serious_steps, static_cast<long long>(r.oracle_calls),
                  fmt(r.final_distance).c_str(), fmt(r.final_residual).c_str(), fmt(r.baseline_gap).c_str(),
                  r.invariants_pass ? "pass" : "FAIL");
    os << line;
  }
  return os.str();
}

std::string format_audit_table(const std::vector<AuditEntry>& audit) {
  std::ostringstream os;
  char line[512];
  for (const auto& e : audit) {
    std::snprintf(line, sizeof line, "%-22s %-4s checks=%-8lld worst_margin=%-11s %s\n", e.name.c_str(),
                  e.pass ? "pass" : "FAIL", static_cast<long long>(e.checks),
                  std::isfinite(e.worst_margin) ? fmt(e.worst_margin).c_str() : "-", e.detail.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace monobundle
