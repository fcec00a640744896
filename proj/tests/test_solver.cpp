#include <doctest.h>

#include "monobundle/audit.hpp"
#include "monobundle/problems.hpp"
#include "monobundle/solver.hpp"
#include "support.hpp"

using namespace monobundle;
using monobundle::testing::vec;

namespace {

BundleEntry entry(Vector z, Vector w, std::size_t index) {
  return {std::move(z), std::move(w), EntryOrigin::SeriousIterate, index};
}

SolverState state_at(const Vector& x, std::vector<std::pair<Vector, Vector>> pairs) {
  SolverState st;
  st.x = x;
  for (auto& [z, w] : pairs) st.append(z, w, EntryOrigin::NullStep);
  return st;
}

SolverConfig config_for(const ProblemInstance& p, double tol) {
  SolverConfig c;
  c.x0 = p.x0;
  c.tol_stop = tol;
  return c;
}

}  // namespace

TEST_CASE("reduced_indices") {
  std::vector<BundleEntry> one{entry(vec({1, 2}), vec({0, 1}), 1)};
  CHECK(reduced_indices(one, vec({1, 2}), 0.0) == std::vector<std::size_t>{0});

  std::vector<BundleEntry> b{entry(vec({0.4, 0}), vec({1, 0}), 1), entry(vec({0, 0.6}), vec({1, 0}), 2),
                             entry(vec({0.1, 0.1}), vec({1, 0}), 3)};
  CHECK(reduced_indices(b, vec({0, 0}), 1.0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(reduced_indices(b, vec({0, 0}), 0.5) == std::vector<std::size_t>{0, 2});
  // Boundary points stay in.
  CHECK(reduced_indices(b, vec({0, 0}), 0.4) == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(reduced_indices(b, vec({0, 0}), -1.0), ContractViolation);
}

TEST_CASE("search_direction with a single entry returns u at j = 0") {
  SolverConfig cfg;
  cfg.x0 = vec({0, 0});
  auto st = state_at(vec({0, 0}), {{vec({0, 0}), vec({3, 4})}});
  auto d = search_direction(st, cfg);
  CHECK(d.found);
  CHECK(d.j == 0);
  CHECK(d.s == vec({3, 4}));
  CHECK(d.alpha.weights == std::vector<double>{1.0});
  CHECK(d.cert.epshat == 0.0);
}

TEST_CASE("search_direction reaches the radius floor when 0 is in every hull") {
  SolverConfig cfg;
  cfg.x0 = vec({0, 0});
  cfg.radius_floor = 1e-6;
  auto st = state_at(vec({0, 0}), {{vec({0, 0}), vec({1, 2})}, {vec({0, 0}), vec({-1, -2})}});
  auto d = search_direction(st, cfg);
  CHECK_FALSE(d.found);
  // d.j is the last radius searched; the next one falls below the floor.
  CHECK(std::ldexp(cfg.radius, -d.j) >= 1e-6);
  CHECK(std::ldexp(cfg.radius, -(d.j + 1)) < 1e-6);
  CHECK(d.s.norm() <= std::ldexp(cfg.tau, -d.j));
  // Check every intermediate radius as well.
  for (int j = 0; j <= d.j; ++j) {
    st.j = j;
    auto dj = search_direction(st, cfg);
    CHECK(dj.s.norm() <= std::ldexp(cfg.tau, -j));
  }
}

TEST_CASE("search_direction shrinks the ball past far-away entries") {
  SolverConfig cfg;
  cfg.x0 = vec({0, 0});
  cfg.tau = 1.0;
  // Monotone pair; the far entry pulls the min-norm point to |s| ~ 0.93 <= tau,
  // while B(x, 1/2) holds only u = (1, 0).
  auto st = state_at(vec({0, 0}), {{vec({0, 0}), vec({1, 0})}, {vec({0, 0.75}), vec({-1, 5})}});
  auto d = search_direction(st, cfg);
  CHECK(d.found);
  CHECK(d.j == 1);
  CHECK(d.s == vec({1, 0}));
  CHECK(d.bound.holds);
}

TEST_CASE("search_direction on an affine problem far from the solution") {
  const auto p = builtin_problem("diag10", 0);
  SolverConfig cfg = config_for(p, 1e-6);
  SolverState st;
  st.x = p.x0 * 50.0;
  st.append(st.x, eval_oracle(p.spec, st.x), EntryOrigin::SeriousIterate);
  auto d = search_direction(st, cfg);
  CHECK(d.found);
  CHECK(d.j == 0);
  CHECK(d.s.norm() > cfg.tau);
}

TEST_CASE("line_search exits at l = 0 when both serious tests hold") {
  Matrix a = Matrix::Identity(2, 2);
  auto op = OperatorSpec::affine(a, vec({0, 0}));
  SolverConfig cfg;
  cfg.x0 = vec({10, 0});
  SolverState st;
  st.x = cfg.x0;
  st.append(st.x, eval_oracle(op, st.x), EntryOrigin::SeriousIterate);
  auto d = search_direction(st, cfg);
  REQUIRE(d.found);
  auto ls = line_search(st, op, cfg, d, 0.0);
  CHECK(ls.l == 0);
  CHECK(ls.sigma == doctest::Approx(cfg.radius / d.s.norm()));
  CHECK(ls.y.isApprox(vec({9, 0})));
  CHECK(classify_step(d.s, ls.v, ls.xi) == StepKind::Serious);
}

TEST_CASE("line_search stays within l <= j + 1 and the eps bound") {
  const auto p = builtin_problem("l1_10", 3);
  SolverConfig cfg = config_for(p, 1e-6);
  auto rep = solve(p.spec, cfg);
  REQUIRE_FALSE(rep.records.empty());
  for (const auto& r : rep.records) {
    CHECK(r.l <= r.j + 1);
    CHECK(r.eps <= 2.0 * r.mu * std::ldexp(cfg.radius, -r.l) + 1e-9);
    CHECK(r.eps_hat <= 2.0 * r.mu_hat * std::ldexp(cfg.radius, -r.j) + 1e-9);
  }
  for (const auto& r : rep.line_records) CHECK(r.l <= r.j + 1);
}

TEST_CASE("classify_step") {
  const Vector s = vec({1, 2});
  CHECK(classify_step(s, s, s) == StepKind::Serious);
  CHECK(classify_step(s, vec({0, 0}), s) == StepKind::Null);
  CHECK(classify_step(s, s, vec({0, 0})) == StepKind::Null);
  // <v,s> = <xi,s> = |s|^2 / 2 exactly.
  CHECK(classify_step(s, vec({0.5, 1}), vec({2.5, 0})) == StepKind::Serious);
  CHECK_THROWS_AS(classify_step(vec({0, 0}), s, s), ContractViolation);
}

TEST_CASE("serious_update") {
  CHECK(serious_update(vec({0, 2}), vec({0, 0}), vec({0, 1})).isApprox(vec({0, 0})));
  CHECK(serious_update(vec({1, 1}), vec({0, 0}), vec({1, 0})).isApprox(vec({0, 1})));
  CHECK(serious_update(vec({2, 2}), vec({1, 0}), vec({1, 1})).isApprox(vec({0.5, 0.5})));
  CHECK_THROWS_AS(serious_update(vec({2, 2}), vec({1, 0}), vec({0, 0})), InternalError);
  CHECK_THROWS_AS(serious_update(vec({-1, 0}), vec({0, 0}), vec({1, 0})), InternalError);
}

TEST_CASE("solve stops immediately at exact zeros") {
  SolverConfig cfg;
  cfg.x0 = vec({0, 0});
  cfg.tol_stop = 0.0;
  auto r = solve(OperatorSpec::affine(Matrix::Identity(2, 2), vec({0, 0})), cfg);
  CHECK(r.status == Status::ExactZero);
  CHECK(r.serious_steps == 0);
  CHECK(r.records.empty());

  SolverConfig cfg2;
  cfg2.x0 = vec({0, 0});
  auto r2 = solve(OperatorSpec::scaled_l1(vec({1, 1})), cfg2);
  CHECK(r2.status == Status::ExactZero);
  CHECK(r2.oracle_calls == 1);
}

TEST_CASE("solve converges on diag10") {
  const auto p = builtin_problem("diag10", 0);
  auto r = solve(p.spec, config_for(p, 1e-6));
  CHECK(r.status == Status::Converged);
  CHECK((r.x_final - *p.known_solution).norm() <= 1e-5);
  CHECK(all_pass(audit_run(p, config_for(p, 1e-6), r, {200, 0})));
}

TEST_CASE("solve converges on skew2 under every lambda rule") {
  const auto p = builtin_problem("skew2", 0);
  for (auto rule : {LambdaRule::BestVertex, LambdaRule::MinNorm, LambdaRule::Uniform}) {
    auto cfg = config_for(p, 1e-6);
    cfg.lambda_rule = rule;
    auto r = solve(p.spec, cfg);
    CHECK(r.status == Status::Converged);
    CHECK(r.x_final.norm() <= 1e-5);
    const auto audit = audit_run(p, cfg, r, {200, 0});
    const AuditEntry* bad = first_failure(audit);
    CHECK_MESSAGE(bad == nullptr, (bad ? bad->name + " " + bad->detail : std::string()));
  }
}

TEST_CASE("serious-step records satisfy the step contracts") {
  const auto p = builtin_problem("skew2", 0);
  auto cfg = config_for(p, 1e-6);
  auto r = solve(p.spec, cfg);
  int serious = 0;
  for (const auto& rec : r.records) {
    CHECK(((rec.c * rec.v + (rec.y - rec.x) - rec.e).norm() <= 1e-12 * (1 + rec.x.norm())));
    if (rec.step_kind != StepKind::Serious) continue;
    ++serious;
    const double half = 0.5 * rec.s.squaredNorm();
    CHECK(rec.v.dot(rec.s) >= half - 1e-9);
    CHECK(rec.s.dot(rec.xi) >= half - 1e-9);
    CHECK(rec.e.squaredNorm() <= rec.c * rec.c * rec.v.squaredNorm() + (rec.y - rec.x).squaredNorm() + 1e-9);
    REQUIRE(rec.x_next);
    const double lhs = (*rec.x_next - rec.x).norm() * rec.xi.norm();
    CHECK(lhs > cfg.tau * cfg.radius * std::ldexp(1.0, -2 * (rec.j + 1)) - 1e-9);
  }
  CHECK(serious == r.serious_steps);
}

TEST_CASE("solve reports MaxIterations instead of throwing") {
  const auto p = builtin_problem("diag10", 0);
  auto cfg = config_for(p, 1e-6);
  cfg.max_serious = 3;
  auto r = solve(p.spec, cfg);
  CHECK(r.status == Status::MaxIterations);
  CHECK(r.serious_steps == 3);
}

TEST_CASE("bundle_cap evicts only old null-step entries") {
  const auto p = builtin_problem("diag10", 0);
  auto cfg = config_for(p, 1e-6);
  cfg.radius = 0.1;
  cfg.bundle_cap = 5;
  auto r = solve(p.spec, cfg);
  CHECK(r.status == Status::Converged);
  std::size_t evicted = 0;
  for (const auto& o : r.oracle_records) evicted += o.evicted.size();
  CHECK(evicted > 0);
  CHECK(all_pass(audit_run(p, cfg, r, {100, 0})));
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg.x0 = vec({1});
  CHECK_NOTHROW(cfg.validate());
  cfg.tau = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg.tau = 1e-3;
  cfg.radius_floor = 2.0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg.radius_floor.reset();
  cfg.ck_rule = CkRule::constant(-1);
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg.ck_rule = CkRule::constant(2);
  CHECK_NOTHROW(solve(OperatorSpec::scaled_l1(vec({1})), cfg));
  CHECK_THROWS_AS(solve(OperatorSpec::scaled_l1(vec({1, 1})), cfg), ContractViolation);
}
