#include "monobundle/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace monobundle {

namespace {

using Clock = std::chrono::steady_clock;

double slack_for(double radius) { return kRadiusSlack * std::max(1.0, radius); }

double max_w_norm(const std::vector<BundleEntry>& bundle, const std::vector<std::size_t>& idx) {
  double m = 0.0;
  for (auto i : idx) m = std::max(m, bundle[i].w.norm());
  return m;
}

// Positions of the direction set: cached |z_i - x^k| against R 2^-j.
std::vector<std::size_t> direction_set(const SolverState& st, double radius) {
  std::vector<std::size_t> out;
  const double lim = radius + slack_for(radius);
  for (std::size_t i = 0; i < st.dist_to_x.size(); ++i) {
    if (st.dist_to_x[i] <= lim) out.push_back(i);
  }
  return out;
}

// Positions of the line-search set around y. Any member satisfies
// |z - x^k| <= |z - y| + |y - x^k| <= 2 radius (+ slack), so the cached
// distances prune the scan.
std::vector<std::size_t> line_set(const SolverState& st, const Vector& y, double radius) {
  std::vector<std::size_t> out;
  const double lim = radius + slack_for(radius);
  const double prefilter = 2.0 * lim + 1e-9 * std::max(1.0, radius);
  for (std::size_t i = 0; i < st.bundle.size(); ++i) {
    if (st.dist_to_x[i] > prefilter) continue;
    if ((st.bundle[i].z - y).norm() <= lim) out.push_back(i);
  }
  return out;
}

// Triplets and weights restricted to the support of `weights`.
struct Support {
  std::vector<Triplet> triplets;
  SimplexWeights alpha;
};

Support support_of(const std::vector<BundleEntry>& bundle, const std::vector<std::size_t>& idx,
                   const std::vector<double>& weights) {
  Support sup;
  for (std::size_t c = 0; c < idx.size(); ++c) {
    if (weights[c] <= 0.0) continue;
    sup.triplets.push_back({0.0, bundle[idx[c]].z, bundle[idx[c]].w});
    sup.alpha.weights.push_back(weights[c]);
    sup.alpha.index_set.push_back(idx[c]);
  }
  return sup;
}

std::int64_t elapsed_ns(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

[[noreturn]] void non_finite(const char* what, int k, int n, int l) {
  std::ostringstream os;
  os << "non-finite " << what << " at k=" << k << " n=" << n << " l=" << l;
  throw InternalError(os.str());
}

}  // namespace

void SolverConfig::validate() const {
  require(x0.size() > 0, "config: empty x0");
  require_finite(x0, "config.x0");
  require(std::isfinite(tau) && tau > 0.0, "config: tau must be positive");
  require(std::isfinite(radius) && radius > 0.0, "config: radius must be positive");
  const double floor = resolved_radius_floor();
  require(floor > 0.0 && floor < radius, "config: need 0 < radius_floor < radius");
  if (tol_stop) require(std::isfinite(*tol_stop) && *tol_stop >= 0.0, "config: tol_stop must be >= 0");
  require(max_serious > 0, "config: max_serious must be positive");
  require(max_null_per_serious > 0, "config: max_null_per_serious must be positive");
  if (ck_rule.kind == CkRule::Kind::Constant) {
    require(std::isfinite(ck_rule.c) && ck_rule.c > 0.0, "config: constant c_k must be positive");
  }
  require(minnorm_tol > 0.0, "config: minnorm_tol must be positive");
  if (bundle_cap) require(*bundle_cap >= 1, "config: bundle_cap must be >= 1");
}

const char* to_string(Status s) {
  switch (s) {
    case Status::ExactZero: return "exact_zero";
    case Status::Converged: return "converged";
    case Status::Certificate: return "certificate";
    case Status::MaxIterations: return "max_iterations";
  }
  return "?";
}

const char* to_string(StepKind s) { return s == StepKind::Serious ? "serious" : "null"; }

const char* to_string(LambdaRule r) {
  switch (r) {
    case LambdaRule::BestVertex: return "best_vertex";
    case LambdaRule::MinNorm: return "min_norm";
    case LambdaRule::Uniform: return "uniform";
  }
  return "?";
}

std::optional<LambdaRule> parse_lambda_rule(const std::string& name) {
  if (name == "best_vertex") return LambdaRule::BestVertex;
  if (name == "min_norm") return LambdaRule::MinNorm;
  if (name == "uniform") return LambdaRule::Uniform;
  return std::nullopt;
}

void SolverState::append(Vector z, Vector w, EntryOrigin origin) {
  ++p;
  dist_to_x.push_back((z - x).norm());
  bundle.push_back({std::move(z), std::move(w), origin, p});
}

void SolverState::move_to(Vector x_new) {
  x = std::move(x_new);
  for (std::size_t i = 0; i < bundle.size(); ++i) dist_to_x[i] = (bundle[i].z - x).norm();
}

std::vector<std::size_t> reduced_indices(const std::vector<BundleEntry>& bundle,
                                         const Vector& center, double radius) {
  require(radius >= 0.0, "reduced_indices: negative radius");
  std::vector<std::size_t> out;
  const double lim = radius + slack_for(radius);
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    if ((bundle[i].z - center).norm() <= lim) out.push_back(i);
  }
  return out;
}

DirectionResult search_direction(const SolverState& state, const SolverConfig& config) {
  require(!state.bundle.empty(), "search_direction: empty bundle");
  const double floor = config.resolved_radius_floor();
  MinNormOptions opts;
  opts.tol = config.minnorm_tol;

  DirectionResult last;
  int j = state.j;
  for (;;) {
    const double r = std::ldexp(config.radius, -j);
    const auto idx = direction_set(state, r);
    if (idx.empty()) throw InternalError("search_direction: reduced bundle lost (x^k, u^k)");

    std::vector<Vector> ws;
    ws.reserve(idx.size());
    for (auto i : idx) ws.push_back(state.bundle[i].w);
    const MinNormResult mn = min_norm_point(ws, opts);

    const Support sup = support_of(state.bundle, idx, mn.alpha.weights);
    last.j = j;
    last.alpha.weights = mn.alpha.weights;
    last.alpha.index_set = idx;
    last.bound = eps_bound(sup.triplets, sup.alpha, state.x, r);
    last.cert = transport(sup.triplets, sup.alpha);
    last.s = last.cert.uhat;
    last.mu_hat = max_w_norm(state.bundle, idx);
    if (!last.s.allFinite()) non_finite("search direction", state.k, state.n, -1);

    if (last.s.norm() > std::ldexp(config.tau, -j)) {
      last.found = true;
      return last;
    }
    ++j;
    if (std::ldexp(config.radius, -j) < floor) {
      last.found = false;
      return last;
    }
  }
}

LineSearchResult line_search(SolverState& state, const OperatorSpec& spec,
                             const SolverConfig& config, const DirectionResult& dir,
                             double tol_stop, SolveReport* trace) {
  const Vector& s = dir.s;
  const double s_norm = s.norm();
  require(s_norm > 0.0, "line_search: zero direction");
  const double half = 0.5 * s.squaredNorm();
  MinNormOptions opts;
  opts.tol = config.minnorm_tol;

  // Direction weights keyed by bundle position, for eps_literal.
  std::vector<double> alpha_at(state.bundle.size(), 0.0);
  for (std::size_t c = 0; c < dir.alpha.index_set.size(); ++c) {
    alpha_at[dir.alpha.index_set[c]] = dir.alpha.weights[c];
  }

  LineSearchResult res;
  for (int l = 0;; ++l) {
    const double r = std::ldexp(config.radius, -l);
    res.l = l;
    res.sigma = r / s_norm;
    res.y = state.x - res.sigma * s;
    res.xi = eval_oracle(spec, res.y);
    ++state.oracle_calls;
    if (!res.xi.allFinite()) non_finite("xi", state.k, state.n, l);
    if (res.xi.norm() <= tol_stop) {
      res.zero_found = true;
      return res;
    }

    res.line_indices = line_set(state, res.y, r);
    const auto& idx = res.line_indices;
    if (idx.empty()) throw InternalError("line_search: reduced bundle around y is empty");

    std::vector<double> lambda(idx.size(), 0.0);
    switch (config.lambda_rule) {
      case LambdaRule::BestVertex: {
        std::size_t best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < idx.size(); ++c) {
          const double val = state.bundle[idx[c]].w.dot(s);
          if (val > best_val) {
            best_val = val;
            best = c;
          }
        }
        lambda[best] = 1.0;
        break;
      }
      case LambdaRule::MinNorm: {
        std::vector<Vector> ws;
        ws.reserve(idx.size());
        for (auto i : idx) ws.push_back(state.bundle[i].w);
        lambda = min_norm_point(ws, opts).alpha.weights;
        break;
      }
      case LambdaRule::Uniform:
        std::fill(lambda.begin(), lambda.end(), 1.0 / static_cast<double>(idx.size()));
        break;
    }

    const Support sup = support_of(state.bundle, idx, lambda);
    const EpsBound bound = eps_bound(sup.triplets, sup.alpha, res.y, r);
    const EnlargementElement el = transport(sup.triplets, sup.alpha);
    res.v = el.uhat;
    res.eps = el.epshat;
    res.mu = max_w_norm(state.bundle, idx);
    (void)bound;

    double lit = 0.0;
    for (auto i : idx) {
      const double a = i < alpha_at.size() ? alpha_at[i] : 0.0;
      if (a == 0.0) continue;
      lit += a * (state.bundle[i].w - res.v).dot(state.bundle[i].z - el.xhat);
    }
    res.eps_literal = lit;
    if (!res.v.allFinite()) non_finite("v", state.k, state.n, l);

    if (trace != nullptr) {
      LineSearchRecord rec;
      rec.seq = trace->oracle_records.size() + trace->line_records.size() + trace->records.size();
      rec.k = state.k;
      rec.n = state.n;
      rec.j = dir.j;
      rec.l = l;
      rec.sigma = res.sigma;
      rec.y = res.y;
      rec.xi = res.xi;
      rec.v = res.v;
      rec.eps = res.eps;
      rec.eps_literal = res.eps_literal;
      rec.mu = res.mu;
      rec.bundle_size = state.bundle.size();
      rec.wall_ns = elapsed_ns(state.started);
      trace->line_records.push_back(std::move(rec));
    }

    const bool serious_ok = res.v.dot(s) >= half && s.dot(res.xi) >= half;
    if (serious_ok || l >= dir.j + 1) return res;
  }
}

StepKind classify_step(const Vector& s, const Vector& v, const Vector& xi) {
  require(s.size() == v.size() && s.size() == xi.size(), "classify_step: dimension mismatch");
  const double half = 0.5 * s.squaredNorm();
  require(half > 0.0, "classify_step: zero direction");
  if (v.dot(s) < half || s.dot(xi) < half) return StepKind::Null;
  return StepKind::Serious;
}

Vector serious_update(const Vector& x, const Vector& y, const Vector& xi) {
  if (!(xi.squaredNorm() > 0.0)) throw InternalError("serious_update: xi = 0");
  if (!((x - y).dot(xi) > 0.0)) throw InternalError("serious_update: x already in H_{y,xi}");
  return project_halfspace(x, Halfspace{y, xi});
}

SolveReport solve(const OperatorSpec& spec, const SolverConfig& config) {
  config.validate();
  require(config.x0.size() == spec.dimension(), "solve: x0 dimension does not match operator");

  SolveReport report;
  report.radius_floor = config.resolved_radius_floor();
  auto next_seq = [&report] {
    return report.oracle_records.size() + report.line_records.size() + report.records.size();
  };

  SolverState st;
  st.x = config.x0;
  const auto t0 = st.started;
  auto finish = [&](Status status, Vector x_final) {
    report.status = status;
    report.x_final = std::move(x_final);
    report.bundle_size_final = st.bundle.size();
    report.oracle_calls = st.oracle_calls;
    return report;
  };

  for (;;) {
    if (st.k >= config.max_serious) {
      report.message = "max_serious reached";
      return finish(Status::MaxIterations, st.x);
    }
    // Stopping test and bundle update.
    st.u = eval_oracle(spec, st.x);
    ++st.oracle_calls;
    if (!st.u.allFinite()) non_finite("u", st.k, 0, -1);
    if (st.k == 0) report.tol_stop = config.tol_stop.value_or(1e-8 * (1.0 + st.u.norm()));

    OracleRecord orec;
    orec.seq = next_seq();
    orec.k = st.k;
    orec.x = st.x;
    orec.u = st.u;
    const bool exact_zero = (st.u.array() == 0.0).all();
    const bool small = st.u.norm() <= report.tol_stop;
    if (!exact_zero && !small) {
      st.append(st.x, st.u, EntryOrigin::SeriousIterate);
      if (config.bundle_cap && st.bundle.size() > *config.bundle_cap) {
        for (std::size_t i = 0; i < st.bundle.size() && st.bundle.size() > *config.bundle_cap;) {
          if (st.bundle[i].origin == EntryOrigin::NullStep && st.dist_to_x[i] > config.radius) {
            orec.evicted.push_back(st.bundle[i].index);
            st.bundle.erase(st.bundle.begin() + static_cast<std::ptrdiff_t>(i));
            st.dist_to_x.erase(st.dist_to_x.begin() + static_cast<std::ptrdiff_t>(i));
          } else {
            ++i;
          }
        }
      }
    }
    orec.bundle_size = st.bundle.size();
    orec.wall_ns = elapsed_ns(t0);
    report.oracle_records.push_back(std::move(orec));
    if (exact_zero) return finish(Status::ExactZero, st.x);
    if (small) return finish(Status::Converged, st.x);

    st.n = 0;
    st.j = 0;
    for (;;) {
      if (st.n >= config.max_null_per_serious) {
        report.message = "max_null_per_serious reached at k=" + std::to_string(st.k);
        return finish(Status::MaxIterations, st.x);
      }
      // Search direction.
      const DirectionResult dir = search_direction(st, config);
      if (!dir.found) {
        report.certificate = dir.cert;
        report.certificate_j = dir.j;
        report.message = "radius floor reached at j=" + std::to_string(dir.j);
        return finish(Status::Certificate, st.x);
      }
      // Line search.
      LineSearchResult ls = line_search(st, spec, config, dir, report.tol_stop, &report);
      if (ls.zero_found) {
        report.message = "oracle vanished during line search";
        return finish(Status::Converged, ls.y);
      }
      // Null or serious step.
      IterationRecord rec;
      rec.k = st.k;
      rec.n = st.n;
      rec.j = dir.j;
      rec.l = ls.l;
      rec.x = st.x;
      rec.s = dir.s;
      rec.y = ls.y;
      rec.v = ls.v;
      rec.xi = ls.xi;
      rec.sigma = ls.sigma;
      rec.c = config.ck_rule.kind == CkRule::Kind::EqualSigma ? ls.sigma : config.ck_rule.c;
      rec.e = rec.c * rec.v - rec.sigma * rec.s;
      rec.eps = ls.eps;
      rec.eps_literal = ls.eps_literal;
      rec.eps_hat = dir.cert.epshat;
      rec.mu = ls.mu;
      rec.mu_hat = dir.mu_hat;
      rec.xhat = dir.cert.xhat;
      rec.step_kind = classify_step(dir.s, ls.v, ls.xi);

      if (rec.step_kind == StepKind::Null) {
        rec.seq = next_seq();
        st.append(ls.y, ls.xi, EntryOrigin::NullStep);
        rec.bundle_size = st.bundle.size();
        rec.wall_ns = elapsed_ns(t0);
        report.records.push_back(std::move(rec));
        ++st.n;
        st.j = dir.j;
        continue;
      }

      const double e2 = rec.e.squaredNorm();
      const double e2_max = rec.c * rec.c * rec.v.squaredNorm() + (rec.y - rec.x).squaredNorm();
      if (e2 > e2_max + 1e-9) {
        throw InternalError("error bound violated at k=" + std::to_string(st.k) + ": |e|^2 = " +
                            std::to_string(e2) + " > " + std::to_string(e2_max));
      }
      Vector x_next = serious_update(st.x, ls.y, ls.xi);
      if (!x_next.allFinite()) non_finite("x^{k+1}", st.k, st.n, ls.l);
      rec.x_next = x_next;
      rec.seq = next_seq();
      rec.bundle_size = st.bundle.size();
      rec.wall_ns = elapsed_ns(t0);
      report.records.push_back(std::move(rec));
      st.move_to(std::move(x_next));
      ++st.k;
      ++report.serious_steps;
      break;
    }
  }
}

}  // namespace monobundle
