#include "monobundle/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace monobundle {

namespace {

constexpr double kTol = 1e-9;

class Ledger {
 public:
  Ledger() {
    for (const auto& n : audit_invariant_names()) {
      index_[n] = entries_.size();
      AuditEntry e;
      e.name = n;
      entries_.push_back(std::move(e));
    }
  }

  // Records one check; strict checks need margin > 0.
  void check(const char* name, double margin, std::size_t seq, bool strict = false) {
    AuditEntry& e = entries_.at(index_.at(name));
    ++e.checks;
    if (!std::isfinite(margin)) margin = -std::numeric_limits<double>::infinity();
    e.worst_margin = std::min(e.worst_margin, margin);
    const bool ok = strict ? margin > 0.0 : margin >= 0.0;
    if (!ok && e.pass) {
      e.pass = false;
      std::ostringstream os;
      os << "first failure at seq " << seq << " (margin " << margin << ")";
      e.detail = os.str();
    }
  }

  void note(const char* name, std::string text) {
    AuditEntry& e = entries_.at(index_.at(name));
    if (e.detail.empty()) e.detail = std::move(text);
  }

  std::vector<AuditEntry> take() { return std::move(entries_); }

 private:
  std::vector<AuditEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

struct Entry {
  Vector z, w;
  std::size_t index;
};

std::vector<std::size_t> ball(const std::vector<Entry>& bundle, const Vector& c, double r) {
  std::vector<std::size_t> out;
  const double lim = r + kRadiusSlack * std::max(1.0, r);
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    if ((bundle[i].z - c).norm() <= lim) out.push_back(i);
  }
  return out;
}

double max_w(const std::vector<Entry>& bundle, const std::vector<std::size_t>& idx) {
  double m = 0.0;
  for (auto i : idx) m = std::max(m, bundle[i].w.norm());
  return m;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

bool same_vector(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

const std::vector<std::string>& audit_invariant_names() {
  static const std::vector<std::string> names{
      "finite_values",     "oracle_consistency",  "bundle_consistency",
      "sigma_radius",      "y_in_ball",           "proximal_identity",
      "found_direction",   "direction_eps_bound", "line_eps_bound",
      "mu_consistency",    "line_search_exit",    "classification",
      "serious_vs_half",   "serious_sxi_half",    "error_bound",
      "separation",        "step_length_floor",   "projection",
      "null_index_inclusion", "fejer",            "boundedness",
      "direction_certificate", "certificate_status", "j_trend",
  };
  return names;
}

bool all_pass(const std::vector<AuditEntry>& audit) {
  return std::all_of(audit.begin(), audit.end(), [](const AuditEntry& e) { return e.pass; });
}

const AuditEntry* first_failure(const std::vector<AuditEntry>& audit) {
  for (const auto& e : audit) {
    if (!e.pass) return &e;
  }
  return nullptr;
}

std::vector<AuditEntry> audit_run(const ProblemInstance& problem, const SolverConfig& config,
                                  const SolveReport& report, const AuditOptions& opts) {
  Ledger led;
  const OperatorSpec& spec = problem.spec;
  const double big_r = config.radius;
  const double tau = config.tau;
  auto radius_at = [&](int e) { return std::ldexp(big_r, -e); };

  const std::optional<Vector>& xs = problem.known_solution;
  double reach = 0.0;
  double op_bound = 0.0;
  if (xs) {
    reach = (config.x0 - *xs).norm() + big_r;
    op_bound = local_bound(spec, *xs, reach);
  }
  auto bounded_point = [&](const Vector& p, std::size_t seq) {
    if (xs) led.check("boundedness", reach + kTol - (p - *xs).norm(), seq);
  };
  auto bounded_image = [&](const Vector& w, std::size_t seq) {
    if (xs) led.check("boundedness", op_bound + kTol - w.norm(), seq);
  };
  auto finite = [&](std::initializer_list<const Vector*> vs, std::initializer_list<double> ds,
                    std::size_t seq) {
    bool ok = true;
    for (const auto* v : vs) ok = ok && v->allFinite();
    for (double d : ds) ok = ok && std::isfinite(d);
    led.check("finite_values", ok ? 1.0 : -1.0, seq);
  };

  std::vector<std::tuple<std::size_t, int, std::size_t>> order;
  for (std::size_t i = 0; i < report.oracle_records.size(); ++i) order.emplace_back(report.oracle_records[i].seq, 0, i);
  for (std::size_t i = 0; i < report.line_records.size(); ++i) order.emplace_back(report.line_records[i].seq, 1, i);
  for (std::size_t i = 0; i < report.records.size(); ++i) order.emplace_back(report.records[i].seq, 2, i);
  std::sort(order.begin(), order.end());

  std::vector<Entry> bundle;
  std::size_t next_index = 0;
  Vector x = config.x0;
  std::vector<int> serious_j;

  for (const auto& [seq, kind, i] : order) {
    if (kind == 0) {
      const OracleRecord& o = report.oracle_records[i];
      finite({&o.x, &o.u}, {}, seq);
      led.check("oracle_consistency", same_vector(eval_oracle(spec, o.x), o.u) ? 1.0 : -1.0, seq);
      x = o.x;
      bounded_point(o.x, seq);
      bounded_image(o.u, seq);
      if (o.bundle_size + o.evicted.size() == bundle.size() + 1) {
        bundle.push_back({o.x, o.u, ++next_index});
      }
      for (auto idx : o.evicted) {
        auto it = std::find_if(bundle.begin(), bundle.end(), [&](const Entry& e) { return e.index == idx; });
        if (it == bundle.end()) {
          led.check("bundle_consistency", -1.0, seq);
        } else {
          bundle.erase(it);
        }
      }
      led.check("bundle_consistency", bundle.size() == o.bundle_size ? 1.0 : -1.0, seq);
      continue;
    }

    if (kind == 1) {
      const LineSearchRecord& o = report.line_records[i];
      finite({&o.y, &o.xi, &o.v}, {o.sigma, o.eps, o.eps_literal, o.mu}, seq);
      const double r = radius_at(o.l);
      const auto idx = ball(bundle, o.y, r);
      led.check("oracle_consistency", same_vector(eval_oracle(spec, o.y), o.xi) ? 1.0 : -1.0, seq);
      led.check("y_in_ball", r + kTol - (o.y - x).norm(), seq);
      led.check("line_eps_bound", 2.0 * o.mu * r + kTol - o.eps, seq);
      led.check("line_eps_bound", o.eps, seq);
      led.check("mu_consistency", 1e-12 - rel_gap(o.mu, max_w(bundle, idx)), seq);
      led.check("line_search_exit", o.l <= o.j + 1 ? 1.0 : -1.0, seq);
      bounded_point(o.y, seq);
      bounded_image(o.xi, seq);
      bounded_image(o.v, seq);
      continue;
    }

    const IterationRecord& o = report.records[i];
    finite({&o.x, &o.s, &o.y, &o.v, &o.xi, &o.e, &o.xhat},
           {o.sigma, o.c, o.eps, o.eps_literal, o.eps_hat, o.mu, o.mu_hat}, seq);
    led.check("oracle_consistency", same_vector(eval_oracle(spec, o.y), o.xi) ? 1.0 : -1.0, seq);
    const double rj = radius_at(o.j);
    const double rl = radius_at(o.l);
    const double s_norm = o.s.norm();
    const double s2 = o.s.squaredNorm();
    const auto dir_idx = ball(bundle, o.x, rj);
    const auto line_idx = ball(bundle, o.y, rl);

    led.check("bundle_consistency", same_vector(o.x, x) ? 1.0 : -1.0, seq);
    led.check("sigma_radius", kTol - std::abs(o.sigma * s_norm - rl), seq);
    led.check("y_in_ball", rl + kTol - (o.y - o.x).norm(), seq);
    led.check("proximal_identity", 1e-12 - (o.c * o.v + (o.y - o.x) - o.e).norm(), seq);
    led.check("found_direction", s_norm - std::ldexp(tau, -o.j), seq, true);
    led.check("direction_eps_bound", 2.0 * o.mu_hat * rj + kTol - o.eps_hat, seq);
    led.check("direction_eps_bound", o.eps_hat, seq);
    led.check("line_eps_bound", 2.0 * o.mu * rl + kTol - o.eps, seq);
    led.check("line_eps_bound", o.eps, seq);
    led.check("mu_consistency", 1e-12 - rel_gap(o.mu_hat, max_w(bundle, dir_idx)), seq);
    led.check("mu_consistency", 1e-12 - rel_gap(o.mu, max_w(bundle, line_idx)), seq);
    const bool exit_ok = o.l <= o.j + 1 && (o.step_kind == StepKind::Serious || o.l == o.j + 1);
    led.check("line_search_exit", exit_ok ? 1.0 : -1.0, seq);
    led.check("classification", classify_step(o.s, o.v, o.xi) == o.step_kind ? 1.0 : -1.0, seq);
    bounded_point(o.y, seq);
    bounded_image(o.xi, seq);
    bounded_image(o.v, seq);

    if (opts.certificate_samples > 0) {
      const GraphSample sample =
          sample_graph(spec, o.xhat, 2.0 * rj, opts.certificate_samples, opts.seed + seq);
      led.check("direction_certificate", enlargement_residual(o.xhat, o.s, o.eps_hat, sample) + kTol, seq);
    }

    if (o.step_kind == StepKind::Null) {
      // I_{k,n,l} must sit inside the direction set when l = j + 1.
      const auto dir_set = ball(bundle, o.x, rj);
      bool inside = true;
      for (auto li : line_idx) inside = inside && std::binary_search(dir_set.begin(), dir_set.end(), li);
      led.check("null_index_inclusion", inside ? 1.0 : -1.0, seq);
      bundle.push_back({o.y, o.xi, ++next_index});
      led.check("bundle_consistency", bundle.size() == o.bundle_size ? 1.0 : -1.0, seq);
      continue;
    }

    // Serious step.
    serious_j.push_back(o.j);
    led.check("serious_vs_half", o.v.dot(o.s) - 0.5 * s2 + kTol, seq);
    led.check("serious_sxi_half", o.s.dot(o.xi) - 0.5 * s2 + kTol, seq);
    led.check("error_bound",
              o.c * o.c * o.v.squaredNorm() + (o.y - o.x).squaredNorm() + kTol - o.e.squaredNorm(), seq);
    const double gap = (o.x - o.y).dot(o.xi);
    led.check("separation", gap - tau * big_r * std::ldexp(1.0, -o.l - o.j - 1) + 1e-12, seq, true);
    if (!o.x_next) {
      led.check("projection", -1.0, seq);
      continue;
    }
    const Vector& xn = *o.x_next;
    bounded_point(xn, seq);
    const double step = (xn - o.x).norm();
    led.check("step_length_floor", step * o.xi.norm() - tau * big_r * std::ldexp(1.0, -2 * (o.j + 1)) + kTol,
              seq, true);
    led.check("projection",
              kTol * o.xi.norm() * (o.x - o.y).norm() + 1e-15 - std::abs((xn - o.y).dot(o.xi)), seq);
    if (xs) {
      led.check("fejer", (o.x - *xs).squaredNorm() - step * step + kTol - (xn - *xs).squaredNorm(), seq);
    }
    x = xn;
  }

  if (!xs) {
    led.note("fejer", "skipped: no known solution");
    led.note("boundedness", "skipped: no known solution");
  }

  if (report.status == Status::Certificate && report.certificate) {
    const auto& cert = *report.certificate;
    const int j = report.certificate_j;
    const double rj = radius_at(j);
    const auto idx = ball(bundle, x, rj);
    led.check("certificate_status", std::ldexp(tau, -j) - cert.uhat.norm(), order.size());
    led.check("certificate_status", 2.0 * rj * max_w(bundle, idx) + kTol - cert.epshat, order.size());
    if (opts.certificate_samples > 0) {
      const GraphSample sample =
          sample_graph(spec, cert.xhat, 2.0 * rj, opts.certificate_samples, opts.seed + order.size());
      led.check("certificate_status", enlargement_residual(cert.xhat, cert.uhat, cert.epshat, sample) + kTol,
                order.size());
    }
  } else if (report.status == Status::Certificate) {
    led.check("certificate_status", -1.0, order.size());
  }

  const bool finished = report.status != Status::MaxIterations;
  if (finished && serious_j.size() >= 2) {
    const auto half = serious_j.size() / 2;
    const int first = *std::max_element(serious_j.begin(), serious_j.begin() + static_cast<std::ptrdiff_t>(half));
    const int second = *std::max_element(serious_j.begin() + static_cast<std::ptrdiff_t>(half), serious_j.end());
    led.check("j_trend", static_cast<double>(second - first), order.size());
  }

  return led.take();
}

}  // namespace monobundle
