#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monobundle/hull.hpp"
#include "monobundle/oracle.hpp"
#include "monobundle/transport.hpp"

namespace monobundle {

// Slack used for every ball-membership test on bundle points.
inline constexpr double kRadiusSlack = 1e-12;

enum class LambdaRule { BestVertex, MinNorm, Uniform };

struct CkRule {
  enum class Kind { EqualSigma, Constant };
  Kind kind = Kind::EqualSigma;
  double c = 1.0;

  static CkRule equal_sigma() { return {}; }
  static CkRule constant(double c) { return {Kind::Constant, c}; }
};

struct SolverConfig {
  Vector x0;
  double tau = 1e-3;
  double radius = 1.0;
  // Replaces the exact test u^k = 0. Unset: 1e-8 * (1 + |u^0|).
  std::optional<double> tol_stop;
  // Certificate trigger once R 2^-j drops below it. Unset: 1e-12 * R.
  std::optional<double> radius_floor;
  int max_serious = 10000;
  int max_null_per_serious = 10000;
  CkRule ck_rule;
  LambdaRule lambda_rule = LambdaRule::BestVertex;
  double minnorm_tol = 1e-12;
  // Oldest null-step entries outside B(x^k, R) are evicted past this size.
  std::optional<std::size_t> bundle_cap;

  double resolved_radius_floor() const { return radius_floor.value_or(1e-12 * radius); }
  void validate() const;
};

enum class EntryOrigin { SeriousIterate, NullStep };

struct BundleEntry {
  Vector z;
  Vector w;  // eval_oracle(spec, z), bit-exact
  EntryOrigin origin = EntryOrigin::SeriousIterate;
  std::size_t index = 0;  // p, 1-based and never reused
};

enum class StepKind { Serious, Null };

// One per outer iteration k: the oracle call at x^k.
struct OracleRecord {
  std::size_t seq = 0;
  int k = 0;
  Vector x;
  Vector u;
  std::size_t bundle_size = 0;
  std::vector<std::size_t> evicted;  // bundle indices dropped by bundle_cap
  std::int64_t wall_ns = 0;
};

// One pass of the line search at a given l.
struct LineSearchRecord {
  std::size_t seq = 0;
  int k = 0, n = 0, j = 0, l = 0;
  double sigma = 0.0;
  Vector y, xi, v;
  double eps = 0.0;
  double eps_literal = 0.0;
  double mu = 0.0;
  std::size_t bundle_size = 0;
  std::int64_t wall_ns = 0;
};

// End of a (k, n) pass: either a null step or the serious step of k.
struct IterationRecord {
  std::size_t seq = 0;
  int k = 0, n = 0, j = 0, l = 0;
  Vector x, s, y, v, xi;
  double sigma = 0.0;
  double c = 0.0;
  Vector e;  // c v - sigma s
  double eps = 0.0;
  double eps_literal = 0.0;  // same sum with direction weights
  double eps_hat = 0.0;      // direction certificate
  double mu = 0.0;           // max |w_i| over the line-search set
  double mu_hat = 0.0;       // max |w_i| over the direction set
  Vector xhat;
  StepKind step_kind = StepKind::Null;
  std::optional<Vector> x_next;
  std::size_t bundle_size = 0;
  std::int64_t wall_ns = 0;
};

enum class Status { ExactZero, Converged, Certificate, MaxIterations };

const char* to_string(Status s);
const char* to_string(StepKind s);
const char* to_string(LambdaRule r);
std::optional<LambdaRule> parse_lambda_rule(const std::string& name);

struct SolveReport {
  Status status = Status::MaxIterations;
  Vector x_final;
  std::optional<EnlargementElement> certificate;
  int certificate_j = 0;
  std::vector<OracleRecord> oracle_records;
  std::vector<LineSearchRecord> line_records;
  std::vector<IterationRecord> records;
  std::size_t bundle_size_final = 0;
  int serious_steps = 0;
  std::int64_t oracle_calls = 0;
  double tol_stop = 0.0;
  double radius_floor = 0.0;
  std::string message;
};

struct SolverState {
  int k = 0;
  int n = 0;
  int j = 0;
  std::size_t p = 0;
  Vector x;
  Vector u;
  std::vector<BundleEntry> bundle;
  std::vector<double> dist_to_x;  // |z_i - x^k|, parallel to bundle
  std::int64_t oracle_calls = 0;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  void append(Vector z, Vector w, EntryOrigin origin);
  void move_to(Vector x_new);
};

/// Positions i (in bundle order) with |z_i - center| <= radius + 1e-12.
std::vector<std::size_t> reduced_indices(const std::vector<BundleEntry>& bundle,
                                         const Vector& center, double radius);

struct DirectionResult {
  bool found = false;  // false: radius floor reached, certificate holds
  int j = 0;
  Vector s;
  SimplexWeights alpha;  // over bundle positions
  EnlargementElement cert;
  double mu_hat = 0.0;
  EpsBound bound;
};

/// Starting at state.j: shrink the ball around x^k until the
/// min-norm element of the reduced bundle's w-hull exceeds tau 2^-j.
DirectionResult search_direction(const SolverState& state, const SolverConfig& config);

struct LineSearchResult {
  int l = 0;
  Vector y, xi, v;
  double sigma = 0.0;
  double eps = 0.0;
  double eps_literal = 0.0;
  double mu = 0.0;
  std::vector<std::size_t> line_indices;
  bool zero_found = false;  // |xi| <= tol_stop at y
};

LineSearchResult line_search(SolverState& state, const OperatorSpec& spec,
                             const SolverConfig& config, const DirectionResult& dir,
                             double tol_stop, SolveReport* trace = nullptr);

// Null iff <v,s> < |s|^2/2 or <s,xi> < |s|^2/2 (strict; ties are serious).
StepKind classify_step(const Vector& s, const Vector& v, const Vector& xi);

/// x projected onto H_{y, xi}. Requires xi != 0 and <x - y, xi> > 0.
Vector serious_update(const Vector& x, const Vector& y, const Vector& xi);

/// Runs the full bundle method from config.x0.
SolveReport solve(const OperatorSpec& spec, const SolverConfig& config);

}  // namespace monobundle
