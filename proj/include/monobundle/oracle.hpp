#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "monobundle/types.hpp"

namespace monobundle {

struct AffinePiece {
  Vector slope;
  double intercept = 0.0;
};

/// Immutable description of a full-domain maximal monotone operator T on R^N.
///
/// Four families are available: affine maps x -> Ax + b with A + A^T
/// positive semidefinite, the subdifferential of a max of affine functions,
/// the subdifferential of a weighted l1 norm, and finite sums of these.
/// Construction validates monotonicity and dimensions; copies share state.
class OperatorSpec {
 public:
  struct Affine {
    Matrix a;
    Vector b;
  };
  struct MaxAffine {
    std::vector<AffinePiece> pieces;
  };
  struct ScaledL1 {
    Vector weights;
  };
  struct Sum {
    std::vector<OperatorSpec> children;
  };
  using Kind = std::variant<Affine, MaxAffine, ScaledL1, Sum>;

  static constexpr double kMonotonicityTol = 1e-10;

  static OperatorSpec affine(Matrix a, Vector b);
  static OperatorSpec max_affine(std::vector<AffinePiece> pieces);
  static OperatorSpec scaled_l1(Vector weights);
  static OperatorSpec sum(std::vector<OperatorSpec> children);

  Eigen::Index dimension() const { return dim_; }
  const Kind& kind() const { return *kind_; }

 private:
  OperatorSpec(Kind kind, Eigen::Index dim)
      : kind_(std::make_shared<const Kind>(std::move(kind))), dim_(dim) {}

  std::shared_ptr<const Kind> kind_;
  Eigen::Index dim_;
};

struct GraphPoint {
  Vector y;
  Vector ystar;
};

struct GraphSample {
  std::vector<GraphPoint> points;
  std::uint64_t seed = 0;
  int count = 0;
};

/// Deterministic selection u in T(x). Ties in the max-affine family go to the
/// lowest active index (absolute tolerance 1e-12); sign(0) = 0 for l1.
Vector eval_oracle(const OperatorSpec& spec, const Vector& x);

/// Unique y with 0 in cT(y) + (y - x), when a closed form is provided
/// (affine and scaled-l1 families only).
std::optional<Vector> resolvent(const OperatorSpec& spec, const Vector& x, double c);

GraphSample sample_graph(const OperatorSpec& spec, const Vector& center, double radius,
                         int count, std::uint64_t seed);

// Upper bound on ||u|| over u = eval_oracle(spec, z), z in B(center, radius).
double local_bound(const OperatorSpec& spec, const Vector& center, double radius);

}  // namespace monobundle
