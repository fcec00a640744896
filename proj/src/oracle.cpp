#include "monobundle/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "monobundle/rng.hpp"

namespace monobundle {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_dim(const OperatorSpec& spec, const Vector& x, const char* name) {
  if (x.size() != spec.dimension()) {
    throw ContractViolation(std::string(name) + ": dimension " + std::to_string(x.size()) +
                            " does not match operator dimension " +
                            std::to_string(spec.dimension()));
  }
  require_finite(x, name);
}

constexpr double kTieTol = 1e-12;

}  // namespace

OperatorSpec OperatorSpec::affine(Matrix a, Vector b) {
  require(a.rows() > 0 && a.rows() == a.cols(), "affine: matrix must be square and nonempty");
  require(b.size() == a.rows(), "affine: offset length must match matrix size");
  require(a.allFinite() && b.allFinite(), "affine: non-finite coefficients");
  const Matrix sym = a + a.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < -kMonotonicityTol) {
    throw ContractViolation("affine: A + A^T has eigenvalue " + std::to_string(lowest) +
                            " < 0, operator is not monotone");
  }
  const auto dim = a.rows();
  return OperatorSpec(Affine{std::move(a), std::move(b)}, dim);
}

OperatorSpec OperatorSpec::max_affine(std::vector<AffinePiece> pieces) {
  require(!pieces.empty(), "max_affine: at least one piece required");
  const auto dim = pieces.front().slope.size();
  require(dim > 0, "max_affine: empty slope");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    require(pieces[i].slope.size() == dim,
            "max_affine: piece " + std::to_string(i) + " has mismatched dimension");
    require(pieces[i].slope.allFinite() && std::isfinite(pieces[i].intercept),
            "max_affine: piece " + std::to_string(i) + " is not finite");
  }
  return OperatorSpec(MaxAffine{std::move(pieces)}, dim);
}

OperatorSpec OperatorSpec::scaled_l1(Vector weights) {
  require(weights.size() > 0, "scaled_l1: empty weights");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    require(std::isfinite(weights[i]) && weights[i] > 0.0,
            "scaled_l1: weight " + std::to_string(i) + " must be positive");
  }
  const auto dim = weights.size();
  return OperatorSpec(ScaledL1{std::move(weights)}, dim);
}

OperatorSpec OperatorSpec::sum(std::vector<OperatorSpec> children) {
  require(!children.empty(), "sum: at least one child required");
  const auto dim = children.front().dimension();
  for (const auto& c : children) require(c.dimension() == dim, "sum: children differ in dimension");
  return OperatorSpec(Sum{std::move(children)}, dim);
}

namespace {

Vector eval_unchecked(const OperatorSpec& spec, const Vector& x) {
  return std::visit(
      overloaded{
          [&](const OperatorSpec::Affine& op) -> Vector { return op.a * x + op.b; },
          [&](const OperatorSpec::MaxAffine& op) -> Vector {
            std::vector<double> values(op.pieces.size());
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < op.pieces.size(); ++i) {
              values[i] = op.pieces[i].slope.dot(x) + op.pieces[i].intercept;
              best = std::max(best, values[i]);
            }
            for (std::size_t i = 0; i < op.pieces.size(); ++i) {
              if (values[i] >= best - kTieTol) return op.pieces[i].slope;
            }
            throw InternalError("max_affine: no active piece");
          },
          [&](const OperatorSpec::ScaledL1& op) -> Vector {
            Vector u(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              const double sgn = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
              u[i] = op.weights[i] * sgn;
            }
            return u;
          },
          [&](const OperatorSpec::Sum& op) -> Vector {
            Vector u = Vector::Zero(x.size());
            for (const auto& child : op.children) u += eval_unchecked(child, x);
            return u;
          },
      },
      spec.kind());
}

}  // namespace

Vector eval_oracle(const OperatorSpec& spec, const Vector& x) {
  check_dim(spec, x, "eval_oracle");
  return eval_unchecked(spec, x);
}

std::optional<Vector> resolvent(const OperatorSpec& spec, const Vector& x, double c) {
  check_dim(spec, x, "resolvent");
  require(c > 0.0 && std::isfinite(c), "resolvent: c must be positive");
  if (const auto* op = std::get_if<OperatorSpec::Affine>(&spec.kind())) {
    const Eigen::Index n = x.size();
    const Matrix m = Matrix::Identity(n, n) + c * op->a;
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) throw InternalError("resolvent: I + cA is singular");
    return Vector(lu.solve(x - c * op->b));
  }
  if (const auto* op = std::get_if<OperatorSpec::ScaledL1>(&spec.kind())) {
    Vector y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double mag = std::max(std::abs(x[i]) - c * op->weights[i], 0.0);
      y[i] = x[i] > 0.0 ? mag : (x[i] < 0.0 ? -mag : 0.0);
    }
    return y;
  }
  return std::nullopt;
}

GraphSample sample_graph(const OperatorSpec& spec, const Vector& center, double radius, int count,
                         std::uint64_t seed) {
  check_dim(spec, center, "sample_graph");
  require(count >= 1, "sample_graph: count must be >= 1");
  require(radius > 0.0 && std::isfinite(radius), "sample_graph: radius must be positive");
  GraphSample sample;
  sample.seed = seed;
  sample.count = count;
  sample.points.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    Vector y = rng.in_ball(center, radius);
    Vector ystar = eval_unchecked(spec, y);
    sample.points.push_back({std::move(y), std::move(ystar)});
  }
  return sample;
}

double local_bound(const OperatorSpec& spec, const Vector& center, double radius) {
  check_dim(spec, center, "local_bound");
  return std::visit(
      overloaded{
          [&](const OperatorSpec::Affine& op) {
            Eigen::JacobiSVD<Matrix> svd(op.a);
            const double opnorm = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
            return (op.a * center + op.b).norm() + opnorm * radius;
          },
          [&](const OperatorSpec::MaxAffine& op) {
            double m = 0.0;
            for (const auto& piece : op.pieces) m = std::max(m, piece.slope.norm());
            return m;
          },
          [&](const OperatorSpec::ScaledL1& op) { return op.weights.norm(); },
          [&](const OperatorSpec::Sum& op) {
            double total = 0.0;
            for (const auto& child : op.children) total += local_bound(child, center, radius);
            return total;
          },
      },
      spec.kind());
}

}  // namespace monobundle
