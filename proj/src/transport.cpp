#include "monobundle/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace monobundle {

namespace {

constexpr double kEpsClamp = 1e-12;
constexpr double kBoundSlack = 1e-9;

void check_weights(std::span<const Triplet> triplets, const SimplexWeights& alpha) {
  require(!triplets.empty(), "transport: empty triplet list");
  require(alpha.weights.size() == triplets.size(),
          "transport: " + std::to_string(alpha.weights.size()) + " weights for " +
              std::to_string(triplets.size()) + " triplets");
  const auto dim = triplets.front().z.size();
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    require(t.z.size() == dim && t.w.size() == dim,
            "transport: triplet " + std::to_string(i) + " has mismatched dimension");
    require(t.eps >= 0.0, "transport: triplet " + std::to_string(i) + " has negative eps");
    require(alpha.weights[i] >= 0.0, "transport: negative weight at " + std::to_string(i));
  }
  double sum = 0.0;
  for (double a : alpha.weights) sum += a;
  require(std::abs(sum - 1.0) <= 1e-9, "transport: weights sum to " + std::to_string(sum));
}

}  // namespace

EnlargementElement transport(std::span<const Triplet> triplets, const SimplexWeights& alpha) {
  check_weights(triplets, alpha);
  const auto dim = triplets.front().z.size();
  EnlargementElement out{Vector::Zero(dim), Vector::Zero(dim), 0.0};
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    out.xhat += alpha.weights[i] * triplets[i].z;
    out.uhat += alpha.weights[i] * triplets[i].w;
  }
  double eps = 0.0;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const double a = alpha.weights[i];
    if (a == 0.0) continue;
    eps += a * triplets[i].eps;
    eps += a * (triplets[i].w - out.uhat).dot(triplets[i].z - out.xhat);
  }
  if (eps < -kEpsClamp) {
    throw InternalError("transport: epshat = " + std::to_string(eps) + " below -1e-12");
  }
  out.epshat = std::max(eps, 0.0);
  return out;
}

EpsBound eps_bound(std::span<const Triplet> triplets, const SimplexWeights& alpha,
                   const Vector& center, double rho) {
  require(rho > 0.0, "eps_bound: rho must be positive");
  double max_w = 0.0;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    require(triplets[i].eps == 0.0,
            "eps_bound: triplet " + std::to_string(i) + " has nonzero eps");
    require((triplets[i].z - center).norm() <= rho + kBoundSlack,
            "eps_bound: triplet " + std::to_string(i) + " lies outside B(center, rho)");
    max_w = std::max(max_w, triplets[i].w.norm());
  }
  const EnlargementElement el = transport(triplets, alpha);
  if ((el.xhat - center).norm() > rho + kBoundSlack) {
    throw InternalError("eps_bound: xhat left B(center, rho)");
  }
  EpsBound out;
  out.bound = 2.0 * rho * max_w;
  out.epshat = el.epshat;
  out.holds = el.epshat <= out.bound + kBoundSlack;
  return out;
}

double enlargement_residual(const Vector& x, const Vector& u, double eps,
                            const GraphSample& sample) {
  require(!sample.points.empty(), "enlargement_residual: empty sample");
  require(x.size() == u.size(), "enlargement_residual: dimension mismatch");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& pt : sample.points) {
    require(pt.y.size() == x.size(), "enlargement_residual: sample dimension mismatch");
    worst = std::min(worst, (pt.ystar - u).dot(pt.y - x));
  }
  return worst + eps;
}

}  // namespace monobundle
