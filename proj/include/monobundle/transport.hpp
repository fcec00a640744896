#pragma once

#include <span>

#include "monobundle/hull.hpp"
#include "monobundle/oracle.hpp"

namespace monobundle {

// (eps, z, w) with w in T^eps(z).
struct Triplet {
  double eps = 0.0;
  Vector z;
  Vector w;
};

struct EnlargementElement {
  Vector xhat;
  Vector uhat;
  double epshat = 0.0;
};

/// Transportation formula: for convex weights alpha over m triplets,
///   xhat   = sum a_i z_i,   uhat = sum a_i w_i,
///   epshat = sum a_i eps_i + sum a_i <w_i - uhat, z_i - xhat>,
/// which yields uhat in T^epshat(xhat). Values above -1e-12 are clamped to 0.
EnlargementElement transport(std::span<const Triplet> triplets, const SimplexWeights& alpha);

struct EpsBound {
  double bound = 0.0;   // 2 * rho * max_i |w_i|
  double epshat = 0.0;  // from transport()
  bool holds = false;   // epshat <= bound + 1e-9
};

/// Enlargement bound for eps = 0 triplets clustered in B(center, rho).
/// Throws ContractViolation naming the first offending triplet.
EpsBound eps_bound(std::span<const Triplet> triplets, const SimplexWeights& alpha,
                   const Vector& center, double rho);

/// min over the sample of <y* - u, y - x> + eps. Negative values certify
/// u not in T^eps(x).
double enlargement_residual(const Vector& x, const Vector& u, double eps,
                            const GraphSample& sample);

}  // namespace monobundle
