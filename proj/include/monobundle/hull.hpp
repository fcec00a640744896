#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "monobundle/types.hpp"

namespace monobundle {

// Convex weights over a set of (bundle) indices.
struct SimplexWeights {
  std::vector<double> weights;
  std::vector<std::size_t> index_set;

  std::size_t size() const { return weights.size(); }
};

struct MinNormOptions {
  // Relative tolerance of the Wolfe stopping test
  //   min_i <p_i, s> - |s|^2 >= -tol * max_i |p_i|^2.
  double tol = 1e-12;
  int max_major = 0;  // 0 -> 50 * (m + N)
};

struct MinNormResult {
  SimplexWeights alpha;
  Vector point;
  int major_iterations = 0;
  bool used_fallback = false;
};

/// Minimal-norm point of conv{vectors}: Wolfe's method with active-set
/// (minor cycle) corrections. Falls back to projected gradient over the
/// simplex if the major cycle repeats a corral.
MinNormResult min_norm_point(std::span<const Vector> vectors, const MinNormOptions& opts = {});

/// Same, restricted to pool[indices]; the returned index_set is `indices`.
MinNormResult min_norm_point(std::span<const Vector> pool, std::span<const std::size_t> indices,
                             const MinNormOptions& opts = {});

// Worst violation of the Wolfe certificate, i.e. max_i (-(<p_i - s, s>)) / (1 + |s|^2).
double wolfe_gap(std::span<const Vector> vectors, const Vector& s);

// Euclidean projection of v onto the unit simplex (sort-based).
Vector project_simplex(const Vector& v);

struct Halfspace {
  Vector anchor;
  Vector normal;

  // <z - anchor, normal> <= 0
  bool contains(const Vector& z) const { return (z - anchor).dot(normal) <= 0.0; }
};

/// Projection of x onto {z : <z - h.anchor, h.normal> <= 0} for x outside it.
Vector project_halfspace(const Vector& x, const Halfspace& h);

}  // namespace monobundle
