#pragma once

#include <cmath>
#include <vector>

#include "monobundle/oracle.hpp"
#include "monobundle/rng.hpp"

namespace monobundle::testing {

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// B B^T / N plus a skew part: monotone, usually not symmetric.
inline OperatorSpec random_affine(Rng& rng, Eigen::Index n) {
  const Matrix b = random_matrix(rng, n, n);
  const Matrix k = random_matrix(rng, n, n);
  Matrix a = b * b.transpose() / static_cast<double>(n) + (k - k.transpose()) / 2.0;
  return OperatorSpec::affine(std::move(a), rng.uniform_box(n, -1.0, 1.0));
}

inline OperatorSpec random_max_affine(Rng& rng, Eigen::Index n) {
  std::vector<AffinePiece> pieces;
  const int count = 2 + static_cast<int>(rng.uniform() * 4.0);
  for (int i = 0; i < count; ++i) pieces.push_back({rng.uniform_box(n, -2.0, 2.0), rng.uniform(-1.0, 1.0)});
  return OperatorSpec::max_affine(std::move(pieces));
}

inline OperatorSpec random_l1(Rng& rng, Eigen::Index n) {
  return OperatorSpec::scaled_l1(rng.uniform_box(n, 0.1, 2.0));
}

// kind: 0 affine, 1 max-affine, 2 scaled l1, 3 sum of all three.
inline OperatorSpec random_operator(Rng& rng, Eigen::Index n, int kind) {
  switch (kind % 4) {
    case 0: return random_affine(rng, n);
    case 1: return random_max_affine(rng, n);
    case 2: return random_l1(rng, n);
    default: {
      std::vector<OperatorSpec> parts{random_affine(rng, n), random_max_affine(rng, n), random_l1(rng, n)};
      return OperatorSpec::sum(std::move(parts));
    }
  }
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace monobundle::testing
