#include "monobundle/rng.hpp"

#include <cmath>
#include <numbers>

namespace monobundle {

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector Rng::uniform_box(Eigen::Index dim, double lo, double hi) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
  return v;
}

Vector Rng::in_ball(const Vector& center, double radius) {
  const Eigen::Index dim = center.size();
  Vector dir(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) dir[i] = normal();
    norm = dir.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
  return center + (r / norm) * dir;
}

}  // namespace monobundle
