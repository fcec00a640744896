#pragma once

#include <cstdint>
#include <random>

#include "monobundle/types.hpp"

namespace monobundle {

// Portable deterministic stream. std::mt19937_64 output is fixed by the
// standard; the distribution helpers below are spelled out so that samples do
// not depend on the library's <random> distributions.
class Rng {
 public:
  static constexpr const char* kAlgorithm =
      "mt19937_64; uniform=(r>>11)*2^-53; normal=box-muller(cos branch); "
      "ball=gaussian direction, radius*u^(1/N)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();

  Vector uniform_box(Eigen::Index dim, double lo, double hi);

  // Uniform point of the closed ball B(center, radius).
  Vector in_ball(const Vector& center, double radius);

 private:
  std::mt19937_64 engine_;
};

}  // namespace monobundle
