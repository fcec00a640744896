#include <doctest.h>

#include <numeric>

#include "grid_oracle.hpp"
#include "monobundle/hull.hpp"
#include "support.hpp"

using namespace monobundle;
using monobundle::testing::vec;

namespace {

void check_simplex(const SimplexWeights& a, std::size_t m) {
  REQUIRE(a.weights.size() == a.index_set.size());
  double sum = 0.0;
  for (double w : a.weights) {
    CHECK(w >= 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  for (auto i : a.index_set) CHECK(i < m);
}

Vector combine(const std::vector<Vector>& pts, const SimplexWeights& a) {
  Vector s = Vector::Zero(pts[0].size());
  for (std::size_t t = 0; t < a.size(); ++t) s += a.weights[t] * pts[a.index_set[t]];
  return s;
}

double wolfe_violation(const std::vector<Vector>& pts, const Vector& s) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, s.squaredNorm() - p.dot(s));
  return worst;
}

}  // namespace

TEST_CASE("min_norm_point reference sets") {
  std::vector<Vector> one{vec({3, 4})};
  auto r1 = min_norm_point(one);
  CHECK(r1.point == vec({3, 4}));
  check_simplex(r1.alpha, 1);

  std::vector<Vector> pair{vec({1, 0}), vec({-1, 0})};
  auto r2 = min_norm_point(pair);
  CHECK(r2.point.norm() <= 1e-15);
  check_simplex(r2.alpha, 2);
  CHECK(combine(pair, r2.alpha).norm() <= 1e-15);

  std::vector<Vector> tri{vec({1, 0}), vec({0, 1}), vec({1, 1})};
  auto r3 = min_norm_point(tri);
  CHECK(r3.point.isApprox(vec({0.5, 0.5}), 1e-12));
  CHECK(r3.point.squaredNorm() == doctest::Approx(0.5));
  CHECK(testing::grid_min_norm(tri, 1e-3).value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("min_norm_point agrees with brute force") {
  Rng rng(2024);
  for (int t = 0; t < 120; ++t) {
    const Eigen::Index dim = 2 + t % 2;
    const std::size_t m = 1 + static_cast<std::size_t>(t % 4);
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < m; ++i) pts.push_back(rng.uniform_box(dim, -1, 1) + vec({0.5, 0.2, 0.1}).head(dim));
    auto r = min_norm_point(pts);
    check_simplex(r.alpha, m);
    CHECK((combine(pts, r.alpha) - r.point).norm() <= 1e-12);
    const double ours = r.point.squaredNorm();
    CHECK(std::abs(ours - testing::face_min_norm(pts)) <= 1e-9);
    CHECK(ours <= testing::grid_min_norm(pts, 1e-2, 1e-8).value + 1e-12);
    CHECK(wolfe_violation(pts, r.point) <= 1e-9);
    CHECK(wolfe_gap(pts, r.point) <= 1e-9);
  }
}

TEST_CASE("min_norm_point tolerates duplicates and collinear points") {
  std::vector<Vector> dup{vec({1, 1}), vec({1, 1}), vec({1, 1}), vec({2, 2})};
  auto r = min_norm_point(dup);
  CHECK(r.point.isApprox(vec({1, 1}), 1e-12));
  check_simplex(r.alpha, dup.size());

  std::vector<Vector> line{vec({-1, 1}), vec({0, 1}), vec({1, 1}), vec({2, 1}), vec({0, 1})};
  auto l = min_norm_point(line);
  CHECK(l.point.isApprox(vec({0, 1}), 1e-12));

  std::vector<Vector> tiny{vec({1e-14, 0}), vec({-1e-14, 1e-15})};
  auto s = min_norm_point(tiny);
  CHECK(wolfe_violation(tiny, s.point) <= 1e-30);
}

TEST_CASE("min_norm_point over an index subset") {
  std::vector<Vector> pool{vec({5, 5}), vec({1, 0}), vec({9, 9}), vec({0, 1})};
  std::vector<std::size_t> idx{1, 3};
  auto r = min_norm_point(pool, idx);
  CHECK(r.point.isApprox(vec({0.5, 0.5}), 1e-12));
  for (auto i : r.alpha.index_set) CHECK((i == 1 || i == 3));
}

TEST_CASE("min_norm_point in higher dimension keeps the Wolfe certificate") {
  Rng rng(99);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index dim = 10;
    std::vector<Vector> pts;
    const int m = 5 + t;
    for (int i = 0; i < m; ++i) pts.push_back(rng.uniform_box(dim, -1, 1));
    auto r = min_norm_point(pts);
    check_simplex(r.alpha, pts.size());
    CHECK(wolfe_violation(pts, r.point) <= 1e-9);
  }
}

TEST_CASE("min_norm_point rejects bad input") {
  std::vector<Vector> none;
  CHECK_THROWS_AS(min_norm_point(none), ContractViolation);
  std::vector<Vector> mixed{vec({1, 0}), vec({1})};
  CHECK_THROWS_AS(min_norm_point(mixed), ContractViolation);
}

TEST_CASE("project_simplex") {
  CHECK(project_simplex(vec({0.2, 0.3, 0.5})).isApprox(vec({0.2, 0.3, 0.5})));
  CHECK(project_simplex(vec({2, 0})).isApprox(vec({1, 0})));
  const Vector p = project_simplex(vec({0.5, 0.5, 2}));
  CHECK(p.isApprox(vec({0, 0, 1})));
  const Vector q = project_simplex(vec({1, 1}));
  CHECK(q.isApprox(vec({0.5, 0.5})));
}

TEST_CASE("project_halfspace reference cases") {
  CHECK(project_halfspace(vec({0, 2}), {vec({0, 0}), vec({0, 1})}).isApprox(vec({0, 0})));
  CHECK(project_halfspace(vec({1, 1}), {vec({0, 0}), vec({1, 0})}).isApprox(vec({0, 1})));
  CHECK(project_halfspace(vec({2, 2}), {vec({1, 0}), vec({1, 1})}).isApprox(vec({0.5, 0.5})));
  // Already inside: unchanged.
  CHECK(project_halfspace(vec({-1, 0}), {vec({0, 0}), vec({1, 0})}) == vec({-1, 0}));
  CHECK_THROWS_AS(project_halfspace(vec({1, 1}), {vec({0, 0}), vec({0, 0})}), ContractViolation);
}

TEST_CASE("project_halfspace agrees with a grid search") {
  // x=(2,2), H = {z : <z-(1,0),(1,1)> <= 0}; scan the boundary line.
  double best = 1e300;
  Vector arg;
  for (int i = -4000; i <= 4000; ++i) {
    const double t = i * 1e-3;
    const Vector z = vec({1, 0}) + t * vec({-1, 1});
    const double d = (z - vec({2, 2})).squaredNorm();
    if (d < best) best = d, arg = z;
  }
  CHECK(arg.isApprox(vec({0.5, 0.5}), 1e-9));
}

TEST_CASE("projection is idempotent and firmly nonexpansive") {
  Rng rng(17);
  for (int t = 0; t < 300; ++t) {
    const Eigen::Index n = 1 + t % 5;
    Halfspace h{rng.uniform_box(n, -1, 1), rng.uniform_box(n, -1, 1) + Vector::Constant(n, 0.1)};
    const Vector x = rng.uniform_box(n, -5, 5);
    const Vector px = project_halfspace(x, h);
    CHECK((project_halfspace(px, h) - px).norm() <= 1e-9);
    CHECK((px - h.anchor).dot(h.normal) <= 1e-12 * (1 + x.norm()));
    Vector z = rng.uniform_box(n, -5, 5);
    z = project_halfspace(z, h);
    CHECK((px - z).squaredNorm() <= (x - z).squaredNorm() - (px - x).squaredNorm() + 1e-9);
  }
}
