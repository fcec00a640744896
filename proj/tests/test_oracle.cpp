#include <doctest.h>

#include "monobundle/oracle.hpp"
#include "monobundle/problems.hpp"
#include "support.hpp"

using namespace monobundle;
using monobundle::testing::vec;

TEST_CASE("eval_oracle on the reference operators") {
  Matrix a(2, 2);
  a << 2, 0, 0, 3;
  CHECK(eval_oracle(OperatorSpec::affine(a, vec({0, 0})), vec({1, 1})).isApprox(vec({2, 3})));

  CHECK(eval_oracle(OperatorSpec::scaled_l1(vec({1, 1})), vec({0, 0})) == vec({0, 0}));

  auto maxaff = OperatorSpec::max_affine({{vec({1, 0}), 0.0}, {vec({-1, 0}), 0.0}});
  CHECK(eval_oracle(maxaff, vec({0, 5})) == vec({1, 0}));
}

TEST_CASE("scaled l1 subgradient picks w_i sign(x_i)") {
  auto op = OperatorSpec::scaled_l1(vec({2, 0.5, 1}));
  CHECK(eval_oracle(op, vec({-3, 0, 1e-300})) == vec({-2, 0, 1}));
}

TEST_CASE("sum evaluates children and adds") {
  Matrix a = Matrix::Identity(2, 2);
  auto op = OperatorSpec::sum({OperatorSpec::affine(a, vec({1, 1})), OperatorSpec::scaled_l1(vec({1, 1}))});
  CHECK(eval_oracle(op, vec({2, -1})) == vec({4, -1}));
}

TEST_CASE("construction rejects invalid operators") {
  CHECK_THROWS_AS(OperatorSpec::affine(-Matrix::Identity(2, 2), vec({0, 0})), ContractViolation);
  Matrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(OperatorSpec::affine(rect, vec({0, 0})), ContractViolation);
  CHECK_THROWS_AS(OperatorSpec::scaled_l1(vec({1, -1})), ContractViolation);
  CHECK_THROWS_AS(OperatorSpec::max_affine({}), ContractViolation);
  CHECK_THROWS_AS(OperatorSpec::max_affine({{vec({1, 0}), 0.0}, {vec({1}), 0.0}}), ContractViolation);
  auto op = OperatorSpec::scaled_l1(vec({1, 1}));
  CHECK_THROWS_AS(eval_oracle(op, vec({1, 2, 3})), ContractViolation);
  CHECK_THROWS_AS(eval_oracle(op, vec({1, std::nan("")})), ContractViolation);
}

TEST_CASE("a skew matrix is accepted as monotone") {
  Matrix s(2, 2);
  s << 0, 1, -1, 0;
  CHECK_NOTHROW(OperatorSpec::affine(s, vec({0, 0})));
}

TEST_CASE("resolvent closed forms") {
  auto id = OperatorSpec::affine(Matrix::Identity(2, 2), vec({0, 0}));
  auto r = resolvent(id, vec({4, 0}), 1.0);
  REQUIRE(r);
  CHECK(r->isApprox(vec({2, 0})));

  auto l1 = OperatorSpec::scaled_l1(vec({1}));
  auto r1 = resolvent(l1, vec({3}), 1.0);
  REQUIRE(r1);
  CHECK((*r1)[0] == doctest::Approx(2.0));

  auto maxaff = OperatorSpec::max_affine({{vec({1, 0}), 0.0}});
  CHECK_FALSE(resolvent(maxaff, vec({1, 1}), 1.0).has_value());
  CHECK_FALSE(resolvent(OperatorSpec::sum({id, OperatorSpec::scaled_l1(vec({1, 1}))}), vec({1, 1}), 1.0).has_value());
}

TEST_CASE("resolvent output satisfies the proximal inclusion") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    auto op = monobundle::testing::random_affine(rng, 4);
    const Vector x = rng.uniform_box(4, -3, 3);
    const double c = rng.uniform(0.1, 5.0);
    const Vector y = *resolvent(op, x, c);
    CHECK((c * eval_oracle(op, y) + y - x).norm() <= 1e-10 * (1 + x.norm()));
  }
}

TEST_CASE("sample_graph") {
  Rng rng(3);
  auto op = monobundle::testing::random_max_affine(rng, 3);
  auto one = sample_graph(op, vec({0, 0, 0}), 1.0, 1, 42);
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0].ystar == eval_oracle(op, one.points[0].y));

  Matrix a(2, 2);
  a << 1, 2, -2, 0.5;
  auto aff = OperatorSpec::affine(a, vec({0.3, -1}));
  auto s = sample_graph(aff, vec({0, 0}), 1.0, 100, 9);
  CHECK(s.points.size() == 100);
  for (const auto& p : s.points) CHECK(p.y.norm() <= 1.0 + 1e-15);
  double worst = 0.0;
  for (const auto& p : s.points)
    for (const auto& q : s.points) worst = std::min(worst, (p.ystar - q.ystar).dot(p.y - q.y));
  CHECK(worst >= -1e-12);

  auto again = sample_graph(aff, vec({0, 0}), 1.0, 100, 9);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(s.points[i].y == again.points[i].y);
    CHECK(s.points[i].ystar == again.points[i].ystar);
  }
}

TEST_CASE("monotonicity over the operator library") {
  Rng rng(11);
  for (int kind = 0; kind < 4; ++kind) {
    for (Eigen::Index n : {1, 2, 5}) {
      auto op = monobundle::testing::random_operator(rng, n, kind);
      auto s = sample_graph(op, Vector::Zero(n), 3.0, 60, 100 + kind);
      double worst = 0.0;
      for (const auto& p : s.points)
        for (const auto& q : s.points) worst = std::min(worst, (p.ystar - q.ystar).dot(p.y - q.y));
      CHECK(worst >= -1e-12);
    }
  }
}

TEST_CASE("resolvents are firmly nonexpansive") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = 1 + t % 6;
    auto op = t % 2 ? monobundle::testing::random_affine(rng, n) : monobundle::testing::random_l1(rng, n);
    const Vector x = rng.uniform_box(n, -4, 4);
    const Vector y = rng.uniform_box(n, -4, 4);
    const Vector jx = *resolvent(op, x, 1.0);
    const Vector jy = *resolvent(op, y, 1.0);
    const double lhs = (jx - jy).squaredNorm() + ((x - jx) - (y - jy)).squaredNorm();
    CHECK(lhs <= (x - y).squaredNorm() + 1e-10);
  }
}

TEST_CASE("known solutions are resolvent fixed points") {
  for (const auto& name : builtin_problem_names()) {
    const auto p = builtin_problem(name, 0);
    REQUIRE(p.known_solution);
    for (double c : {0.5, 1.0, 4.0}) {
      const auto r = resolvent(p.spec, *p.known_solution, c);
      REQUIRE(r);
      CHECK((*r - *p.known_solution).norm() <= 1e-10);
    }
  }
}

TEST_CASE("local_bound dominates sampled oracle norms") {
  Rng rng(13);
  for (int kind = 0; kind < 4; ++kind) {
    auto op = monobundle::testing::random_operator(rng, 4, kind);
    const Vector c = rng.uniform_box(4, -1, 1);
    const double b = local_bound(op, c, 2.0);
    for (const auto& p : sample_graph(op, c, 2.0, 200, kind).points) CHECK(p.ystar.norm() <= b + 1e-12);
  }
}
