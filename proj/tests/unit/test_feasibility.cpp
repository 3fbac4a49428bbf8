#include <doctest.h>

#include <tweezer/feasibility.hpp>
#include <tweezer/rng.hpp>
#include <tweezer/simplex.hpp>

using namespace tweezer;

TEST_CASE("simplex solves a textbook LP") {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 2, 3, 2;
  const LpResult r = maximize_lp(Eigen::Vector2d(3, 5), a, Eigen::Vector3d(4, 12, 18));
  CHECK(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(36));
  CHECK(r.x[0] == doctest::Approx(2));
  CHECK(r.x[1] == doctest::Approx(6));

  Eigen::MatrixXd open(1, 2);
  open << 1, -1;
  CHECK(maximize_lp(Eigen::Vector2d(1, 1), open, Eigen::VectorXd::Ones(1)).status == LpStatus::Unbounded);
}

TEST_CASE("elementary feasibility verdicts") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const auto v = feasibility_test(id);
  CHECK(v.feasible);
  CHECK(v.margin == doctest::Approx(1.0));
  CHECK(v.witness[0] == doctest::Approx(1.0));
  CHECK(v.witness[1] == doctest::Approx(1.0));

  Eigen::MatrixXd opposed(2, 2);
  opposed << 1, 0, -1, 0;
  CHECK_FALSE(feasibility_test(opposed).feasible);

  const auto empty = feasibility_test(Eigen::MatrixXd(0, 3));
  CHECK(empty.feasible);
  CHECK(empty.witness.size() == 3);
  CHECK(empty.witness.cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::isinf(empty.margin));

  Eigen::MatrixXd neg(1, 2);
  neg << -1, -2;
  CHECK(feasibility_test(neg, PinningSign::Free).feasible);
  CHECK_FALSE(feasibility_test(neg, PinningSign::Nonnegative).feasible);

  CHECK_FALSE(feasibility_test(Eigen::MatrixXd::Zero(1, 2)).feasible);
}

TEST_CASE("sampling agrees with the LP on small systems") {
  CounterRng rng(5, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = 1 + int(rng.uniform() * 4), p = 1 + int(rng.uniform() * 4);
    Eigen::MatrixXd x(c, p);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < p; ++j) x(i, j) = rng.uniform(-1, 1);
    const auto v = feasibility_test(x);
    if (v.feasible) {
      CHECK(((x * v.witness).array() > 0).all());
    } else {
      bool sampled = false;
      for (int s = 0; s < 4000 && !sampled; ++s) {
        Eigen::VectorXd w(p);
        for (int j = 0; j < p; ++j) w[j] = rng.uniform(-1, 1);
        sampled = ((x * w).array() > 1e-6).all();
      }
      CHECK_FALSE(sampled);
    }
  }
}

TEST_CASE("sign constraints from coupling differences") {
  Eigen::MatrixXd native(3, 3);
  native << 0, 2, 1, 2, 0, -1, 1, -1, 0;
  const Eigen::MatrixXd target = native / 2.0;
  CouplingGradient g;
  g.pairs = all_pairs(3);
  g.rows = Eigen::MatrixXd::Ones(3, 3);
  const auto same = build_sign_constraints(target, native, g, g.pairs);
  CHECK(same.constraint_count() == 0);
  CHECK(feasibility_test(same).feasible);

  Eigen::MatrixXd t2 = target;
  t2(0, 2) = t2(2, 0) = 0.9;
  g.rows.row(1) << 0.5, 0.1, 0.2;
  const auto one = build_sign_constraints(t2, native, g, g.pairs);
  REQUIRE(one.constraint_count() == 1);
  CHECK(one.provenance[0].pair == IonPair{0, 2});
  CHECK(one.provenance[0].sign == 1);
  CHECK(one.x.row(0).transpose() == g.rows.row(1).transpose());

  CouplingGradient partial = g;
  partial.pairs.pop_back();
  partial.rows.conservativeResize(2, 3);
  CHECK_THROWS_AS(build_sign_constraints(t2, native, partial, all_pairs(3)), Error);
}

TEST_CASE("round-off gradients below the floor become zero rows") {
  Eigen::MatrixXd native(3, 3);
  native << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  Eigen::MatrixXd target = native;
  target(0, 2) = target(2, 0) = 0.5;
  CouplingGradient g;
  g.pairs = {{0, 2}};
  g.rows = Eigen::MatrixXd::Constant(1, 3, 1e-40);
  const auto noisy = build_sign_constraints(target, native, g, g.pairs);
  CHECK(feasibility_test(noisy).feasible);
  const auto floored = build_sign_constraints(target, native, g, g.pairs, -1.0, default_gradient_floor(native, 1.0));
  REQUIRE(floored.constraint_count() == 1);
  CHECK(floored.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(feasibility_test(floored).feasible);
}
