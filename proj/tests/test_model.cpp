#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"
#include "test_support.hpp"

using namespace isofree;
using test_support::raises;

TEST_CASE("hypercube and weighted product spaces") {
  const StateSpace cube = StateSpace::hypercube();
  CHECK(cube.is_product());
  CHECK(cube.effective_size() == 1.0);
  CHECK(cube.min_square() == 1.0);
  CHECK(cube.log_total_mass() == doctest::Approx(0.0));
  CHECK(cube.single_norm());

  const StateSpace s = StateSpace::product({{-1.0, 1.0}, {0.5, 2.0}});
  CHECK(s.effective_size() == 1.0);
  CHECK(s.min_square() == 0.25);
  CHECK(s.log_total_mass() == doctest::Approx(std::log(3.0)));
  CHECK_FALSE(s.single_norm());
}

TEST_CASE("state space validation") {
  CHECK(raises(ErrorCode::InvalidStateSpace, [] { StateSpace::product({{1.0, 1.0}}); }));
  CHECK(raises(ErrorCode::InvalidStateSpace, [] { StateSpace::product({{0.5, 1.0}, {1.0, 1.0}}); }));
  CHECK(raises(ErrorCode::InvalidStateSpace, [] { StateSpace::product({{-1.0, 0.0}, {1.0, 1.0}}); }));
  const StateSpace ball = StateSpace::ball(1.5, 0.0, 0.0);
  CHECK(ball.effective_size() == doctest::Approx(2.25));
  CHECK(raises(ErrorCode::BallVariantUnsupported, [&] { ball.as_product(); }));
}

TEST_CASE("order parameter validation and boundary conventions") {
  const auto op = DiscreteOrderParameter::validate(1.0, {0.2, 0.6}, {0.3, 0.7});
  CHECK(op.levels() == 2);
  CHECK(op.q_at(0) == 0.0);
  CHECK(op.q_at(3) == 1.0);
  CHECK(op.x_at(0) == 0.0);
  CHECK(op.x_at(2) == 0.7);
  CHECK(raises(ErrorCode::NotStrictlyIncreasing, [] { DiscreteOrderParameter::validate(1.0, {0.6, 0.2}, {0.3, 0.7}); }));
  CHECK(raises(ErrorCode::NotStrictlyIncreasing, [] { DiscreteOrderParameter::validate(1.0, {0.2, 0.6}, {0.7, 0.3}); }));
  CHECK(raises(ErrorCode::OutOfRange, [] { DiscreteOrderParameter::validate(1.0, {1.2}, {0.5}); }));
  CHECK(raises(ErrorCode::OutOfRange, [] { DiscreteOrderParameter::validate(1.0, {0.5}, {1.0}); }));
  CHECK_NOTHROW(DiscreteOrderParameter::weak(1.0, {0.5, 0.5}, {0.3, 0.3}));
}

TEST_CASE("hypercube boundary condition is log cosh plus lambda") {
  const StateSpace cube = StateSpace::hypercube();
  for (double lambda : {-1.0, 0.0, 0.7}) {
    for (double y : {-30.0, -1.0, 0.0, 0.4, 25.0}) {
      const double oracle = std::abs(1.3 * y) + std::log1p(std::exp(-2.0 * std::abs(1.3 * y))) - std::log(2.0) + lambda;
      CHECK(boundary_g(cube, 1.3, lambda, y) == doctest::Approx(oracle).epsilon(1e-13));
    }
  }
  const BoundaryCondition g(cube, 1.3, 0.0);
  CHECK(g.right().slope == doctest::Approx(1.3));
  CHECK(g.left().slope == doctest::Approx(-1.3));
  CHECK(g.slope_bound() == doctest::Approx(1.3));
  CHECK(g.derivative(0.5) == doctest::Approx(1.3 * std::tanh(0.65)));
}

TEST_CASE("weighted boundary condition") {
  const StateSpace s = StateSpace::product({{-1.0, 1.0}, {0.5, 2.0}});
  const double y = 0.3, beta = 0.8, lambda = 0.2;
  const double oracle = std::log(std::exp(-beta * y + lambda) + 2.0 * std::exp(0.5 * beta * y + 0.25 * lambda));
  CHECK(boundary_g(s, beta, lambda, y) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("theta Stieltjes sum") {
  const Correlator c(CorrelatorSpec{CorrelatorKind::LongRange, 0.0, 0.0, {{1.0, 1.0}}});
  const auto op = DiscreteOrderParameter::validate(1.0, {0.3, 0.7}, {0.4, 0.8});
  const double M = 1000.0;
  auto th = [&](double q) { return c.theta(1.0, M, q); };
  const double oracle = 0.4 * (th(0.7) - th(0.3)) + 0.8 * (th(1.0) - th(0.7));
  CHECK(theta_stieltjes_sum(op, c, M) == doctest::Approx(oracle).epsilon(1e-13));
}
