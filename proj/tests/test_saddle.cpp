#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"
#include "isofree/numerics.hpp"
#include "isofree/saddle.hpp"
#include "test_support.hpp"

using namespace isofree;

namespace {

double log_cosh_mean(double beta) {
  const auto& rule = numerics::gauss_hermite(160);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double a = std::abs(beta * rule.nodes[i]);
    sum += rule.weights[i] * (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0));
  }
  return sum;
}

}  // namespace

TEST_CASE("multi-start minimizer finds a smooth interior optimum") {
  OptimizerOptions opts;
  opts.seed = 3;
  const OrderObjective f = [](const DiscreteOrderParameter& op) {
    if (op.levels() == 0) return 1.0;
    return std::pow(op.q()[0] - 0.3, 2) + std::pow(op.x()[0] - 0.6, 2);
  };
  const InnerResult res = minimize_order_parameter(f, 1.0, 1, opts);
  CHECK_FALSE(res.no_descent);
  REQUIRE(res.op.levels() == 1);
  CHECK(res.op.q()[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(res.op.x()[0] == doctest::Approx(0.6).epsilon(1e-3));
  REQUIRE(res.level_values.size() == 2);
  CHECK(res.level_values[1] <= res.level_values[0]);
}

TEST_CASE("no descent returns the lower-level optimum") {
  OptimizerOptions opts;
  opts.seed = 3;
  const OrderObjective f = [](const DiscreteOrderParameter& op) { return 1.0 + 0.1 * static_cast<double>(op.levels()); };
  const InnerResult res = minimize_order_parameter(f, 1.0, 1, opts);
  CHECK(res.no_descent);
  CHECK(res.op.levels() == 0);
  CHECK(res.value == 1.0);
}

TEST_CASE("outer maximization over r") {
  OptimizerOptions opts;
  opts.r_tol = 1e-7;
  auto inner = [](double r) {
    if (r > 0.8) throw Error(ErrorCode::OutOfRange, "infeasible");
    return InnerResult{DiscreteOrderParameter::validate(r, {}, {}), -std::pow(r - 0.35, 2), false, 0.0, {}, {}};
  };
  const SaddleResult res = maximize_over_r(inner, 0.0, 1.0, {0.5}, opts);
  CHECK(res.r_star == doctest::Approx(0.35).epsilon(1e-5));
}

TEST_CASE("linear hypercube saddle matches E log cosh") {
  const Correlator lin(CorrelatorSpec{CorrelatorKind::LongRange, 1.0, 0.0, {}});
  OptimizerOptions opts;
  opts.seed = 11;
  const SaddleResult res = optimize_saddle(lin, 0.5, StateSpace::hypercube(), 1, EvalConfig{}, opts);
  CHECK(res.r_star == doctest::Approx(1.0));
  CHECK(std::abs(res.value - log_cosh_mean(0.5)) < 1e-2);
  CHECK(optimize_saddle(lin, 0.5, StateSpace::hypercube(), 1, EvalConfig{}, opts).value == res.value);
}

TEST_CASE("beta = 0 shortcut") {
  const Correlator lin(CorrelatorSpec{CorrelatorKind::LongRange, 1.0, 0.0, {}});
  const StateSpace s = StateSpace::product({{-1.0, 1.0}, {1.0, 3.0}});
  const SaddleResult res = optimize_saddle(lin, 0.0, s, 2, EvalConfig{}, OptimizerOptions{});
  CHECK(res.value == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}
