#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"
#include "isofree/parisi.hpp"
#include "test_support.hpp"

using namespace isofree;
using test_support::raises;

namespace {

Correlator single_atom() { return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, 0.0, 0.0, {{1.0, 1.0}}}); }
Correlator linear() { return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, 1.0, 0.0, {}}); }

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// E exp(log_f(Z)) and E f(Z) for Z ~ N(0, 1), truncated at |z| = 40.
double gaussian_mean_exp(const std::function<double(double)>& log_f) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double z) { return std::exp(log_f(z) - 0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  return gauss_kronrod<double, 61>::integrate(integrand, -40.0, 40.0, 15, 1e-13);
}

double gaussian_mean(const std::function<double(double)>& f) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double z) { return f(z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  return gauss_kronrod<double, 61>::integrate(integrand, -40.0, 40.0, 15, 1e-13);
}

// One-level recursion by nested adaptive quadrature on the hypercube at lambda = 0.
double brute_force_f00(const Correlator& c, const DiscreteOrderParameter& op, double M, double beta) {
  const double m1 = c.D_prime_M(2.0 * (op.r() - op.q()[0]), M);
  const double x = op.x()[0];
  const double top = std::sqrt(M - m1), bottom = std::sqrt(m1);
  auto f1 = [&](double y) {
    const double shift = x * log_cosh(beta * y);
    const double inner = gaussian_mean_exp([&](double z) { return x * log_cosh(beta * (y + top * z)) - shift; });
    return log_cosh(beta * y) + std::log(inner) / x;
  };
  return gaussian_mean([&](double z) { return f1(bottom * z); });
}

}  // namespace

TEST_CASE("level variances telescope to M") {
  const auto op = DiscreteOrderParameter::validate(1.0, {0.2, 0.6}, {0.3, 0.7});
  const auto v = level_variances(single_atom(), op, 500.0);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(single_atom().D_prime(1.6)));
  CHECK(v[0] + v[1] + v[2] == doctest::Approx(500.0));
  for (double d : v) CHECK(d >= 0.0);
}

TEST_CASE("recursion matches nested quadrature") {
  const StateSpace cube = StateSpace::hypercube();
  for (auto [q, x, M] : {std::tuple{0.5, 0.5, 4.0}, std::tuple{0.2, 0.8, 10.0}}) {
    const auto op = DiscreteOrderParameter::validate(1.0, {q}, {x});
    const double oracle = brute_force_f00(single_atom(), op, M, 1.0);
    const double value = solve_recursion(single_atom(), op, M, 1.0, 0.0, cube, EvalConfig{}).f00;
    CHECK(value == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("finite-difference solver agrees with the recursion") {
  const StateSpace cube = StateSpace::hypercube();
  const auto op = DiscreteOrderParameter::validate(1.0, {0.5}, {0.5});
  const double a = solve_recursion(single_atom(), op, 100.0, 1.0, 0.0, cube, EvalConfig{}).f00;
  const double b = solve_pde_fd(single_atom(), op, 100.0, 1.0, 0.0, cube, EvalConfig{});
  CHECK(std::abs(a - b) < 5e-3);
}

TEST_CASE("beta = 0 gives the log mass") {
  const StateSpace s = StateSpace::product({{-1.0, 1.0}, {1.0, 2.0}});
  const auto op = DiscreteOrderParameter::validate(1.0, {0.5}, {0.5});
  const auto res = local_parisi(linear(), op, 0.0, s, EvalConfig{});
  CHECK(res.value == doctest::Approx(std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("lambda shifts cancel on the hypercube at r = 1") {
  const StateSpace cube = StateSpace::hypercube();
  const auto op = DiscreteOrderParameter::validate(1.0, {0.4}, {0.6});
  const double v0 = fixed_lambda_value(single_atom(), op, 1e3, 1.0, 0.0, cube, EvalConfig{});
  for (double lambda : {-2.0, 1.5}) {
    CHECK(std::abs(fixed_lambda_value(single_atom(), op, 1e3, 1.0, lambda, cube, EvalConfig{}) - v0) < 1e-10);
  }
  const auto inf = lambda_infimum(single_atom(), op, 1e3, 1.0, cube, EvalConfig{});
  CHECK(inf.value == doctest::Approx(v0).epsilon(1e-10));
  CHECK(raises(ErrorCode::InfimumDiverges, [&] {
    lambda_infimum(single_atom(), DiscreteOrderParameter::validate(0.5, {0.2}, {0.6}), 1e3, 1.0, cube, EvalConfig{});
  }));
}

TEST_CASE("lambda infimum on a weighted space is a stationary point") {
  const StateSpace s = StateSpace::product({{-1.0, 1.0}, {0.5, 1.0}});
  const auto op = DiscreteOrderParameter::validate(0.6, {0.3}, {0.5});
  const auto inf = lambda_infimum(single_atom(), op, 1e3, 1.0, s, EvalConfig{});
  for (double h : {-0.05, 0.05}) {
    CHECK(fixed_lambda_value(single_atom(), op, 1e3, 1.0, inf.lambda_star + h, s, EvalConfig{}) >= inf.value - 1e-9);
  }
}

TEST_CASE("plateau in M on the linear hypercube") {
  const StateSpace cube = StateSpace::hypercube();
  const auto op = DiscreteOrderParameter::validate(1.0, {0.5}, {0.9});
  const auto res = local_parisi(linear(), op, 1.0, cube, EvalConfig{});
  REQUIRE(res.per_M.size() == 3);
  CHECK(res.plateau_dev < 1e-5);
  CHECK(std::abs(res.per_M.front().value - res.per_M.back().value) < 5e-3);
}

TEST_CASE("eval config validation") {
  EvalConfig cfg;
  cfg.M_grid = {0.5};
  CHECK(raises(ErrorCode::MTooSmall, [&] { validate_eval_config(cfg, linear()); }));
  cfg = EvalConfig{};
  cfg.y_points = 2;
  CHECK(raises(ErrorCode::InvalidArgument, [&] { validate_eval_config(cfg, single_atom()); }));
}
