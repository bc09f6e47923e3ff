#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isofree/correlator.hpp"
#include "isofree/crisanti_sommers.hpp"
#include "test_support.hpp"

using namespace isofree;
using test_support::raises;

namespace {

Correlator single_atom() { return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, 0.0, 0.0, {{1.0, 1.0}}}); }

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

// One-level functional with x(q) = x1 on [0, q1), 1 on [q1, r].
double one_level_oracle(const CSInstance& inst, double r, double q1, double x1) {
  auto x_of = [&](double q) { return q < q1 ? x1 : 1.0; };
  auto tail = [&](double q) { return q < q1 ? x1 * (q1 - q) + (r - q1) : r - q; };
  const Correlator& c = inst.correlator;
  const double inverse = integrate([&](double q) { return 1.0 / tail(q); }, 0.0, q1);
  const double field = integrate([&](double q) { return c.D_prime(2.0 * (r - q)) * x_of(q); }, 0.0, q1);
  const double x_int = x1 * q1 + (r - q1);
  return 0.5 * (std::log(r - q1) + inverse + inst.h1 * inst.h1 * x_int - inst.h2 * r) +
         0.5 * inst.beta * inst.beta * (c.D_prime(2.0 * (r - q1)) + field);
}

}  // namespace

TEST_CASE("closed form against quadrature") {
  for (auto [beta, h1, h2, L, r, q, x] : {std::tuple{1.0, 0.5, 0.2, 1.2, 1.0, 0.4, 0.3},
                                          std::tuple{0.3, 0.0, 0.0, 1.0, 0.7, 0.1, 0.9},
                                          std::tuple{2.0, -1.0, 0.5, 2.0, 3.5, 2.0, 0.05}}) {
    const CSInstance inst{single_atom(), beta, h1, h2, L};
    const double value = eval_cs(inst, r, DiscreteOrderParameter::validate(r, {q}, {x}));
    CHECK(value == doctest::Approx(one_level_oracle(inst, r, q, x)).epsilon(1e-11));
  }
}

TEST_CASE("replica-symmetric value") {
  const CSInstance inst{single_atom(), 1.0, 0.5, 0.0, 1.0};
  const double r = 0.8;
  const double oracle = 0.5 * (std::log(r) + 0.25 * r) + 0.5 * single_atom().D_prime(2.0 * r);
  CHECK(eval_cs(inst, r, DiscreteOrderParameter::validate(r, {}, {})) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("zero temperature-free optimum is the full radius") {
  const CSInstance inst{single_atom(), 0.0, 0.0, 0.0, 1.3};
  OptimizerOptions opts;
  opts.seed = 1;
  const SaddleResult res = optimize_cs(inst, 1, opts);
  CHECK(std::abs(res.r_star - inst.d()) < 1e-6);
  CHECK(std::abs(res.value - 0.5 * std::log(inst.d())) < 1e-6);
}

TEST_CASE("instance validation") {
  CHECK(raises(ErrorCode::InvalidArgument, [] { validate_cs(CSInstance{single_atom(), -1.0, 0.0, 0.0, 1.0}); }));
  CHECK(raises(ErrorCode::InvalidArgument, [] { validate_cs(CSInstance{single_atom(), 1.0, 0.0, -0.1, 1.0}); }));
  CHECK(raises(ErrorCode::InvalidArgument, [] { validate_cs(CSInstance{single_atom(), 1.0, 0.0, 0.0, 0.0}); }));
}
