#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "isofree/correlator.hpp"
#include "test_support.hpp"

using namespace isofree;
using test_support::error_path;
using test_support::raises;

namespace {

Correlator make(double A, std::vector<MixtureAtom> atoms) {
  return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, A, 0.0, std::move(atoms)});
}

double factorial(int p) { return std::tgamma(p + 1.0); }

}  // namespace

TEST_CASE("closed forms of D and its derivatives") {
  const Correlator c = make(0.5, {{1.0, 1.0}, {2.0, 0.5}});
  for (double r : {0.0, 0.1, 1.0, 3.0}) {
    const double expected = 0.5 * r + (1.0 - std::exp(-r)) + 2.0 * (1.0 - std::exp(-0.25 * r));
    CHECK(c.D(r) == doctest::Approx(expected).epsilon(1e-14));
    const double fd = (c.D(r + 1e-6) - c.D(std::max(0.0, r - 1e-6))) / (r > 0 ? 2e-6 : 1e-6);
    CHECK(c.D_prime(r) == doctest::Approx(fd).epsilon(1e-5));
    CHECK(c.D_second(r) < 0.0);
    CHECK(c.derivative(3, r) > 0.0);
    CHECK(c.derivative(4, r) < 0.0);
  }
}

TEST_CASE("linear correlator") {
  const Correlator c = make(1.0, {});
  CHECK(c.D(2.5) == 2.5);
  CHECK(c.D_prime(7.0) == 1.0);
  CHECK(c.G(1.0, 0.4) == doctest::Approx(1.0 - 0.6));
  CHECK(c.G_prime(1.0, 0.4) == doctest::Approx(1.0));
}

TEST_CASE("isotropic correlator folds into D = 2(B(0) - B(r))") {
  const Correlator c(CorrelatorSpec{CorrelatorKind::Isotropic, 0.0, 0.3, {{1.0, 1.0}, {0.5, 2.0}}});
  for (double r : {0.0, 0.2, 1.5}) CHECK(c.D(r) == doctest::Approx(2.0 * (c.B(0.0) - c.B(r))).epsilon(1e-13));
  CHECK(c.B(0.0) == doctest::Approx(1.8));
}

TEST_CASE("validation errors carry codes and paths") {
  CHECK(raises(ErrorCode::NonpositiveWeight, [] { make(0.0, {{-1.0, 1.0}}); }));
  CHECK(error_path([] { make(0.0, {{-1.0, 1.0}}); }) == "atoms[0].w");
  CHECK(raises(ErrorCode::NonpositiveRate, [] { make(0.0, {{1.0, 0.0}}); }));
  CHECK(raises(ErrorCode::NegativeSlope, [] { make(-1.0, {}); }));
  CHECK(raises(ErrorCode::DuplicateRate, [] { make(0.0, {{1.0, 1.0}, {2.0, 1.0}}); }));
  const Correlator c = make(0.0, {{1.0, 1.0}});
  CHECK(raises(ErrorCode::NegativeArgument, [&] { c.D(-0.1); }));
  CHECK(raises(ErrorCode::OverlapOutOfRange, [&] { c.G(1.0, 1.5); }));
}

TEST_CASE("regularized derivative and its threshold") {
  const Correlator c = make(0.0, {{1.0, 1.0}});
  const double M0 = c.m_threshold();
  CHECK(c.D_prime(1.0 / M0) <= M0 * (1.0 + 1e-9));
  CHECK(raises(ErrorCode::MTooSmall, [&] { c.D_prime_M(0.5, 0.5 * M0); }));
  CHECK(c.D_prime_M(0.5, 100.0) == doctest::Approx(c.D_prime(0.5)));
  CHECK(c.D_prime_M(0.001, 100.0) == 100.0);
  CHECK(c.theta(1.0, 100.0, 0.25) == doctest::Approx(0.25 * c.D_prime(1.5) + 0.5 * c.D(1.5)));
}

TEST_CASE("overlap series matches the Taylor expansion of -D(2(r-q))/2") {
  const double r = 0.8;
  const Correlator c = make(0.0, {{1.0, 1.0}});
  const OverlapSeries s = c.overlap_series(r, 8);
  CHECK(s.coefficients[0] == doctest::Approx(c.D(r) - 0.5 * c.D(2.0 * r)));
  for (int p = 1; p <= 8; ++p) {
    const double oracle = 0.5 * std::exp(-2.0 * r) * std::pow(2.0, p) / factorial(p);
    CHECK(s.coefficients[p] == doctest::Approx(oracle).epsilon(1e-12));
  }
  double tail = 0.0;
  for (int p = 9; p < 60; ++p) tail += 0.5 * std::exp(-2.0 * r) * std::pow(2.0 * r, p) / factorial(p);
  CHECK(s.tail_bound == doctest::Approx(tail).epsilon(1e-6));
}

TEST_CASE("G_r is convex in the overlap") {
  const Correlator c = make(0.3, {{1.0, 1.0}, {0.7, 2.0}});
  for (double q : {0.0, 0.3, 0.9}) {
    for (double s : {0.1, 0.5, 1.0}) CHECK(c.convexity_gap(1.0, q, s) >= -1e-15);
  }
}
