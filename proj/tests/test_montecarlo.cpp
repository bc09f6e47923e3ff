#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"
#include "isofree/montecarlo.hpp"
#include "test_support.hpp"

using namespace isofree;
using test_support::raises;

namespace {

Correlator single_atom() { return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, 0.0, 0.0, {{1.0, 1.0}}}); }

}  // namespace

TEST_CASE("covariance from the structure function") {
  const Correlator c = single_atom();
  const Point u{1.0, -1.0}, v{1.0, 1.0};
  CHECK(field_covariance(c, u, u) == doctest::Approx(c.D(1.0)));
  CHECK(field_covariance(c, u, v) == doctest::Approx(c.D(1.0) - 0.5 * c.D(2.0)));
}

TEST_CASE("configuration enumeration") {
  const auto points = enumerate_configurations(StateSpace::hypercube(), 3);
  REQUIRE(points.size() == 8);
  CHECK(points.front() == Point{-1.0, -1.0, -1.0});
  CHECK(points[1] == Point{1.0, -1.0, -1.0});
  CHECK(raises(ErrorCode::EnumerationTooLarge, [] { enumerate_configurations(StateSpace::hypercube(), 21); }));
  CHECK(raises(ErrorCode::EnumerationTooLarge,
               [] { enumerate_configurations(StateSpace::product({{-1, 1}, {0, 1}, {1, 1}}), 13); }));
}

TEST_CASE("exact sampler reproduces the covariance") {
  const Correlator c = single_atom();
  const std::vector<Point> pts{{1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}};
  const ExactSampler sampler(c, pts);
  const std::size_t draws = 20000;
  double s01 = 0.0, s00 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const ExactField f = sampler.draw(5, i);
    s00 += f.values[0] * f.values[0];
    s01 += f.values[0] * f.values[1];
  }
  CHECK(std::abs(s00 / draws - field_covariance(c, pts[0], pts[0])) < 0.03);
  CHECK(std::abs(s01 / draws - field_covariance(c, pts[0], pts[1])) < 0.03);
  CHECK(sampler.draw(5, 3).values == sampler.draw(5, 3).values);
  CHECK(raises(ErrorCode::TooManyPoints, [&] { ExactSampler(c, std::vector<Point>(kMaxExactPoints + 1, Point{1.0})); }));
}

TEST_CASE("log partition of a given field") {
  const StateSpace cube = StateSpace::hypercube();
  const std::size_t N = 2;
  ExactField f{enumerate_configurations(cube, N), {0.3, -0.2, 1.1, 0.0}, 0.0};
  const double beta = 0.7;
  double sum = 0.0;
  for (double x : f.values) sum += 0.25 * std::exp(beta * std::sqrt(2.0) * x);
  CHECK(log_partition(f, beta, cube, N) == doctest::Approx(std::log(sum) / 2.0).epsilon(1e-14));
  CHECK(log_partition(f, 0.0, cube, N) == doctest::Approx(0.0));
}

TEST_CASE("overlap series realization") {
  const Correlator c = single_atom();
  const SeriesField f = sample_field_series(c, 1.0, 8, 6, 3);
  CHECK(f.tail_bound <= 1e-2);
  const double q = 0.5;
  double series = 0.0;
  for (std::size_t p = 0; p < f.gamma.size(); ++p) series += f.gamma[p] * std::pow(q, static_cast<double>(p));
  CHECK(std::abs(series - c.G(1.0, q)) <= f.tail_bound + 1e-12);
  const StateSpace cube = StateSpace::hypercube();
  CHECK(log_partition(f, 1.0, cube, 8, true) == doctest::Approx(log_partition(f, 1.0, cube, 8, false)).epsilon(1e-12));
  CHECK(raises(ErrorCode::TailTooLarge, [&] { sample_field_series(c, 1.0, 8, 1, 3); }));
  CHECK(raises(ErrorCode::MemoryCap, [&] { sample_field_series(c, 1.0, 8, 6, 3, 1e-2, 1000); }));
}

TEST_CASE("simulation at beta = 0 is exactly the log mass") {
  const StateSpace s = StateSpace::product({{-1.0, 1.0}, {0.5, 2.0}});
  const ReplicaSet set = simulate_log_partition(single_atom(), 0.0, s, 5, 3, 1);
  for (double p : set.p_N) CHECK(p == std::log(3.0));
}

TEST_CASE("replicas are deterministic") {
  const StateSpace cube = StateSpace::hypercube();
  const ReplicaSet a = simulate_log_partition(single_atom(), 1.0, cube, 6, 8, 42);
  const ReplicaSet b = simulate_log_partition(single_atom(), 1.0, cube, 6, 8, 42);
  CHECK(a.p_N == b.p_N);
  CHECK(a.std_error > 0.0);
}

TEST_CASE("concentration bound and Guerra gap arithmetic") {
  const Correlator c = single_atom();
  const ReplicaSet set{{0.1, 0.2, 0.3, 0.4}, 0.25, 0.05, ""};
  const ConcentrationReport rep = concentration_check(c, set, 1.0, 10, {0.1, 0.5});
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].bound == doctest::Approx(2.0 * std::exp(-10.0 * 0.25 / (4.0 * c.D(1.0)))));
  CHECK(rep.rows[1].frequency == 0.0);
  const GuerraGap gap = guerra_gap(set, 0.2);
  CHECK(gap.gap == doctest::Approx(-0.05));
  CHECK(gap.holds);
  CHECK_FALSE(guerra_gap(set, 0.0).holds);
}
