#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "isofree/cascades.hpp"
#include "isofree/correlator.hpp"
#include "test_support.hpp"

using namespace isofree;
using test_support::raises;

TEST_CASE("PPP atoms are ranked and follow the power law") {
  const PPPSample s = sample_ppp_atoms(0.5, 5000, 9);
  REQUIRE(s.atoms.size() == 5000);
  for (std::size_t i = 1; i < s.atoms.size(); ++i) CHECK_FALSE(s.atoms[i] >= s.atoms[i - 1]);
  CHECK(ppp_tail_exponent(s.atoms) == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(s.tail_mass == doctest::Approx(ppp_tail_mass(0.5, s.atoms.back())));
}

TEST_CASE("PPP tail mass closed form") {
  CHECK(ppp_tail_mass(0.5, 0.04) == doctest::Approx(0.2));
  CHECK(ppp_tail_mass(0.25, 1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("sampling is deterministic per seed and stream") {
  CHECK(sample_ppp_atoms(0.3, 50, 4).atoms == sample_ppp_atoms(0.3, 50, 4).atoms);
  CHECK(sample_ppp_atoms(0.3, 50, 4, 1).atoms != sample_ppp_atoms(0.3, 50, 4, 0).atoms);
}

TEST_CASE("RPC weights multiply the level atoms") {
  const RPCSample s = sample_rpc(CascadeTree{{0.3, 0.7}, 100, 5});
  REQUIRE(s.weights.size() == 10000);
  for (double w : s.weights) CHECK(w > 0.0);
  CHECK(std::isfinite(std::accumulate(s.weights.begin(), s.weights.end(), 0.0)));
  CHECK(s.path(101) == std::vector<std::size_t>{1, 1});
  CHECK(s.relative_tail > 0.0);
  const RPCSample one = sample_rpc(CascadeTree{{0.4}, 100, 8});
  const PPPSample atoms = sample_ppp_atoms(0.4, 100, 8);
  for (std::size_t i = 0; i < 100; ++i) CHECK(one.weights[i] == doctest::Approx(atoms.atoms[i]).epsilon(1e-12));
}

TEST_CASE("normalized top weight matches Poisson-Dirichlet stick breaking") {
  const double x = 0.5;
  const std::size_t reps = 3000;
  std::vector<double> rpc_top(reps), pd_top(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const RPCSample s = sample_rpc(CascadeTree{{x}, 1000, 100 + r});
    rpc_top[r] = s.weights[0] / std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  }
  std::mt19937_64 gen(2024);
  for (std::size_t r = 0; r < reps; ++r) {
    double remaining = 1.0, best = 0.0;
    for (int i = 1; i <= 5000 && remaining > best; ++i) {
      std::gamma_distribution<double> a(1.0 - x), b(i * x);
      const double ga = a(gen), gb = b(gen);
      const double w = remaining * ga / (ga + gb);
      best = std::max(best, w);
      remaining -= w;
    }
    pd_top[r] = best;
  }
  auto mean_var = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double e : v) ss += (e - m) * (e - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [m1, v1] = mean_var(rpc_top);
  const auto [m2, v2] = mean_var(pd_top);
  CHECK(v1 > 1e-3);
  CHECK(std::abs(m1 - m2) <= 3.0 * std::sqrt((v1 + v2) / static_cast<double>(reps)));
}

TEST_CASE("tree validation") {
  CHECK(raises(ErrorCode::TreeTooLarge, [] { sample_rpc(CascadeTree{{0.3, 0.7}, 2000, 1}); }));
  CHECK(raises(ErrorCode::InvalidArgument, [] { validate_tree(CascadeTree{{0.7, 0.3}, 100, 1}); }));
  CHECK(raises(ErrorCode::InvalidArgument, [] { validate_tree(CascadeTree{{0.5}, 10, 1}); }));
  CHECK(raises(ErrorCode::DepthMismatch, [] { lex_overlap({1, 2}, {1}); }));
  CHECK(lex_overlap({1, 2, 3}, {1, 2, 4}) == 2);
  CHECK(lex_overlap({0, 2}, {1, 2}) == 0);
}

TEST_CASE("averaging identity") {
  const IdentityCheck id = check_averaging_identity(0.5, 1.0, 2000, 2000, 17);
  CHECK(id.rhs == doctest::Approx(0.25));
  CHECK(std::abs(id.lhs - id.rhs) <= 4.0 * id.std_error + id.truncation);
}

TEST_CASE("nested identity") {
  const IdentityCheck id = check_nested_identity(0.2, 0.4, 1.0, 0.8, 100, 4000, 23);
  CHECK(id.rhs == doctest::Approx(0.5 * 0.2 + 0.5 * 0.4 * 0.64));
  CHECK(std::abs(id.lhs - id.rhs) <= 4.0 * id.std_error + id.truncation);
}

TEST_CASE("cavity covariance targets") {
  const Correlator c(CorrelatorSpec{CorrelatorKind::LongRange, 0.0, 0.0, {{1.0, 1.0}}});
  const auto op = DiscreteOrderParameter::validate(1.0, {0.3, 0.7}, {0.4, 0.8});
  const CavitySample s = sample_cavity(op, c, 2.0, 3, CascadeTree{op.x(), 100, 2}, 20000);
  REQUIRE(s.report.levels.size() == 4);
  CHECK(s.report.levels[0].target == 0.0);
  CHECK(s.report.levels[1].target == doctest::Approx(std::exp(-1.4)));
  CHECK(s.report.levels[2].target == doctest::Approx(std::exp(-0.6)));
  CHECK(s.report.levels[3].target == doctest::Approx(2.0));
  for (const auto& l : s.report.levels) CHECK(std::abs(l.estimate - l.target) < 0.1);
}
