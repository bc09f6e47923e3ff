#include "isofree/acceptance.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isofree/cascades.hpp"
#include "isofree/commands.hpp"
#include "isofree/crisanti_sommers.hpp"
#include "isofree/error.hpp"
#include "isofree/montecarlo.hpp"
#include "isofree/numerics.hpp"
#include "isofree/parisi.hpp"
#include "isofree/rng.hpp"
#include "isofree/saddle.hpp"

namespace isofree {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

Correlator linear_correlator() { return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, 1.0, 0.0, {}}); }

Correlator single_atom_correlator() {
  return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, 0.0, 0.0, {{1.0, 1.0}}});
}

Correlator mixture_correlator() {
  return Correlator(CorrelatorSpec{CorrelatorKind::LongRange, 0.5, 0.0, {{1.0, 1.0}, {0.5, 3.0}}});
}

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// E log cosh(beta Z) by Gauss-Hermite quadrature.
double log_cosh_oracle(double beta) {
  const auto& rule = numerics::gauss_hermite(160);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * log_cosh(beta * rule.nodes[i]);
  return sum;
}

double elapsed(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

// Crisanti-Sommers functional by adaptive quadrature of its defining integrals.
double cs_by_quadrature(const CSInstance& inst, double r, const DiscreteOrderParameter& op) {
  using boost::math::quadrature::gauss_kronrod;
  const std::size_t n = op.levels();
  const double q_max = n == 0 ? 0.0 : op.q().back();
  std::vector<double> breaks{0.0};
  for (double q : op.q()) breaks.push_back(q);
  breaks.push_back(r);
  auto x_of = [&](double q) {
    for (std::size_t k = 0; k < n; ++k) {
      if (q < op.q()[k]) return op.x()[k];
    }
    return 1.0;
  };
  auto integrate = [&](const std::function<double(double)>& f, double a, double b) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
      if (hi > lo) total += gauss_kronrod<double, 61>::integrate(f, lo, hi, 8, 1e-13);
    }
    return total;
  };
  auto L = [&](double q) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double lo = std::max(q, breaks[i]), hi = breaks[i + 1];
      if (hi > lo) total += x_of(0.5 * (breaks[i] + hi)) * (hi - lo);
    }
    return total;
  };
  const double inverse = integrate([&](double q) { return 1.0 / L(q); }, 0.0, q_max);
  const double x_int = integrate(x_of, 0.0, r);
  const Correlator& c = inst.correlator;
  const double field = integrate([&](double q) { return c.D_prime(2.0 * (r - q)) * x_of(q); }, 0.0, q_max);
  return 0.5 * (std::log(r - q_max) + inverse + inst.h1 * inst.h1 * x_int - inst.h2 * r) +
         0.5 * inst.beta * inst.beta * (c.D_prime(2.0 * (r - q_max)) + field);
}

// Random strict chain of n points in (0, total) with gaps at least 5% of total.
std::vector<double> random_chain(RandomStream& rng, std::size_t n, double total) {
  std::vector<double> gaps(n + 1);
  double sum = 0.0;
  for (double& g : gaps) {
    g = 0.05 + rng.uniform();
    sum += g;
  }
  std::vector<double> out(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += gaps[k];
    out[k] = total * acc / sum;
  }
  return out;
}

EvalConfig default_eval() { return EvalConfig{}; }

OptimizerOptions default_optimizer(std::uint64_t seed) {
  OptimizerOptions opts;
  opts.seed = seed;
  return opts;
}

struct Suite {
  std::uint64_t seed;
  std::vector<CriterionResult> results;
  const std::function<void(const CriterionResult&)>& on_result;

  // Shared between criteria.
  SaddleResult single_atom_n2{0.0, DiscreteOrderParameter::validate(1.0, {}, {}), 0.0, 0, false, 0.0, 0.0, {}, {}};
  SaddleResult linear_beta1{0.0, DiscreteOrderParameter::validate(1.0, {}, {}), 0.0, 0, false, 0.0, 0.0, {}, {}};
  ReplicaSet ensemble{{}, 0.0, 0.0, {}};

  void record(int id, const std::string& name, const std::function<std::pair<bool, json>()>& body) {
    const auto start = Clock::now();
    CriterionResult res{id, name, false, json::object(), 0.0};
    try {
      auto [pass, detail] = body();
      res.pass = pass;
      res.detail = detail;
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = error_json(e);
    }
    res.seconds = elapsed(start);
    results.push_back(res);
    if (on_result) on_result(results.back());
  }
};

}  // namespace

std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  Suite suite{seed, {}, on_result};
  const StateSpace cube = StateSpace::hypercube();

  suite.record(1, "linear field matches E log cosh oracle", [&] {
    const Correlator lin = linear_correlator();
    json rows = json::array();
    bool pass = true;
    for (double beta : {0.5, 1.0}) {
      const auto start = Clock::now();
      const SaddleResult res = optimize_saddle(lin, beta, cube, 1, default_eval(), default_optimizer(seed));
      const double seconds = elapsed(start);
      const double oracle = log_cosh_oracle(beta);
      const bool ok = std::abs(res.value - oracle) <= 1e-2 && seconds < 60.0;
      pass = pass && ok;
      if (beta == 1.0) suite.linear_beta1 = res;
      rows.push_back({{"beta", beta}, {"value", res.value}, {"oracle", oracle}, {"tolerance", 1e-2},
                      {"within_time_limit", seconds < 60.0}, {"pass", ok}});
    }
    return std::pair{pass, json{{"rows", rows}}};
  });

  suite.record(2, "beta = 0 identities", [&] {
    const Correlator lin = linear_correlator();
    const SaddleResult opt = optimize_saddle(lin, 0.0, cube, 1, default_eval(), default_optimizer(seed));
    const auto op = DiscreteOrderParameter::validate(1.0, {0.5}, {0.5});
    const double eval = local_parisi(lin, op, 0.0, cube, default_eval()).value;
    const ReplicaSet sim = simulate_log_partition(lin, 0.0, cube, 8, 4, seed);
    const StateSpace weighted = StateSpace::product({{-1.0, 1.0}, {0.5, 2.0}});
    const ReplicaSet sim_w = simulate_log_partition(lin, 0.0, weighted, 6, 4, seed);
    bool exact = true;
    for (double v : sim.p_N) exact = exact && v == 0.0;
    for (double v : sim_w.p_N) exact = exact && v == std::log(3.0);
    const bool pass = std::abs(opt.value) <= 1e-10 && std::abs(eval) <= 1e-10 && exact;
    return std::pair{pass, json{{"optimize", opt.value}, {"evaluate", eval}, {"simulate_probability", sim.mean},
                                {"simulate_mass3", sim_w.mean}, {"simulate_exact", exact}}};
  });

  suite.record(3, "Guerra upper bound against exact small-N simulation", [&] {
    const Correlator one = single_atom_correlator();
    suite.single_atom_n2 = optimize_saddle(one, 1.0, cube, 2, default_eval(), default_optimizer(seed));
    suite.ensemble = simulate_log_partition(one, 1.0, cube, 12, 200, seed + 3);
    const GuerraGap gap = guerra_gap(suite.ensemble, suite.single_atom_n2.value);
    return std::pair{gap.holds, json{{"parisi_value", suite.single_atom_n2.value}, {"mc_mean", gap.mc_mean},
                                     {"stderr", gap.std_error}, {"gap", gap.gap}, {"slack", gap.slack},
                                     {"n_used", suite.single_atom_n2.n}}};
  });

  suite.record(4, "concentration tails below the bound", [&] {
    if (suite.ensemble.p_N.empty()) throw Error(ErrorCode::InvalidArgument, "ensemble unavailable");
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
    const ConcentrationReport rep = concentration_check(single_atom_correlator(), suite.ensemble, 1.0, 12, grid);
    json rows = json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"t", r.t}, {"frequency", r.frequency}, {"bound", r.bound}, {"violated", r.violated}});
    }
    return std::pair{rep.violations == 0, json{{"rows", rows}, {"violations", rep.violations}}};
  });

  suite.record(5, "cascade averaging identity", [&] {
    const auto start = Clock::now();
    const IdentityCheck id = check_averaging_identity(0.5, 1.0, 10000, 10000, seed + 5);
    const double seconds = elapsed(start);
    const bool pass = std::abs(id.lhs - 0.25) <= 3.0 * id.std_error && id.truncation <= id.std_error && seconds < 120.0;
    return std::pair{pass, json{{"lhs", id.lhs}, {"rhs", id.rhs}, {"stderr", id.std_error},
                                {"truncation", id.truncation}, {"within_time_limit", seconds < 120.0}}};
  });

  suite.record(6, "cavity field covariance per lexicographic level", [&] {
    const auto op = DiscreteOrderParameter::validate(1.0, {0.3, 0.7}, {0.4, 0.8});
    const CascadeTree tree{op.x(), 100, seed + 6};
    const CavitySample sample = sample_cavity(op, single_atom_correlator(), 2.0, 4, tree, 200000);
    bool pass = true;
    json rows = json::array();
    for (const auto& l : sample.report.levels) {
      const bool ok = std::abs(l.estimate - l.target) <= 5e-2;
      pass = pass && ok;
      rows.push_back({{"level", l.level}, {"target", l.target}, {"estimate", l.estimate}, {"pass", ok}});
    }
    const bool var_ok = std::abs(sample.report.var_A - sample.report.var_a_target) <= 5e-2;
    return std::pair{pass && var_ok, json{{"levels", rows}, {"var_A", sample.report.var_A},
                                          {"var_a_target", sample.report.var_a_target}}};
  });

  suite.record(7, "recursion and finite-difference solvers agree", [&] {
    const Correlator one = single_atom_correlator();
    bool pass = true;
    json rows = json::array();
    for (auto [q, x] : {std::pair{0.5, 0.5}, std::pair{0.2, 0.8}}) {
      const auto op = DiscreteOrderParameter::validate(1.0, {q}, {x});
      const double a = solve_recursion(one, op, 100.0, 1.0, 0.0, cube, default_eval()).f00;
      const double b = solve_pde_fd(one, op, 100.0, 1.0, 0.0, cube, default_eval());
      const bool ok = std::abs(a - b) <= 5e-3;
      pass = pass && ok;
      rows.push_back({{"q", q}, {"x", x}, {"recursion", a}, {"finite_difference", b}, {"pass", ok}});
    }
    return std::pair{pass, json{{"rows", rows}}};
  });

  suite.record(8, "M-plateau of the regularized functional", [&] {
    const Correlator lin = linear_correlator();
    const DiscreteOrderParameter op = suite.linear_beta1.op_star.levels() > 0
                                          ? suite.linear_beta1.op_star
                                          : DiscreteOrderParameter::validate(1.0, {0.5}, {0.9});
    const double a = parisi_at_M(lin, op, 1e3, 1.0, cube, default_eval()).value;
    const double b = parisi_at_M(lin, op, 1e4, 1.0, cube, default_eval()).value;
    return std::pair{std::abs(a - b) <= 5e-3, json{{"value_M1e3", a}, {"value_M1e4", b}, {"q", op.q()}, {"x", op.x()}}};
  });

  suite.record(9, "values non-increasing in the number of levels", [&] {
    const SaddleResult lin = optimize_saddle(linear_correlator(), 1.0, cube, 3, default_eval(), default_optimizer(seed));
    const SaddleResult one = optimize_saddle(single_atom_correlator(), 1.0, cube, 3, default_eval(), default_optimizer(seed));
    bool pass = true;
    json rows = json::array();
    for (const SaddleResult* res : std::array<const SaddleResult*, 2>{&lin, &one}) {
      const auto& v = res->level_values;
      if (v.size() != 4) pass = false;
      for (std::size_t k = 0; k + 1 < v.size(); ++k) pass = pass && v[k + 1] <= v[k] + 1e-8;
      rows.push_back(v);
    }
    return std::pair{pass, json{{"linear", rows[0]}, {"single_atom", rows[1]}}};
  });

  suite.record(10, "lambda degeneracy on the hypercube", [&] {
    const Correlator one = single_atom_correlator();
    const auto op = DiscreteOrderParameter::validate(1.0, {0.5}, {0.5});
    const double theta = theta_stieltjes_sum(op, one, 1e3);
    std::vector<double> values;
    for (double lambda : {-1.0, 0.0, 1.0}) {
      values.push_back(fixed_lambda_value(one, op, 1e3, 1.0, lambda, cube, default_eval()) - 0.5 * theta);
    }
    const double spread = std::max({values[0], values[1], values[2]}) - std::min({values[0], values[1], values[2]});
    bool diverges = false;
    try {
      lambda_infimum(one, DiscreteOrderParameter::validate(0.5, {0.25}, {0.5}), 1e3, 1.0, cube, default_eval());
    } catch (const Error& e) {
      diverges = e.code() == ErrorCode::InfimumDiverges;
    }
    return std::pair{spread <= 1e-10 && diverges,
                     json{{"values", values}, {"spread", spread}, {"r_half_raises_InfimumDiverges", diverges}}};
  });

  suite.record(11, "Crisanti-Sommers closed form, optimum, convexity, uniqueness", [&] {
    RandomStream rng(seed, 11);
    const Correlator lin = linear_correlator(), one = single_atom_correlator(), mix = mixture_correlator();
    const Correlator* pool[] = {&lin, &one, &mix};
    double worst_quad = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Correlator& c = *pool[i % 3];
      const CSInstance inst{c, 2.0 * rng.uniform(), 2.0 * rng.uniform() - 1.0, rng.uniform(), 0.5 + 1.5 * rng.uniform()};
      const double r = inst.d() * (0.2 + 0.8 * rng.uniform());
      const std::size_t n = static_cast<std::size_t>(i % 4);
      const auto op = DiscreteOrderParameter::validate(r, random_chain(rng, n, r), random_chain(rng, n, 1.0));
      worst_quad = std::max(worst_quad, std::abs(eval_cs(inst, r, op) - cs_by_quadrature(inst, r, op)));
    }
    const bool quad_ok = worst_quad <= 1e-8;

    const CSInstance free_inst{one, 0.0, 0.0, 0.0, 1.5};
    const SaddleResult free_opt = optimize_cs(free_inst, 1, default_optimizer(seed));
    const bool free_ok = std::abs(free_opt.r_star - free_inst.d()) <= 1e-6 &&
                         std::abs(free_opt.value - 0.5 * std::log(free_inst.d())) <= 1e-6;

    double min_eigen = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
      const Correlator& c = *pool[i % 3];
      const CSInstance inst{c, 2.0 * rng.uniform(), 2.0 * rng.uniform() - 1.0, rng.uniform(), 0.5 + 1.5 * rng.uniform()};
      const double r = inst.d() * (0.2 + 0.8 * rng.uniform());
      const std::size_t n = 2 + static_cast<std::size_t>(i % 2);
      const std::vector<double> q = random_chain(rng, n, r);
      const std::vector<double> x0 = random_chain(rng, n, 1.0);
      auto f = [&](std::vector<double> x) { return eval_cs(inst, r, DiscreteOrderParameter::weak(r, q, x)); };
      const double h = 1e-4;
      Eigen::MatrixXd H(n, n);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          auto shifted = [&](double da, double db) {
            std::vector<double> x = x0;
            x[a] += da;
            x[b] += db;
            return f(x);
          };
          H(a, b) = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h);
        }
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H + H.transpose()));
      min_eigen = std::min(min_eigen, eig.eigenvalues().minCoeff());
    }
    const bool convex_ok = min_eigen > 0.0;

    const CSInstance field_inst{mix, 1.5, 1.0, 0.0, 1.2};
    const SaddleResult field_opt = optimize_cs(field_inst, 1, default_optimizer(seed));
    const bool spread_ok = field_opt.spread <= 1e-6;

    return std::pair{quad_ok && free_ok && convex_ok && spread_ok,
                     json{{"closed_form_vs_quadrature_max", worst_quad},
                          {"free_r_star", free_opt.r_star},
                          {"free_value", free_opt.value},
                          {"half_log_d", 0.5 * std::log(free_inst.d())},
                          {"min_hessian_eigenvalue", min_eigen},
                          {"multistart_spread", field_opt.spread},
                          {"field_value", field_opt.value},
                          {"field_r_star", field_opt.r_star}}};
  });

  suite.record(12, "identical seeds give byte-identical reports", [&] {
    RunConfig cfg;
    cfg.correlator = CorrelatorSpec{CorrelatorKind::LongRange, 0.0, 0.0, {{1.0, 1.0}}};
    cfg.seed = seed + 12;
    cfg.optimizer.seed = seed + 12;
    cfg.beta = {0.7};
    cfg.simulate.N = 8;
    cfg.simulate.reps = 20;
    cfg.cascade.K = 200;
    cfg.cascade.reps = 200;
    cfg.eval.M_grid = {1e3};
    std::string first, second;
    for (std::string* out : {&first, &second}) {
      for (Command cmd : {Command::Simulate, Command::Cascade, Command::Optimize}) {
        *out += render(run(cmd, cfg), "json");
      }
    }
    return std::pair{first == second, json{{"bytes", first.size()}}};
  });

  return suite.results;
}

json acceptance_report(const std::vector<CriterionResult>& results) {
  json criteria = json::array();
  bool all = !results.empty();
  for (const auto& r : results) {
    criteria.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all = all && r.pass;
  }
  return {{"criteria", criteria}, {"all_pass", all}};
}

}  // namespace isofree
