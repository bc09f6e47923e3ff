#include "isofree/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "isofree/acceptance.hpp"
#include "isofree/cascades.hpp"
#include "isofree/crisanti_sommers.hpp"
#include "isofree/error.hpp"
#include "isofree/montecarlo.hpp"
#include "isofree/saddle.hpp"

namespace isofree {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json free_energy(double value, double beta) { return beta > 0.0 ? json(-value / beta) : json(nullptr); }

std::string csv_free_energy(double value, double beta) { return beta > 0.0 ? num(-value / beta) : ""; }

DiscreteOrderParameter order_parameter(const RunConfig& cfg) {
  if (!cfg.order_parameter) throw Error(ErrorCode::SchemaError, "command needs order_parameter", "order_parameter");
  return DiscreteOrderParameter::validate(cfg.order_parameter->r, cfg.order_parameter->q, cfg.order_parameter->x);
}

CSInstance cs_instance(const RunConfig& cfg, double beta) {
  const StateSpace space = cfg.state_space.build();
  const BallSpace& ball = space.as_ball();
  return CSInstance{Correlator(cfg.correlator), beta, ball.h1, ball.h2, ball.radius};
}

Report run_validate(const RunConfig& cfg) {
  const Correlator c(cfg.correlator);
  const StateSpace space = cfg.state_space.build();
  Report report;
  report.body = {{"valid", true},
                 {"config", serialize(cfg)},
                 {"d", space.effective_size()},
                 {"m_threshold", c.m_threshold()}};
  report.csv = "key,value\nvalid,true\nd," + num(space.effective_size()) + "\nm_threshold," + num(c.m_threshold()) +
               "\n";
  return report;
}

Report run_evaluate(const RunConfig& cfg) {
  const Correlator c(cfg.correlator);
  const DiscreteOrderParameter op = order_parameter(cfg);
  Report report;
  report.body["results"] = json::array();
  if (cfg.functional == "cs") {
    report.csv = "beta,value,free_energy,h1,h2,L\n";
    for (double beta : cfg.beta) {
      const CSInstance inst = cs_instance(cfg, beta);
      validate_cs(inst);
      const double value = eval_cs(inst, op.r(), op);
      report.body["results"].push_back({{"beta", beta},
                                        {"value", value},
                                        {"free_energy", free_energy(value, beta)},
                                        {"h1", inst.h1},
                                        {"h2", inst.h2},
                                        {"L", inst.L}});
      report.csv += num(beta) + "," + num(value) + "," + csv_free_energy(value, beta) + "," + num(inst.h1) + "," +
                    num(inst.h2) + "," + num(inst.L) + "\n";
    }
    return report;
  }
  const StateSpace space = cfg.state_space.build();
  space.as_product();
  report.csv = "beta,value,lambda_star,plateau_dev,free_energy\n";
  for (double beta : cfg.beta) {
    json per_M = json::array();
    double value = 0.0, lambda_star = 0.0, plateau = 0.0;
    if (cfg.order_parameter->lambda) {
      lambda_star = *cfg.order_parameter->lambda;
      std::vector<double> values;
      for (double M : cfg.eval.M_grid) {
        const double v = fixed_lambda_value(c, op, M, beta, lambda_star, space, cfg.eval) -
                         0.5 * beta * beta * theta_stieltjes_sum(op, c, M);
        values.push_back(v);
        per_M.push_back({{"M", M}, {"value", v}, {"lambda_star", lambda_star}});
      }
      value = values.back();
      for (std::size_t i = values.size() / 2; i < values.size(); ++i) {
        plateau = std::max(plateau, std::abs(values[i] - value));
      }
    } else {
      const LocalParisiResult res = local_parisi(c, op, beta, space, cfg.eval, false);
      value = res.value;
      lambda_star = res.lambda_star;
      plateau = res.plateau_dev;
      for (const auto& p : res.per_M) per_M.push_back({{"M", p.M}, {"value", p.value}, {"lambda_star", p.lambda_star}});
    }
    report.body["results"].push_back({{"beta", beta},
                                      {"value", value},
                                      {"lambda_star", lambda_star},
                                      {"plateau_dev", plateau},
                                      {"plateau_reached", plateau <= 10.0 * cfg.eval.tol_value},
                                      {"per_M", per_M},
                                      {"free_energy", free_energy(value, beta)}});
    report.csv += num(beta) + "," + num(value) + "," + num(lambda_star) + "," + num(plateau) + "," +
                  csv_free_energy(value, beta) + "\n";
  }
  return report;
}

Report run_optimize(const RunConfig& cfg) {
  const Correlator c(cfg.correlator);
  const bool cs = cfg.functional == "cs";
  std::vector<SaddleResult> results;
  for (double beta : cfg.beta) {
    if (cs) {
      results.push_back(optimize_cs(cs_instance(cfg, beta), cfg.rsb_levels, cfg.optimizer));
    } else {
      results.push_back(optimize_saddle(c, beta, cfg.state_space.build(), cfg.rsb_levels, cfg.eval, cfg.optimizer));
    }
  }
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.n);
  Report report;
  report.csv = "beta,r_star,value,free_energy,n";
  for (std::size_t k = 1; k <= width; ++k) report.csv += ",q_" + std::to_string(k);
  for (std::size_t k = 1; k <= width; ++k) report.csv += ",x_" + std::to_string(k);
  if (cs) report.csv += ",h1,h2,L";
  report.csv += "\n";
  report.body["results"] = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const SaddleResult& r = results[i];
    const double beta = cfg.beta[i];
    json row = {{"beta", beta},
                {"r_star", r.r_star},
                {"value", r.value},
                {"q", r.op_star.q()},
                {"x", r.op_star.x()},
                {"n", r.n},
                {"free_energy", free_energy(r.value, beta)},
                {"no_descent", r.no_descent},
                {"multistart_spread", r.spread},
                {"plateau_dev", finite_or_null(r.plateau_dev)},
                {"level_values", r.level_values}};
    report.csv += num(beta) + "," + num(r.r_star) + "," + num(r.value) + "," + csv_free_energy(r.value, beta) + "," +
                  std::to_string(r.n);
    for (std::size_t k = 0; k < width; ++k) report.csv += "," + (k < r.n ? num(r.op_star.q()[k]) : "");
    for (std::size_t k = 0; k < width; ++k) report.csv += "," + (k < r.n ? num(r.op_star.x()[k]) : "");
    if (cs) {
      const CSInstance inst = cs_instance(cfg, beta);
      row["h1"] = inst.h1;
      row["h2"] = inst.h2;
      row["L"] = inst.L;
      report.csv += "," + num(inst.h1) + "," + num(inst.h2) + "," + num(inst.L);
    }
    report.csv += "\n";
    report.body["results"].push_back(row);
  }
  return report;
}

Report run_simulate(const RunConfig& cfg) {
  const Correlator c(cfg.correlator);
  const StateSpace space = cfg.state_space.build();
  space.as_product();
  Report report;
  report.body["results"] = json::array();
  report.csv = "beta,replica,p_N\n";
  for (std::size_t b = 0; b < cfg.beta.size(); ++b) {
    const double beta = cfg.beta[b];
    const ReplicaSet reps = simulate_log_partition(c, beta, space, cfg.simulate.N, cfg.simulate.reps, *cfg.seed + b);
    const ConcentrationReport conc =
        concentration_check(c, reps, space.effective_size(), cfg.simulate.N, cfg.simulate.t_grid);
    json records = json::array();
    for (std::size_t i = 0; i < reps.p_N.size(); ++i) {
      records.push_back({{"replica", i}, {"p_N", reps.p_N[i]}});
      report.csv += num(beta) + "," + std::to_string(i) + "," + num(reps.p_N[i]) + "\n";
    }
    json tails = json::array();
    for (const auto& row : conc.rows) {
      tails.push_back({{"t", row.t},
                       {"frequency", row.frequency},
                       {"bound", row.bound},
                       {"slack", row.slack},
                       {"violated", row.violated}});
    }
    json entry = {{"beta", beta},
                  {"N", cfg.simulate.N},
                  {"replicas", records},
                  {"summary", {{"mean", reps.mean}, {"stderr", reps.std_error}, {"bound_violations", conc.violations}}},
                  {"tails", tails},
                  {"free_energy", free_energy(reps.mean, beta)}};
    if (!reps.warning.empty()) entry["warning"] = reps.warning;
    report.body["results"].push_back(entry);
  }
  return report;
}

Report run_cascade(const RunConfig& cfg) {
  const CascadeConfig& cc = cfg.cascade;
  const std::uint64_t seed = *cfg.seed;
  Report report;
  json body = {{"check", cc.check}};
  std::string csv = "key,value\n";
  auto add = [&](const std::string& key, double v) {
    body[key] = v;
    csv += key + "," + num(v) + "\n";
  };
  auto sigma_at = [&](std::size_t i) { return i < cc.sigma.size() ? cc.sigma[i] : 1.0; };
  if (cc.check == "identity") {
    const IdentityCheck id = check_averaging_identity(cc.x[0], sigma_at(0), cc.K, cc.reps, seed);
    add("estimate", id.lhs);
    add("target", id.rhs);
    add("stderr", id.std_error);
    add("truncation", id.truncation);
  } else if (cc.check == "nested") {
    if (cc.x.size() < 2) throw Error(ErrorCode::SchemaError, "nested check needs two exponents", "cascade.x");
    const IdentityCheck id = check_nested_identity(cc.x[0], cc.x[1], sigma_at(0), sigma_at(1), cc.K, cc.reps, seed);
    add("estimate", id.lhs);
    add("target", id.rhs);
    add("stderr", id.std_error);
    add("truncation", id.truncation);
  } else if (cc.check == "covariance") {
    const Correlator c(cfg.correlator);
    const DiscreteOrderParameter op = order_parameter(cfg);
    const CascadeTree tree{op.x(), cc.K, seed};
    const CavitySample sample = sample_cavity(op, c, cc.M, cc.N, tree, cc.samples);
    json levels = json::array();
    for (const auto& l : sample.report.levels) {
      levels.push_back({{"level", l.level}, {"target", l.target}, {"estimate", l.estimate}, {"stderr", l.std_error}});
      csv += "level_" + std::to_string(l.level) + "," + num(l.estimate) + "\n";
    }
    body["levels"] = levels;
    add("var_A", sample.report.var_A);
    add("var_A_stderr", sample.report.var_A_stderr);
    add("var_a_target", sample.report.var_a_target);
  } else {
    const PPPSample atoms = sample_ppp_atoms(cc.x[0], cc.K, seed);
    add("x", cc.x[0]);
    add("tail_mass", atoms.tail_mass);
    add("smallest_atom", atoms.atoms.back());
    add("largest_atom", atoms.atoms.front());
    add("count_exponent", ppp_tail_exponent(atoms.atoms));
  }
  report.body = body;
  report.csv = csv;
  return report;
}

Report run_verify(const RunConfig& cfg) {
  const auto results = run_acceptance(*cfg.seed, [](const CriterionResult& r) {
    std::cerr << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << "  (" << r.seconds << " s)\n";
  });
  Report report;
  report.body = acceptance_report(results);
  report.csv = "id,name,pass\n";
  for (const auto& r : results) report.csv += std::to_string(r.id) + "," + r.name + "," + (r.pass ? "true" : "false") + "\n";
  report.exit_code = report.body["all_pass"].get<bool>() ? 0 : 1;
  return report;
}

}  // namespace

Report run(Command command, const RunConfig& cfg) {
  require_seed(cfg, command);
  switch (command) {
    case Command::Validate: return run_validate(cfg);
    case Command::Evaluate: return run_evaluate(cfg);
    case Command::Optimize: return run_optimize(cfg);
    case Command::Simulate: return run_simulate(cfg);
    case Command::Cascade: return run_cascade(cfg);
    case Command::Verify: return run_verify(cfg);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown command");
}

json error_json(const std::exception& e) {
  json err = {{"message", e.what()}};
  if (const auto* ie = dynamic_cast<const Error*>(&e)) {
    err["code"] = std::string(to_string(ie->code()));
    err["path"] = ie->path();
  } else {
    err["code"] = "InternalError";
    err["path"] = "";
  }
  return {{"error", err}};
}

std::string render(const Report& report, const std::string& format) {
  if (format == "csv") return report.csv;
  return report.body.dump(2) + "\n";
}

}  // namespace isofree
