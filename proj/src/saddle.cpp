#include "isofree/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>

#include "isofree/error.hpp"
#include "isofree/numerics.hpp"
#include "isofree/parallel.hpp"
#include "isofree/rng.hpp"

namespace isofree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParamClamp = 30.0;
constexpr double kPolishClamp = 4.0;

// Cumulative softmax sticks: n increasing points strictly inside (0, total).
std::vector<double> sticks(std::span<const double> p, double total) {
  double sum = 1.0;
  std::vector<double> e(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    e[i] = std::exp(std::clamp(p[i], -kParamClamp, kParamClamp));
    sum += e[i];
  }
  std::vector<double> out(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += e[i];
    out[i] = total * acc / sum;
  }
  return out;
}

std::vector<double> inverse_sticks(const std::vector<double>& points, double total) {
  std::vector<double> p(points.size());
  const double last = total - (points.empty() ? 0.0 : points.back());
  double prev = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    p[i] = std::log((points[i] - prev) / last);
    prev = points[i];
  }
  return p;
}

DiscreteOrderParameter decode(std::span<const double> p, double r, std::size_t n) {
  return DiscreteOrderParameter::validate(r, sticks(p.subspan(0, n), r), sticks(p.subspan(n, n), 1.0));
}

std::vector<double> encode(const DiscreteOrderParameter& op) {
  std::vector<double> p = inverse_sticks(op.q(), op.r());
  const std::vector<double> px = inverse_sticks(op.x(), 1.0);
  p.insert(p.end(), px.begin(), px.end());
  return p;
}

bool lex_less(const DiscreteOrderParameter& a, const DiscreteOrderParameter& b) {
  if (a.q() != b.q()) return a.q() < b.q();
  return a.x() < b.x();
}

struct Candidate {
  DiscreteOrderParameter op;
  double value;
  int start;
  int evaluations;
};

}  // namespace

InnerResult minimize_order_parameter(const OrderObjective& f, double r, std::size_t n,
                                     const OptimizerOptions& opts) {
  if (opts.starts < 5) fail(ErrorCode::InvalidArgument, "optimizer needs at least 5 starts");
  if (n == 0) {
    DiscreteOrderParameter op = DiscreteOrderParameter::validate(r, {}, {});
    const double value = f(op);
    return {op, value, false, 0.0, {{r, 0, 0, value, 1}}, {value}};
  }

  InnerResult lower = minimize_order_parameter(f, r, n - 1, opts);

  std::vector<std::vector<double>> starts;
  starts.emplace_back(2 * n, 0.0);
  RandomStream rng(opts.seed, 0x5eed0000u + n);
  for (int s = 1; s < opts.starts; ++s) {
    std::vector<double> p(2 * n);
    for (double& v : p) v = 1.5 * rng.normal();
    starts.push_back(std::move(p));
  }
  if (n >= 2 && lower.op.levels() == n - 1) {
    // Split the top level of the n-1 optimum into two nearby levels.
    std::vector<double> q = lower.op.q(), x = lower.op.x();
    q.push_back(q.back() + 1e-3 * (r - q.back()));
    x.push_back(x.back() + 1e-3 * (1.0 - x.back()));
    try {
      starts.push_back(encode(DiscreteOrderParameter::validate(r, q, x)));
    } catch (const Error&) {
    }
  }

  std::vector<Candidate> found(starts.size(), Candidate{lower.op, kInf, 0, 0});
  std::vector<std::exception_ptr> first_error(starts.size());
  std::vector<char> any_ok(starts.size(), 0);
  numerics::NelderMeadOptions nm;
  nm.max_evaluations = opts.max_evaluations;
  nm.f_tol = 1e-11;
  nm.x_tol = 1e-8;
  auto polished = [&](const std::function<double(std::span<const double>)>& objective,
                      std::vector<double> start, const numerics::NelderMeadOptions& options) {
    auto res = numerics::nelder_mead(objective, std::move(start), options);
    // Saturated softmax coordinates have vanishing slope; re-centre and retry.
    for (int round = 0; round < 2 && std::isfinite(res.value); ++round) {
      std::vector<double> p = res.arg;
      bool saturated = false;
      for (double& v : p) {
        if (std::abs(v) > kPolishClamp) {
          v = std::clamp(v, -kPolishClamp, kPolishClamp);
          saturated = true;
        }
      }
      if (!saturated) break;
      auto again = numerics::nelder_mead(objective, std::move(p), options);
      again.evaluations += res.evaluations;
      if (again.value < res.value) {
        res = std::move(again);
      } else {
        res.evaluations = again.evaluations;
        break;
      }
    }
    return res;
  };
  parallel_for(starts.size(), [&](std::size_t s) {
    auto evaluate = [&](const std::vector<double>& q, const std::vector<double>& x) {
      try {
        const double v = f(DiscreteOrderParameter::validate(r, q, x));
        any_ok[s] = 1;
        return std::isfinite(v) ? v : kInf;
      } catch (const Error&) {
        if (!first_error[s]) first_error[s] = std::current_exception();
        return kInf;
      }
    };
    const int tag = s < static_cast<std::size_t>(opts.starts) ? static_cast<int>(s) : -1;
    found[s].start = tag;
    if (!opts.nested_x) {
      auto res = polished(
          [&](std::span<const double> p) {
            return evaluate(sticks(p.subspan(0, n), r), sticks(p.subspan(n, n), 1.0));
          },
          starts[s], nm);
      found[s].evaluations = res.evaluations;
      if (std::isfinite(res.value)) found[s] = Candidate{decode(res.arg, r, n), res.value, tag, res.evaluations};
      return;
    }
    int evaluations = 0;
    auto inner_x = [&](const std::vector<double>& q) {
      auto res = polished(
          [&](std::span<const double> px) { return evaluate(q, sticks(px, 1.0)); },
          std::vector<double>(n, 0.0), nm);
      evaluations += res.evaluations;
      return res;
    };
    auto outer = polished(
        [&](std::span<const double> pq) { return inner_x(sticks(pq, r)).value; },
        std::vector<double>(starts[s].begin(), starts[s].begin() + static_cast<std::ptrdiff_t>(n)), nm);
    found[s].evaluations = evaluations;
    if (!std::isfinite(outer.value)) return;
    const std::vector<double> q = sticks(outer.arg, r);
    const auto best_x = inner_x(q);
    if (std::isfinite(best_x.value)) {
      found[s] = Candidate{DiscreteOrderParameter::validate(r, q, sticks(best_x.arg, 1.0)), best_x.value,
                           tag, evaluations};
    }
  });

  bool ok = false;
  for (char b : any_ok) ok = ok || b != 0;
  if (!ok) {
    for (const auto& e : first_error) {
      if (e) std::rethrow_exception(e);
    }
  }

  InnerResult out = lower;
  double best = kInf, worst = -kInf;
  const Candidate* winner = nullptr;
  for (const Candidate& cand : found) {
    out.trace.push_back({r, n, cand.start, cand.value, cand.evaluations});
    if (!std::isfinite(cand.value)) continue;
    worst = std::max(worst, cand.value);
    if (!winner || cand.value < best || (cand.value == best && lex_less(cand.op, winner->op))) {
      winner = &cand;
      best = cand.value;
    }
  }
  if (winner && winner->value < lower.value - opts.tol) {
    out.op = winner->op;
    out.value = winner->value;
    out.no_descent = false;
    out.spread = worst - best;
  } else {
    out.no_descent = true;
    out.spread = winner ? worst - best : 0.0;
  }
  out.level_values.push_back(out.value);
  return out;
}

InnerResult optimize_x(const Correlator& c, double r, double beta, const StateSpace& space,
                       std::size_t n, const EvalConfig& cfg, const OptimizerOptions& opts) {
  validate_eval_config(cfg, c);
  const double M = cfg.M_grid.back();
  // Probe the lambda infimum once at n = 0 so divergence surfaces as an error.
  parisi_at_M(c, DiscreteOrderParameter::validate(r, {}, {}), M, beta, space, cfg);
  return minimize_order_parameter(
      [&](const DiscreteOrderParameter& op) { return parisi_at_M(c, op, M, beta, space, cfg).value; },
      r, n, opts);
}

SaddleResult maximize_over_r(const std::function<InnerResult(double)>& inner, double lo, double hi,
                             std::vector<double> probes, const OptimizerOptions& opts) {
  std::map<double, InnerResult> cache;
  std::vector<TraceEntry> trace;
  auto eval = [&](double r) -> const InnerResult* {
    auto it = cache.find(r);
    if (it != cache.end()) return &it->second;
    try {
      InnerResult res = inner(r);
      trace.insert(trace.end(), res.trace.begin(), res.trace.end());
      return &cache.emplace(r, std::move(res)).first->second;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfimumDiverges && e.code() != ErrorCode::OutOfRange) throw;
      return nullptr;
    }
  };

  double feasible = std::numeric_limits<double>::quiet_NaN();
  for (double r : probes) {
    if (eval(r)) {
      feasible = r;
      break;
    }
  }
  if (std::isnan(feasible)) fail(ErrorCode::AllRInfeasible, "no feasible r found");

  double left = feasible, right = feasible;
  if (!eval(lo)) {
    double a = lo, b = feasible;
    for (int i = 0; i < 30 && b - a > opts.r_tol; ++i) {
      const double m = 0.5 * (a + b);
      (eval(m) ? b : a) = m;
    }
    left = b;
  } else {
    left = lo;
  }
  if (!eval(hi)) {
    double a = feasible, b = hi;
    for (int i = 0; i < 30 && b - a > opts.r_tol; ++i) {
      const double m = 0.5 * (a + b);
      (eval(m) ? a : b) = m;
    }
    right = a;
  } else {
    right = hi;
  }

  if (right > left) {
    numerics::golden_section_minimize(
        [&](double r) {
          const InnerResult* res = eval(r);
          return res ? -res->value : kInf;
        },
        left, right, opts.r_tol);
  }

  const std::pair<const double, InnerResult>* best = nullptr;
  for (const auto& entry : cache) {
    if (!best || entry.second.value > best->second.value) best = &entry;
  }
  SaddleResult out{best->first, best->second.op, best->second.value, best->second.op.levels(),
                   best->second.no_descent, best->second.spread,
                   std::numeric_limits<double>::quiet_NaN(), std::move(trace), best->second.level_values};
  return out;
}

SaddleResult optimize_saddle(const Correlator& c, double beta, const StateSpace& space, std::size_t n,
                             const EvalConfig& cfg, const OptimizerOptions& opts) {
  if (!space.is_product()) space.as_product();
  const double d = space.effective_size();
  if (beta == 0.0) {
    double mass = 0.0, second = 0.0;
    for (const auto& atom : space.as_product().atoms) {
      mass += atom.mass;
      second += atom.mass * atom.value * atom.value;
    }
    const double r = second / mass;
    return {r, DiscreteOrderParameter::validate(r, {}, {}), std::log(mass), 0, false, 0.0, 0.0, {},
            std::vector<double>(n + 1, std::log(mass))};
  }

  SaddleResult out = [&] {
    auto inner = [&](double r) { return optimize_x(c, r, beta, space, n, cfg, opts); };
    if (space.single_norm()) {
      InnerResult res = inner(d);
      return SaddleResult{d, res.op, res.value, res.op.levels(), res.no_descent, res.spread,
                          std::numeric_limits<double>::quiet_NaN(), res.trace, res.level_values};
    }
    const double lo = std::max(space.min_square(), 1e-6 * d);
    return maximize_over_r(inner, lo, d, {0.5 * (lo + d), 0.25 * lo + 0.75 * d, d}, opts);
  }();
  out.plateau_dev = local_parisi(c, out.op_star, beta, space, cfg, false).plateau_dev;
  return out;
}

}  // namespace isofree
