#include "isofree/parisi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "isofree/error.hpp"

namespace isofree {

namespace {

using numerics::UniformSpline;

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// A function on the line known exactly on a core interval and affine outside.
// Either the analytic boundary condition or a spline profile.
struct TailedFunction {
  const BoundaryCondition* boundary = nullptr;
  const UniformSpline* spline = nullptr;

  double operator()(double z) const { return boundary ? (*boundary)(z) : (*spline)(z); }

  double core_lo() const {
    if (spline) return spline->lo();
    return -std::max(boundary->left().onset, 1.0);
  }
  double core_hi() const {
    if (spline) return spline->hi();
    return std::max(boundary->right().onset, 1.0);
  }
  double left_slope() const { return spline ? spline->left_slope() : boundary->left().slope; }
  double right_slope() const { return spline ? spline->right_slope() : boundary->right().slope; }
  double left_intercept() const {
    if (spline) return spline->values().front() - spline->left_slope() * spline->lo();
    return boundary->left().intercept;
  }
  double right_intercept() const {
    if (spline) return spline->values().back() - spline->right_slope() * spline->hi();
    return boundary->right().intercept;
  }
  double slope_span() const { return std::abs(right_slope() - left_slope()); }
  double slope_bound() const { return std::max(std::abs(left_slope()), std::abs(right_slope())); }
};

// Uniform Simpson samples of a tailed function over its core interval,
// fine enough to resolve both the function and a Gaussian of width sigma.
struct CoreSamples {
  std::vector<double> z;
  std::vector<double> value;
  std::vector<double> log_weight;  // log of Simpson weight times step
};

CoreSamples sample_core(const TailedFunction& f, double sigma) {
  const double lo = f.core_lo(), hi = f.core_hi();
  const double span = f.slope_span();
  double step = std::min(sigma / 16.0, (hi - lo) / 64.0);
  if (span > 0.0) step = std::min(step, 0.05 / span);
  constexpr std::size_t kMaxIntervals = 40000;
  std::size_t intervals = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  intervals = std::clamp<std::size_t>(intervals + (intervals % 2), 64, kMaxIntervals);
  step = (hi - lo) / static_cast<double>(intervals);
  CoreSamples core;
  core.z.resize(intervals + 1);
  core.value.resize(intervals + 1);
  core.log_weight.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double z = lo + step * static_cast<double>(i);
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    core.z[i] = z;
    core.value[i] = f(z);
    core.log_weight[i] = std::log(w * step / 3.0);
  }
  return core;
}

// Whether Gauss-Hermite on the raw function is accurate for this variance.
bool use_hermite(const TailedFunction& f, double sigma, double x) {
  return sigma * std::max(f.slope_span(), x * f.slope_bound()) <= 0.5;
}

// (1/x) log E exp(x f(y + sigma Z)) at each y in ys.
std::vector<double> log_exp_level(const TailedFunction& f, double x, double sigma,
                                  const std::vector<double>& ys, int quad_nodes) {
  std::vector<double> out(ys.size());
  if (use_hermite(f, sigma, x)) {
    const auto& rule = numerics::gauss_hermite(quad_nodes);
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        terms[i] = rule.log_weights[i] + x * f(ys[j] + sigma * rule.nodes[i]);
      }
      out[j] = numerics::log_sum_exp(terms) / x;
    }
    return out;
  }
  const CoreSamples core = sample_core(f, sigma);
  std::vector<double> shifted(core.z.size());
  for (std::size_t i = 0; i < core.z.size(); ++i) shifted[i] = core.log_weight[i] + x * core.value[i];
  const double lo = core.z.front(), hi = core.z.back();
  const double sl = f.left_slope(), cl = f.left_intercept();
  const double sr = f.right_slope(), cr = f.right_intercept();
  const double inv2s2 = 0.5 / (sigma * sigma);
  const double log_norm = -std::log(sigma) - kLogSqrt2Pi;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const double y = ys[j];
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < core.z.size(); ++i) {
      const double d = core.z[i] - y;
      peak = std::max(peak, shifted[i] - d * d * inv2s2);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < core.z.size(); ++i) {
      const double d = core.z[i] - y;
      sum += std::exp(shifted[i] - d * d * inv2s2 - peak);
    }
    const double log_core = peak + std::log(sum) + log_norm;
    // Exact Gaussian integrals of exp(x (s z + c)) over the affine tails.
    const double log_right = x * (cr + sr * y) + 0.5 * x * x * sr * sr * sigma * sigma +
                             numerics::log_normal_sf((hi - y - x * sr * sigma * sigma) / sigma);
    const double log_left = x * (cl + sl * y) + 0.5 * x * x * sl * sl * sigma * sigma +
                            numerics::log_normal_cdf((lo - y - x * sl * sigma * sigma) / sigma);
    out[j] = numerics::log_add(log_core, numerics::log_add(log_left, log_right)) / x;
  }
  return out;
}

// E f(y + sigma Z).
double expectation_level(const TailedFunction& f, double sigma, double y, int quad_nodes) {
  if (sigma == 0.0) return f(y);
  if (use_hermite(f, sigma, 0.0)) {
    const auto& rule = numerics::gauss_hermite(quad_nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(y + sigma * rule.nodes[i]);
    return sum;
  }
  const CoreSamples core = sample_core(f, sigma);
  double sum = 0.0;
  for (std::size_t i = 0; i < core.z.size(); ++i) {
    const double d = (core.z[i] - y) / sigma;
    sum += std::exp(core.log_weight[i]) * core.value[i] * numerics::normal_pdf(d) / sigma;
  }
  const double a = (core.z.back() - y) / sigma;
  const double b = (core.z.front() - y) / sigma;
  const double sr = f.right_slope(), cr = f.right_intercept();
  const double sl = f.left_slope(), cl = f.left_intercept();
  sum += (sr * y + cr) * numerics::normal_sf(a) + sr * sigma * numerics::normal_pdf(a);
  sum += (sl * y + cl) * numerics::normal_cdf(b) - sl * sigma * numerics::normal_pdf(b);
  return sum;
}

struct LevelStep {
  double x;
  double variance;
};

// Top-down list of (exponent, variance) steps with equal consecutive
// exponents merged and zero-variance steps dropped. The last entry is the
// plain expectation (x = 0) over the bottom variance.
std::vector<LevelStep> canonical_steps(const DiscreteOrderParameter& op,
                                       const std::vector<double>& delta) {
  const std::size_t n = op.levels();
  std::vector<LevelStep> steps;
  for (std::size_t k = n; k >= 1; --k) {
    const double x = op.x_at(k);
    const double v = delta[k];  // Delta_{k+1}
    if (v == 0.0) continue;
    if (!steps.empty() && steps.back().x == x) {
      steps.back().variance += v;
    } else {
      steps.push_back({x, v});
    }
  }
  steps.push_back({0.0, delta[0]});
  return steps;
}

}  // namespace

void validate_eval_config(const EvalConfig& cfg, const Correlator& c) {
  if (cfg.M_grid.empty()) fail(ErrorCode::InvalidArgument, "M_grid must not be empty");
  for (std::size_t i = 0; i < cfg.M_grid.size(); ++i) {
    if (!(cfg.M_grid[i] > 0.0) || (i > 0 && !(cfg.M_grid[i] > cfg.M_grid[i - 1]))) {
      fail(ErrorCode::InvalidArgument, "M_grid must be positive and increasing");
    }
    if (cfg.M_grid[i] < c.m_threshold()) fail(ErrorCode::MTooSmall, "M_grid below correlator threshold");
  }
  if (!(cfg.y_halfwidth > 0.0)) fail(ErrorCode::InvalidArgument, "y_halfwidth must be positive");
  if (cfg.y_points < 64) fail(ErrorCode::InvalidArgument, "y_points must be >= 64");
  if (cfg.quad_nodes < 16) fail(ErrorCode::InvalidArgument, "quad_nodes must be >= 16");
  if (!(cfg.lambda_lo < cfg.lambda_hi)) fail(ErrorCode::InvalidArgument, "lambda_bracket must be increasing");
  if (!(cfg.tol_lambda > 0.0) || !(cfg.tol_value > 0.0)) {
    fail(ErrorCode::InvalidArgument, "tolerances must be positive");
  }
  if (!(cfg.fd_dy > 0.0) || !(cfg.fd_cfl > 0.0) || cfg.fd_q_steps < 1) {
    fail(ErrorCode::InvalidArgument, "finite-difference settings must be positive");
  }
}

std::vector<double> level_variances(const Correlator& c, const DiscreteOrderParameter& op, double M) {
  const std::size_t n = op.levels();
  std::vector<double> m(n + 2, 0.0);
  for (std::size_t k = 1; k <= n; ++k) m[k] = c.D_prime_M(2.0 * (op.r() - op.q_at(k)), M);
  m[n + 1] = M;
  std::vector<double> delta(n + 1);
  for (std::size_t k = 1; k <= n + 1; ++k) {
    delta[k - 1] = m[k] - m[k - 1];
    if (delta[k - 1] < 0.0) fail(ErrorCode::MTooSmall, "level variance sequence is not non-decreasing");
  }
  return delta;
}

RecursionResult solve_recursion(const Correlator& c, const DiscreteOrderParameter& op, double M,
                                double beta, double lambda, const StateSpace& space,
                                const EvalConfig& cfg, bool keep_profiles) {
  const std::vector<double> delta = level_variances(c, op, M);
  const BoundaryCondition boundary(space, beta, lambda);
  const std::vector<LevelStep> steps = canonical_steps(op, delta);

  RecursionResult result{0.0, lambda, M, 0.0, {}};
  // Variance accumulated below the top level sets the y-grid width.
  double lower_variance = 0.0;
  for (std::size_t i = 1; i < steps.size(); ++i) lower_variance += steps[i].variance;
  const double half = cfg.y_halfwidth * std::sqrt(std::max(lower_variance, 1.0));
  const std::size_t points = static_cast<std::size_t>(cfg.y_points) | 1u;
  const double step = 2.0 * half / static_cast<double>(points - 1);
  std::vector<double> ys(points);
  for (std::size_t i = 0; i < points; ++i) ys[i] = -half + step * static_cast<double>(i);

  if (steps.size() > 1) {
    const double s = std::sqrt(lower_variance);
    const double a = half / s;
    const double excess = 2.0 * s * (numerics::normal_pdf(a) - a * numerics::normal_sf(a));
    result.tail_estimate = boundary.slope_span() * excess;
    if (result.tail_estimate > cfg.tol_value) {
      fail(ErrorCode::GridTooNarrow, "y-grid too narrow: tail estimate " +
                                         std::to_string(result.tail_estimate));
    }
  }

  UniformSpline current;
  TailedFunction f{&boundary, nullptr};
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    std::vector<double> values =
        log_exp_level(f, steps[i].x, std::sqrt(steps[i].variance), ys, cfg.quad_nodes);
    for (double v : values) {
      if (!std::isfinite(v)) fail(ErrorCode::NonfiniteValue, "non-finite profile value");
    }
    current = UniformSpline(-half, step, std::move(values));
    if (keep_profiles) result.profiles.push_back(current);
    f = TailedFunction{nullptr, &current};
  }
  if (keep_profiles) std::reverse(result.profiles.begin(), result.profiles.end());
  result.f00 = expectation_level(f, std::sqrt(steps.back().variance), 0.0, cfg.quad_nodes);
  if (!std::isfinite(result.f00)) fail(ErrorCode::NonfiniteValue, "non-finite f(0,0)");
  return result;
}

double solve_pde_fd(const Correlator& c, const DiscreteOrderParameter& op, double M, double beta,
                    double lambda, const StateSpace& space, const EvalConfig& cfg) {
  const double r = op.r();
  const std::size_t n = op.levels();
  const BoundaryCondition boundary(space, beta, lambda);
  const double sr = boundary.right().slope, sl = boundary.left().slope;

  // m(q) = D'^M(2(r - q)) with m(r) = M; its increments are the diffusion
  // coefficient integrated over q.
  auto m_of = [&](double q) { return q >= r ? M : c.D_prime_M(2.0 * (r - q), M); };

  double x_max = 0.0;
  for (double xk : op.x()) x_max = std::max(x_max, xk);
  const double dy = cfg.fd_dy;
  const double drift = 0.5 * x_max * std::abs(sr + sl) * M;
  const double half = std::max(boundary.left().onset, boundary.right().onset) + 10.0 * std::sqrt(M) +
                      drift + 5.0;
  const std::size_t K = static_cast<std::size_t>(std::ceil(half / dy));
  const std::size_t P = 2 * K + 1;
  std::vector<double> f(P), work(P), pred(P), nonlinear(P), nonlinear_pred(P);
  for (std::size_t i = 0; i < P; ++i) {
    f[i] = boundary(dy * (static_cast<double>(i) - static_cast<double>(K)));
  }
  std::vector<double> cp(P), dp(P);

  // One Crank-Nicolson solve: (I - a D2) out = (I + a D2) base + dt * src,
  // Dirichlet values left/right at the new time level.
  auto cn_solve = [&](const std::vector<double>& base, const std::vector<double>& src, double dt,
                      double left, double right, std::vector<double>& out) {
    const double a = dt / (4.0 * dy * dy);
    const double diag = 1.0 + 2.0 * a;
    out[0] = left;
    out[P - 1] = right;
    for (std::size_t i = 1; i + 1 < P; ++i) {
      double rhs = a * base[i - 1] + (1.0 - 2.0 * a) * base[i] + a * base[i + 1] + dt * src[i];
      if (i == 1) rhs += a * left;
      if (i == P - 2) rhs += a * right;
      const double lower = i == 1 ? 0.0 : -a;
      const double denom = diag - lower * (i == 1 ? 0.0 : cp[i - 1]);
      cp[i] = -a / denom;
      dp[i] = (rhs - lower * (i == 1 ? 0.0 : dp[i - 1])) / denom;
    }
    out[P - 2] = dp[P - 2];
    for (std::size_t i = P - 3; i >= 1; --i) out[i] = dp[i] - cp[i] * out[i + 1];
  };
  auto fill_nonlinear = [&](const std::vector<double>& u, double x, std::vector<double>& out,
                            double& speed) {
    speed = 0.0;
    out[0] = out[P - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < P; ++i) {
      const double grad = (u[i + 1] - u[i - 1]) / (2.0 * dy);
      out[i] = 0.5 * x * grad * grad;
      speed = std::max(speed, std::abs(x * grad));
    }
  };

  auto diffuse = [&](double variance, double x) {
    if (variance <= 0.0) return;
    double dt_max = 4.0 * dy;
    if (x > 0.0) dt_max = std::min(dt_max, cfg.fd_cfl * dy / (x * boundary.slope_bound() + 1e-300));
    const std::size_t count = static_cast<std::size_t>(std::ceil(variance / dt_max));
    const double dt = variance / static_cast<double>(count);
    for (std::size_t s = 0; s < count; ++s) {
      const double left = f[0] + 0.5 * x * sl * sl * dt;
      const double right = f[P - 1] + 0.5 * x * sr * sr * dt;
      if (x == 0.0) {
        std::fill(nonlinear.begin(), nonlinear.end(), 0.0);
        cn_solve(f, nonlinear, dt, left, right, work);
        f.swap(work);
        continue;
      }
      double speed = 0.0;
      fill_nonlinear(f, x, nonlinear, speed);
      if (speed * dt / dy > 1.0) fail(ErrorCode::CFLViolation, "finite-difference CFL condition violated");
      cn_solve(f, nonlinear, dt, left, right, pred);
      double speed_pred = 0.0;
      fill_nonlinear(pred, x, nonlinear_pred, speed_pred);
      for (std::size_t i = 0; i < P; ++i) nonlinear_pred[i] = 0.5 * (nonlinear[i] + nonlinear_pred[i]);
      cn_solve(f, nonlinear_pred, dt, left, right, work);
      f.swap(work);
    }
  };

  // Backward in q over [q_k, q_{k+1}] with x = x_k, k = n .. 0.
  for (std::size_t k = n + 1; k-- > 0;) {
    const double qa = op.q_at(k), qb = op.q_at(k + 1);
    const double x = op.x_at(k);
    const std::size_t substeps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.fd_q_steps * (qb - qa) / r)));
    for (std::size_t s = substeps; s-- > 0;) {
      const double hi = qa + (qb - qa) * static_cast<double>(s + 1) / static_cast<double>(substeps);
      const double lo = qa + (qb - qa) * static_cast<double>(s) / static_cast<double>(substeps);
      diffuse(m_of(hi) - m_of(lo), x);
    }
  }
  // Initial mass m(0) = D'(2r) carried by the x = 0 level.
  diffuse(m_of(0.0), 0.0);
  const double value = f[K];
  if (!std::isfinite(value)) fail(ErrorCode::NonfiniteValue, "non-finite finite-difference value");
  return value;
}

double fixed_lambda_value(const Correlator& c, const DiscreteOrderParameter& op, double M,
                          double beta, double lambda, const StateSpace& space, const EvalConfig& cfg) {
  return solve_recursion(c, op, M, beta, lambda, space, cfg).f00 - lambda * op.r();
}

LambdaInfimum lambda_infimum(const Correlator& c, const DiscreteOrderParameter& op, double M,
                             double beta, const StateSpace& space, const EvalConfig& cfg) {
  const double r = op.r();
  const double d = space.effective_size();
  if (space.single_norm()) {
    // u^2 == d: f00(lambda) = f00(0) + lambda d, so the objective is affine.
    if (std::abs(r - d) > 1e-12 * d) {
      fail(ErrorCode::InfimumDiverges, "lambda infimum is -inf: r differs from the pinned radius");
    }
    return {0.0, solve_recursion(c, op, M, beta, 0.0, space, cfg).f00, 1};
  }

  int evaluations = 0;
  auto objective = [&](double lambda) {
    ++evaluations;
    return solve_recursion(c, op, M, beta, lambda, space, cfg).f00 - lambda * r;
  };
  // Center on the shift that absorbs the top-level variance.
  double center = 0.0;
  if (op.levels() > 0) {
    const std::vector<double> delta = level_variances(c, op, M);
    center = -0.5 * op.x().back() * beta * beta * delta.back();
  }
  double lo = center + cfg.lambda_lo, hi = center + cfg.lambda_hi;
  double mid = 0.5 * (lo + hi);
  const double f_mid = objective(mid);
  double f_lo = objective(lo), f_hi = objective(hi);
  const double slack = cfg.tol_value;
  int expansions = 0;
  while (f_lo < f_mid - slack) {
    if (++expansions > 10) fail(ErrorCode::InfimumDiverges, "lambda infimum diverges toward -inf lambda");
    lo = mid - 2.0 * (mid - lo);
    f_lo = objective(lo);
  }
  expansions = 0;
  while (f_hi < f_mid - slack) {
    if (++expansions > 10) fail(ErrorCode::InfimumDiverges, "lambda infimum diverges toward +inf lambda");
    hi = mid + 2.0 * (hi - mid);
    f_hi = objective(hi);
  }
  const auto best = numerics::golden_section_minimize(objective, lo, hi, cfg.tol_lambda);
  LambdaInfimum out{best.arg, best.value, evaluations};
  if (f_lo < out.value) out = {lo, f_lo, evaluations};
  if (f_hi < out.value) out = {hi, f_hi, evaluations};
  if (f_mid < out.value) out = {mid, f_mid, evaluations};
  return out;
}

ParisiAtM parisi_at_M(const Correlator& c, const DiscreteOrderParameter& op, double M, double beta,
                      const StateSpace& space, const EvalConfig& cfg) {
  const LambdaInfimum inf = lambda_infimum(c, op, M, beta, space, cfg);
  const double value = inf.value - 0.5 * beta * beta * theta_stieltjes_sum(op, c, M);
  if (!std::isfinite(value)) fail(ErrorCode::NonfiniteValue, "non-finite Parisi value");
  return {M, value, inf.lambda_star};
}

LocalParisiResult local_parisi(const Correlator& c, const DiscreteOrderParameter& op, double beta,
                               const StateSpace& space, const EvalConfig& cfg, bool require_plateau) {
  validate_eval_config(cfg, c);
  LocalParisiResult result{};
  for (double M : cfg.M_grid) result.per_M.push_back(parisi_at_M(c, op, M, beta, space, cfg));
  const ParisiAtM& last = result.per_M.back();
  result.value = last.value;
  result.lambda_star = last.lambda_star;
  result.plateau_dev = 0.0;
  for (std::size_t i = result.per_M.size() / 2; i < result.per_M.size(); ++i) {
    result.plateau_dev = std::max(result.plateau_dev, std::abs(result.per_M[i].value - last.value));
  }
  if (require_plateau && result.plateau_dev > 10.0 * cfg.tol_value) {
    fail(ErrorCode::PlateauNotReached,
         "M-plateau deviation " + std::to_string(result.plateau_dev) + " exceeds 10*tol_value");
  }
  return result;
}

}  // namespace isofree
