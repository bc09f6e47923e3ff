#include "isofree/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace isofree::numerics {

namespace {

GaussHermite build_gauss_hermite(int count) {
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermite rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  rule.log_weights.resize(count);
  for (int i = 0; i < count; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  // Symmetrize to remove eigen-solver jitter.
  for (int i = 0; i < count / 2; ++i) {
    const int j = count - 1 - i;
    const double node = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double weight = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -node;
    rule.nodes[j] = node;
    rule.weights[i] = rule.weights[j] = weight;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (int i = 0; i < count; ++i) {
    rule.weights[i] /= total;
    rule.log_weights[i] = std::log(rule.weights[i]);
  }
  return rule;
}

}  // namespace

const GaussHermite& gauss_hermite(int count) {
  static std::mutex mutex;
  static std::map<int, GaussHermite> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(count);
  if (it == cache.end()) it = cache.emplace(count, build_gauss_hermite(count)).first;
  return it->second;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double log_normal_sf(double a) {
  if (a < 30.0) return std::log(0.5 * std::erfc(a / std::numbers::sqrt2));
  // Asymptotic series; relative error below 1e-12 for a >= 30.
  const double inv2 = 1.0 / (a * a);
  const double series =
      1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2 * (1.0 - 9.0 * inv2))));
  return -0.5 * a * a - std::log(a) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_normal_cdf(double b) { return log_normal_sf(-b); }

double normal_sf(double a) { return 0.5 * std::erfc(a / std::numbers::sqrt2); }
double normal_cdf(double b) { return 0.5 * std::erfc(-b / std::numbers::sqrt2); }

double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

UniformSpline::UniformSpline(double lo, double step, std::vector<double> values)
    : lo_(lo), step_(step), values_(std::move(values)) {
  const std::size_t n = values_.size();
  if (n < 4) throw std::invalid_argument("UniformSpline needs at least 4 knots");
  second_.assign(n, 0.0);
  // Thomas algorithm for M[i-1] + 4 M[i] + M[i+1] = rhs, natural ends.
  std::vector<double> diag(n, 4.0), rhs(n, 0.0);
  const double scale = 6.0 / (step_ * step_);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    rhs[i] = scale * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double m = 1.0 / diag[i - 1];
    diag[i] -= m;
    rhs[i] -= m * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) second_[i] = (rhs[i] - second_[i + 1]) / diag[i];
  left_slope_ = (values_[1] - values_[0]) / step_ - step_ * second_[1] / 6.0;
  right_slope_ = (values_[n - 1] - values_[n - 2]) / step_ + step_ * second_[n - 2] / 6.0;
}

double UniformSpline::operator()(double y) const {
  const std::size_t n = values_.size();
  if (y <= lo_) return values_.front() + left_slope_ * (y - lo_);
  const double top = hi();
  if (y >= top) return values_.back() + right_slope_ * (y - top);
  std::size_t i = static_cast<std::size_t>((y - lo_) / step_);
  if (i > n - 2) i = n - 2;
  const double a = (lo_ + static_cast<double>(i + 1) * step_ - y) / step_;
  const double b = 1.0 - a;
  const double h2 = step_ * step_ / 6.0;
  return a * values_[i] + b * values_[i + 1] +
         h2 * ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]);
}

double UniformSpline::derivative(double y) const {
  const std::size_t n = values_.size();
  if (y <= lo_) return left_slope_;
  if (y >= hi()) return right_slope_;
  std::size_t i = static_cast<std::size_t>((y - lo_) / step_);
  if (i > n - 2) i = n - 2;
  const double a = (lo_ + static_cast<double>(i + 1) * step_ - y) / step_;
  const double b = 1.0 - a;
  return (values_[i + 1] - values_[i]) / step_ +
         step_ / 6.0 * (-(3.0 * a * a - 1.0) * second_[i] + (3.0 * b * b - 1.0) * second_[i + 1]);
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  int evaluations = 2;
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
    ++evaluations;
  }
  return fc <= fd ? ScalarMinimum{c, fc, evaluations} : ScalarMinimum{d, fd, evaluations};
}

namespace {

NelderMeadResult nelder_mead_once(const std::function<double(std::span<const double>)>& f,
                                  const std::vector<double>& start, const NelderMeadOptions& options,
                                  int budget) {
  const std::size_t dim = start.size();
  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> values(dim + 1);
  int evaluations = 0;
  auto eval = [&](const std::vector<double>& p) {
    ++evaluations;
    const double v = f(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  while (evaluations < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];
    double size = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        size = std::max(size, std::abs(simplex[i][k] - simplex[best][k]));
      }
    }
    if (values[worst] - values[best] <= options.f_tol && size <= options.x_tol) break;
    if (size <= options.x_tol * 1e-3) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
    }
    for (std::size_t k = 0; k < dim; ++k) trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      for (std::size_t k = 0; k < dim; ++k) trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    for (std::size_t k = 0; k < dim; ++k) {
      trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                          : centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
    }
    const double f_contract = eval(trial2);
    if (f_contract < std::min(f_reflect, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k) {
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      }
      values[i] = eval(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
  return {simplex[best], values[best], evaluations};
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, const NelderMeadOptions& options) {
  if (start.empty()) {
    return {start, f(start), 1};
  }
  NelderMeadResult result = nelder_mead_once(f, start, options, options.max_evaluations);
  // Restart from the best vertex until a fresh simplex stops improving.
  for (int restart = 0; restart < 3 && result.evaluations < options.max_evaluations; ++restart) {
    NelderMeadOptions again = options;
    again.initial_step = options.initial_step * 0.25;
    const NelderMeadResult next =
        nelder_mead_once(f, result.arg, again, options.max_evaluations - result.evaluations);
    const bool improved = next.value < result.value - options.f_tol;
    const int total = result.evaluations + next.evaluations;
    if (next.value < result.value) result = next;
    result.evaluations = total;
    if (!improved) break;
  }
  return result;
}

}  // namespace isofree::numerics
