#include "isofree/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isofree/error.hpp"
#include "isofree/numerics.hpp"
#include "isofree/parallel.hpp"
#include "isofree/rng.hpp"

namespace isofree {

namespace {

double squared_norm(const Point& u) {
  double s = 0.0;
  for (double a : u) s += a * a;
  return s;
}

double squared_distance(const Point& u, const Point& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
  return s;
}

// sum over index tuples of g_{i_1..i_p} u_{i_1}..u_{i_p}, contracting the
// last index first.
double contract(const std::vector<double>& g, const Point& u, int p) {
  const std::size_t N = u.size();
  std::vector<double> buf(g.begin(), g.end());
  std::size_t len = buf.size();
  for (int level = 0; level < p; ++level) {
    len /= N;
    for (std::size_t i = 0; i < len; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += buf[i * N + j] * u[j];
      buf[i] = s;
    }
  }
  return buf[0];
}

std::size_t atom_index(const ProductSpace& space, double value) {
  for (std::size_t a = 0; a < space.atoms.size(); ++a) {
    if (std::abs(space.atoms[a].value - value) <= 1e-12 * std::max(1.0, std::abs(value))) return a;
  }
  fail(ErrorCode::InvalidArgument, "point coordinate is not an atom of the state space");
}

void check_enumeration(const ProductSpace& space, std::size_t N) {
  const std::size_t atoms = space.atoms.size();
  const bool ok = (atoms == 2 && N <= 20) || (atoms == 3 && N <= 12);
  if (!ok || N == 0) {
    fail(ErrorCode::EnumerationTooLarge, "enumeration of " + std::to_string(atoms) + "^" + std::to_string(N) +
                                             " configurations exceeds the exact-enumeration cap");
  }
}

}  // namespace

double SeriesField::value(const Point& u) const {
  double x = std::sqrt(gamma[0]) * g0;
  for (std::size_t p = 1; p < gamma.size(); ++p) {
    if (gamma[p] == 0.0) continue;
    x += std::sqrt(gamma[p]) * std::pow(static_cast<double>(N), -0.5 * static_cast<double>(p)) *
         contract(couplings[p - 1], u, static_cast<int>(p));
  }
  return x;
}

double field_covariance(const Correlator& c, const Point& u, const Point& v) {
  const double N = static_cast<double>(u.size());
  if (c.kind() == CorrelatorKind::Isotropic) return c.B(squared_distance(u, v) / N);
  return 0.5 * (c.D(squared_norm(u) / N) + c.D(squared_norm(v) / N) - c.D(squared_distance(u, v) / N));
}

ExactSampler::ExactSampler(const Correlator& c, std::vector<Point> points) : points_(std::move(points)) {
  const std::size_t P = points_.size();
  if (P == 0) fail(ErrorCode::InvalidArgument, "point list is empty");
  if (P > kMaxExactPoints) {
    fail(ErrorCode::TooManyPoints, std::to_string(P) + " points exceed the exact-route cap");
  }
  for (const Point& u : points_) {
    if (u.size() != points_[0].size()) fail(ErrorCode::InvalidArgument, "points differ in dimension");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(P);
  Eigen::MatrixXd cov(n, n);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = field_covariance(c, points_[static_cast<std::size_t>(i)], points_[static_cast<std::size_t>(j)]);
    }
    scale = std::max(scale, cov(i, i));
  }
  if (scale == 0.0) scale = 1.0;
  for (double ridge : {0.0, 1e-14, 1e-12, 1e-10, 1e-9, 1e-8}) {
    factor_ = cov.triangularView<Eigen::Lower>();
    factor_.diagonal().array() += ridge * scale;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(factor_);
    if (llt.info() == Eigen::Success) {
      ridge_ = ridge * scale;
      if (ridge > 1e-10) warning_ = "covariance needed diagonal ridge " + std::to_string(ridge_);
      factor_ = factor_.triangularView<Eigen::Lower>();
      return;
    }
  }
  fail(ErrorCode::NotPSD, "covariance is not positive semidefinite within ridge 1e-8");
}

ExactField ExactSampler::draw(std::uint64_t seed, std::uint64_t stream) const {
  RandomStream rng(seed, stream);
  Eigen::VectorXd z(factor_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const Eigen::VectorXd x = factor_.triangularView<Eigen::Lower>() * z;
  return ExactField{points_, std::vector<double>(x.data(), x.data() + x.size()), ridge_};
}

ExactField sample_field_exact(const Correlator& c, std::vector<Point> points, std::uint64_t seed) {
  return ExactSampler(c, std::move(points)).draw(seed, 0);
}

SeriesField sample_field_series(const Correlator& c, double r, std::size_t N, int p_max, std::uint64_t seed,
                                double epsilon, std::size_t max_couplings) {
  if (N == 0) fail(ErrorCode::InvalidArgument, "N must be positive");
  const OverlapSeries series = c.overlap_series(r, p_max);
  if (series.tail_bound > epsilon) {
    fail(ErrorCode::TailTooLarge, "overlap-series tail bound " + std::to_string(series.tail_bound) +
                                      " exceeds " + std::to_string(epsilon));
  }
  double total = 0.0, size = 1.0;
  for (int p = 1; p <= p_max; ++p) {
    size *= static_cast<double>(N);
    total += size;
  }
  if (total > static_cast<double>(max_couplings)) {
    fail(ErrorCode::MemoryCap, "coupling tensors need " + std::to_string(total) + " entries");
  }
  RandomStream rng(seed, 0);
  SeriesField field{N, r, series.coefficients, rng.normal(), {}, series.tail_bound};
  std::size_t len = 1;
  for (int p = 1; p <= p_max; ++p) {
    len *= N;
    std::vector<double> g(len);
    for (double& v : g) v = rng.normal();
    field.couplings.push_back(std::move(g));
  }
  return field;
}

std::vector<Point> enumerate_configurations(const StateSpace& space, std::size_t N) {
  const ProductSpace& ps = space.as_product();
  check_enumeration(ps, N);
  const std::size_t A = ps.atoms.size();
  std::size_t count = 1;
  for (std::size_t i = 0; i < N; ++i) count *= A;
  std::vector<Point> out(count, Point(N));
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < N; ++i) {
      out[idx][i] = ps.atoms[rest % A].value;
      rest /= A;
    }
  }
  return out;
}

namespace {

double log_partition_exact(const ExactField& field, double beta, const ProductSpace& ps, std::size_t N) {
  const double root = std::sqrt(static_cast<double>(N));
  std::vector<double> terms(field.points.size());
  for (std::size_t k = 0; k < field.points.size(); ++k) {
    double log_mu = 0.0;
    for (double v : field.points[k]) log_mu += std::log(ps.atoms[atom_index(ps, v)].mass);
    terms[k] = log_mu + beta * root * field.values[k];
  }
  return numerics::log_sum_exp(terms) / static_cast<double>(N);
}

double log_partition_series_naive(const SeriesField& field, double beta, const ProductSpace& ps,
                                  std::size_t N) {
  const std::size_t A = ps.atoms.size();
  std::size_t count = 1;
  for (std::size_t i = 0; i < N; ++i) count *= A;
  const double root = std::sqrt(static_cast<double>(N));
  std::vector<double> terms(count);
  Point u(N);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    double log_mu = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const SpinAtom& atom = ps.atoms[rest % A];
      u[i] = atom.value;
      log_mu += std::log(atom.mass);
      rest /= A;
    }
    terms[idx] = log_mu + beta * root * field.value(u);
  }
  return numerics::log_sum_exp(terms) / static_cast<double>(N);
}

// Binary Gray-code sweep: orders one and two are updated incrementally on each
// single-coordinate change, higher orders are contracted afresh.
double log_partition_series_gray(const SeriesField& field, double beta, const ProductSpace& ps,
                                 std::size_t N) {
  const SpinAtom lo = ps.atoms[0], hi = ps.atoms[1];
  const double root = std::sqrt(static_cast<double>(N));
  const double n_d = static_cast<double>(N);
  const std::size_t P = field.gamma.size() - 1;
  const double c1 = P >= 1 ? std::sqrt(field.gamma[1]) / std::sqrt(n_d) : 0.0;
  const double c2 = P >= 2 ? std::sqrt(field.gamma[2]) / n_d : 0.0;
  Point u(N, lo.value);
  std::vector<bool> bit(N, false);
  double log_mu = n_d * std::log(lo.mass);
  double h1 = 0.0, x2 = 0.0;
  std::vector<double> local(N, 0.0);  // sum_j (J_kj + J_jk) u_j
  if (P >= 1) {
    for (std::size_t i = 0; i < N; ++i) h1 += field.couplings[0][i] * u[i];
  }
  if (P >= 2) {
    const std::vector<double>& J = field.couplings[1];
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        x2 += J[i * N + j] * u[i] * u[j];
        local[i] += (J[i * N + j] + J[j * N + i]) * u[j];
      }
    }
  }
  auto energy = [&] {
    double x = std::sqrt(field.gamma[0]) * field.g0 + c1 * h1 + c2 * x2;
    for (std::size_t p = 3; p <= P; ++p) {
      if (field.gamma[p] == 0.0) continue;
      x += std::sqrt(field.gamma[p]) * std::pow(n_d, -0.5 * static_cast<double>(p)) *
           contract(field.couplings[p - 1], u, static_cast<int>(p));
    }
    return x;
  };
  const std::size_t count = std::size_t{1} << N;
  std::vector<double> terms(count);
  terms[0] = log_mu + beta * root * energy();
  for (std::size_t step = 1; step < count; ++step) {
    const std::size_t k = static_cast<std::size_t>(__builtin_ctzll(step));
    const double old = u[k];
    const double now = bit[k] ? lo.value : hi.value;
    log_mu += bit[k] ? std::log(lo.mass) - std::log(hi.mass) : std::log(hi.mass) - std::log(lo.mass);
    bit[k] = !bit[k];
    const double delta = now - old;
    if (P >= 1) h1 += field.couplings[0][k] * delta;
    if (P >= 2) {
      const std::vector<double>& J = field.couplings[1];
      const double jkk = J[k * N + k];
      x2 += delta * (local[k] - 2.0 * jkk * old) + jkk * (now * now - old * old);
      for (std::size_t j = 0; j < N; ++j) local[j] += (J[j * N + k] + J[k * N + j]) * delta;
    }
    u[k] = now;
    terms[step] = log_mu + beta * root * energy();
  }
  return numerics::log_sum_exp(terms) / n_d;
}

}  // namespace

double log_partition(const FieldRealization& field, double beta, const StateSpace& space, std::size_t N,
                     bool gray_code) {
  const ProductSpace& ps = space.as_product();
  check_enumeration(ps, N);
  if (beta == 0.0) return space.log_total_mass();
  if (const auto* exact = std::get_if<ExactField>(&field)) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < N; ++i) count *= ps.atoms.size();
    if (exact->points.size() != count || exact->points[0].size() != N) {
      fail(ErrorCode::InvalidArgument, "exact field does not cover the configuration space");
    }
    return log_partition_exact(*exact, beta, ps, N);
  }
  const SeriesField& series = std::get<SeriesField>(field);
  if (series.N != N) fail(ErrorCode::InvalidArgument, "series field dimension differs from N");
  if (gray_code && ps.atoms.size() == 2) return log_partition_series_gray(series, beta, ps, N);
  return log_partition_series_naive(series, beta, ps, N);
}

ReplicaSet simulate_log_partition(const Correlator& c, double beta, const StateSpace& space, std::size_t N,
                                  std::size_t reps, std::uint64_t seed) {
  if (reps < 2) fail(ErrorCode::InvalidArgument, "need at least 2 replicas");
  ReplicaSet out;
  out.p_N.assign(reps, 0.0);
  if (beta == 0.0) {
    enumerate_configurations(space, N);
    std::fill(out.p_N.begin(), out.p_N.end(), space.log_total_mass());
  } else {
    const ExactSampler sampler(c, enumerate_configurations(space, N));
    out.warning = sampler.warning();
    parallel_for(reps, [&](std::size_t i) {
      out.p_N[i] = log_partition(sampler.draw(seed, i), beta, space, N);
    });
  }
  double sum = 0.0;
  for (double v : out.p_N) sum += v;
  out.mean = sum / static_cast<double>(reps);
  double ss = 0.0;
  for (double v : out.p_N) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  if (beta == 0.0) out.mean = space.log_total_mass();
  return out;
}

ConcentrationReport concentration_check(const Correlator& c, const ReplicaSet& replicas, double d,
                                        std::size_t N, const std::vector<double>& t_grid) {
  ConcentrationReport report{replicas.mean, {}, 0};
  const double reps = static_cast<double>(replicas.p_N.size());
  const double scale = 4.0 * c.D(d);
  for (double t : t_grid) {
    std::size_t hits = 0;
    for (double v : replicas.p_N) {
      if (std::abs(v - replicas.mean) > t) ++hits;
    }
    const double freq = static_cast<double>(hits) / reps;
    const double bound = scale > 0.0 ? 2.0 * std::exp(-static_cast<double>(N) * t * t / scale) : 0.0;
    const double p = std::min(bound, 1.0);
    const double slack = 3.0 * std::sqrt(p * (1.0 - p) / reps);
    const bool violated = freq > bound + slack;
    if (violated) ++report.violations;
    report.rows.push_back({t, freq, bound, slack, violated});
  }
  return report;
}

ConcentrationReport concentration_check(const Correlator& c, double beta, std::size_t N, std::size_t reps,
                                        const std::vector<double>& t_grid, std::uint64_t seed) {
  const StateSpace cube = StateSpace::hypercube();
  return concentration_check(c, simulate_log_partition(c, beta, cube, N, reps, seed), cube.effective_size(),
                             N, t_grid);
}

GuerraGap guerra_gap(const ReplicaSet& replicas, double parisi_value) {
  const double gap = parisi_value - replicas.mean;
  return {replicas.mean, replicas.std_error, gap, kFiniteSizeSlack,
          gap >= -(3.0 * replicas.std_error + kFiniteSizeSlack)};
}

GuerraGap guerra_gap(const Correlator& c, double beta, std::size_t N, std::size_t reps, double parisi_value,
                     std::uint64_t seed) {
  return guerra_gap(simulate_log_partition(c, beta, StateSpace::hypercube(), N, reps, seed), parisi_value);
}

}  // namespace isofree
