#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"

namespace isofree {

using Point = std::vector<double>;

struct ExactField {
  std::vector<Point> points;
  std::vector<double> values;  // X(u) aligned with points
  double ridge;
};

struct SeriesField {
  std::size_t N;
  double r;
  std::vector<double> gamma;  // gamma_0 .. gamma_pmax
  double g0;
  // couplings[p - 1] holds N^p i.i.d. standard normals, row-major in (i_1..i_p).
  std::vector<std::vector<double>> couplings;
  double tail_bound;

  // X(u) = sqrt(gamma_0) g0 + sum_p sqrt(gamma_p) N^{-p/2} sum g_{i..} u_{i_1}..u_{i_p}.
  double value(const Point& u) const;
};

using FieldRealization = std::variant<ExactField, SeriesField>;

constexpr std::size_t kMaxExactPoints = std::size_t{1} << 13;

// Covariance of X at two points in R^N.
double field_covariance(const Correlator& c, const Point& u, const Point& v);

// Cholesky factor of the covariance of one point set, reusable across draws.
// Ridge escalates up to 1e-8 (relative to the largest variance); a ridge above
// 1e-10 is reported through warning().
class ExactSampler {
 public:
  ExactSampler(const Correlator& c, std::vector<Point> points);  // NotPSD, TooManyPoints

  ExactField draw(std::uint64_t seed, std::uint64_t stream) const;
  const std::vector<Point>& points() const { return points_; }
  double ridge() const { return ridge_; }
  const std::string& warning() const { return warning_; }

 private:
  std::vector<Point> points_;
  Eigen::MatrixXd factor_;
  double ridge_ = 0.0;
  std::string warning_;
};

ExactField sample_field_exact(const Correlator& c, std::vector<Point> points, std::uint64_t seed);

// Truncated overlap-series realization on the sphere |u|^2 = rN.
// Throws TailTooLarge when the series tail bound exceeds epsilon and
// MemoryCap when sum_p N^p exceeds max_couplings.
SeriesField sample_field_series(const Correlator& c, double r, std::size_t N, int p_max,
                                std::uint64_t seed, double epsilon = 1e-2,
                                std::size_t max_couplings = std::size_t{1} << 25);

// Every configuration of a product space in base-(#atoms) digit order,
// coordinate i being digit i. Throws EnumerationTooLarge past the size caps.
std::vector<Point> enumerate_configurations(const StateSpace& space, std::size_t N);

// (1/N) log sum_u mu_N(u) exp(beta sqrt(N) X(u)). Exact fields sum over their
// point list; series fields enumerate the product space (Gray-code order on
// two-atom spaces when gray_code is set). Throws EnumerationTooLarge.
double log_partition(const FieldRealization& field, double beta, const StateSpace& space, std::size_t N,
                     bool gray_code = true);

struct ReplicaSet {
  std::vector<double> p_N;
  double mean;
  double std_error;
  std::string warning;
};

// Exact-route replicas of p_N over the full enumeration of the space;
// replica i uses stream i of seed.
ReplicaSet simulate_log_partition(const Correlator& c, double beta, const StateSpace& space,
                                  std::size_t N, std::size_t reps, std::uint64_t seed);

struct TailRow {
  double t;
  double frequency;
  double bound;
  double slack;  // 3 binomial standard errors
  bool violated;
};

struct ConcentrationReport {
  double mean;
  std::vector<TailRow> rows;
  std::size_t violations;
};

ConcentrationReport concentration_check(const Correlator& c, const ReplicaSet& replicas, double d,
                                        std::size_t N, const std::vector<double>& t_grid);
ConcentrationReport concentration_check(const Correlator& c, double beta, std::size_t N, std::size_t reps,
                                        const std::vector<double>& t_grid, std::uint64_t seed);

struct GuerraGap {
  double mc_mean;
  double std_error;
  double gap;    // parisi_value - mc_mean
  double slack;  // finite-size slack
  bool holds;    // gap >= -(3 stderr + slack)
};

constexpr double kFiniteSizeSlack = 0.05;

GuerraGap guerra_gap(const ReplicaSet& replicas, double parisi_value);
GuerraGap guerra_gap(const Correlator& c, double beta, std::size_t N, std::size_t reps, double parisi_value,
                     std::uint64_t seed);

}  // namespace isofree
