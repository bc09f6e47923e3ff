#pragma once

#include <variant>
#include <vector>

#include "isofree/correlator.hpp"

namespace isofree {

// Atom u with a priori mass p of the single-coordinate measure.
struct SpinAtom {
  double value;
  double mass;
};

struct ProductSpace {
  std::vector<SpinAtom> atoms;
};

// Rotationally invariant ball |u| <= L sqrt(N) with density exp(h1 u - h2 u^2).
struct BallSpace {
  double radius;
  double h1;
  double h2;
};

class StateSpace {
 public:
  // Validates: at least two atoms, positive masses, 0 inside the open convex
  // hull of the support. Throws InvalidStateSpace.
  static StateSpace product(std::vector<SpinAtom> atoms);
  // Uniform probability on {-1, +1}.
  static StateSpace hypercube();
  static StateSpace ball(double radius, double h1, double h2);

  bool is_product() const { return std::holds_alternative<ProductSpace>(variant_); }
  const ProductSpace& as_product() const;  // throws BallVariantUnsupported
  const BallSpace& as_ball() const;

  // d = max u^2 for products, L^2 for the ball.
  double effective_size() const { return effective_size_; }
  // Smallest u^2 over the support (product only).
  double min_square() const;
  // log of the total a priori mass of one coordinate.
  double log_total_mass() const;
  // True when every atom has the same |u|, which pins the squared radius.
  bool single_norm() const;

 private:
  explicit StateSpace(std::variant<ProductSpace, BallSpace> v, double d)
      : variant_(std::move(v)), effective_size_(d) {}
  std::variant<ProductSpace, BallSpace> variant_;
  double effective_size_;
};

// Piecewise-constant order parameter: x = x_k on [q_k, q_{k+1}) with
// q_0 = 0, q_{n+1} = r, x_0 = 0.
class DiscreteOrderParameter {
 public:
  // Strict chain 0 < q_1 < ... < q_n < r and 0 < x_1 < ... < x_n < 1.
  static DiscreteOrderParameter validate(double r, std::vector<double> q, std::vector<double> x);
  // Non-strict variant admitting repeated q_k or x_k (refinements of a
  // coarser scheme); values must still lie in [0, r) and (0, 1).
  static DiscreteOrderParameter weak(double r, std::vector<double> q, std::vector<double> x);

  double r() const { return r_; }
  const std::vector<double>& q() const { return q_; }
  const std::vector<double>& x() const { return x_; }
  std::size_t levels() const { return q_.size(); }
  // q_k for k in [0, n+1] with the boundary conventions.
  double q_at(std::size_t k) const;
  double x_at(std::size_t k) const;

 private:
  DiscreteOrderParameter(double r, std::vector<double> q, std::vector<double> x)
      : r_(r), q_(std::move(q)), x_(std::move(x)) {}
  static DiscreteOrderParameter check(double r, std::vector<double> q, std::vector<double> x,
                                      bool strict);
  double r_;
  std::vector<double> q_;
  std::vector<double> x_;
};

// Affine asymptote of a boundary condition: g(y) -> slope*y + intercept.
struct Asymptote {
  double slope;
  double intercept;
  // Beyond this |y| the function matches the asymptote to ~1e-16 relative.
  double onset;
};

// g_lambda(y) = log sum_i p_i exp(beta u_i y + lambda u_i^2) on a product space.
class BoundaryCondition {
 public:
  BoundaryCondition(const StateSpace& space, double beta, double lambda);

  double operator()(double y) const;
  double derivative(double y) const;
  const Asymptote& right() const { return right_; }
  const Asymptote& left() const { return left_; }
  double beta() const { return beta_; }
  double lambda() const { return lambda_; }
  // Largest |beta u| over the support.
  double slope_bound() const { return slope_bound_; }
  // Slope spread beta (u_max - u_min), the scale of the kink region.
  double slope_span() const { return slope_span_; }

 private:
  struct Line {
    double slope;
    double intercept;
  };
  std::vector<Line> lines_;
  Asymptote right_{};
  Asymptote left_{};
  double beta_;
  double lambda_;
  double slope_bound_ = 0.0;
  double slope_span_ = 0.0;
};

double boundary_g(const StateSpace& space, double beta, double lambda, double y);

// sum_k x_k (theta(q_{k+1}) - theta(q_k)) with q_{n+1} = r.
double theta_stieltjes_sum(const DiscreteOrderParameter& op, const Correlator& c, double M);

}  // namespace isofree
