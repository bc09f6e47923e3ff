#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"

namespace isofree {

// Truncated Ruelle cascade: n levels with exponents x, K atoms per branch.
struct CascadeTree {
  std::vector<double> x;
  std::size_t K = 100;
  std::uint64_t seed = 0;
  std::size_t max_leaves = 1000000;

  std::size_t depth() const { return x.size(); }
};

// Throws InvalidArgument unless 0 < x_1 < ... < x_n < 1 and K >= 100.
void validate_tree(const CascadeTree& tree);

struct PPPSample {
  std::vector<double> atoms;  // strictly decreasing
  // Expected total of the discarded atoms below the smallest one kept.
  double tail_mass;
};

// The K largest atoms of a Poisson process with intensity x t^{-x-1}.
PPPSample sample_ppp_atoms(double x, std::size_t K, std::uint64_t seed, std::uint64_t stream = 0);

// Least-squares slope of log #{atoms > u} against log u over the atoms
// ranked 10..K; close to -x for a PPP(x) sample.
double ppp_tail_exponent(const std::vector<double>& atoms);

// Expected sum of atoms below level a: x/(1-x) a^{1-x}.
double ppp_tail_mass(double x, double a);

struct RPCSample {
  std::size_t depth;
  std::size_t K;
  // Leaf weights in lexicographic order; leaf index digits base K give the path.
  std::vector<double> weights;
  // Expected discarded mass relative to the retained total.
  double relative_tail;

  std::vector<std::size_t> path(std::size_t leaf) const;
};

// Throws TreeTooLarge when K^n exceeds tree.max_leaves.
RPCSample sample_rpc(const CascadeTree& tree);

// Depth of the deepest common ancestor. Throws DepthMismatch.
std::size_t lex_overlap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

struct LevelCovariance {
  std::size_t level;  // lexicographic overlap, n + 1 denotes the same leaf
  double target;
  double estimate;
  double std_error;
};

struct CavityReport {
  std::vector<LevelCovariance> levels;
  // Var A(u, alpha) for the all-ones point against Var a(alpha).
  double var_A;
  double var_A_stderr;
  double var_a_target;
};

struct CavitySample {
  // fields[i][leaf] for one realization; empty when N K^n exceeds the cap.
  std::vector<std::vector<double>> fields;
  CavityReport report;
};

// a(alpha) = sum_k sqrt(m_k - m_{k-1}) g^(k)_{[alpha]_k} + sqrt(M - m_n) g^(n+1)_alpha
// with m_0 = 0, i.i.d. across spins. Covariance at overlap l targets m_l.
CavitySample sample_cavity(const DiscreteOrderParameter& op, const Correlator& c, double M,
                           std::size_t N, const CascadeTree& tree, std::size_t samples);

struct IdentityCheck {
  double lhs;
  double rhs;
  double std_error;
  double truncation;  // bound on the bias from discarded atoms
};

// E log sum v_j e^{g_j} - E log sum v_j against x sigma^2 / 2.
// Throws TruncationDominates when the truncation bound exceeds 3 stderr.
IdentityCheck check_averaging_identity(double x, double sigma, std::size_t K, std::size_t reps,
                                       std::uint64_t seed);

// Two-level version with psi = sigma1 g_{alpha_1} + sigma2 g_{alpha}; the
// recursion gives x1 sigma1^2/2 + x2 sigma2^2/2.
IdentityCheck check_nested_identity(double x1, double x2, double sigma1, double sigma2, std::size_t K,
                                    std::size_t reps, std::uint64_t seed);

}  // namespace isofree
