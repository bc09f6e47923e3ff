#include "isofree/cascades.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isofree/error.hpp"
#include "isofree/numerics.hpp"
#include "isofree/parallel.hpp"
#include "isofree/parisi.hpp"
#include "isofree/rng.hpp"

namespace isofree {

namespace {

struct MeanSE {
  double mean;
  double se;
};

MeanSE mean_se(const std::vector<double>& v) {
  double sum = 0.0;
  for (double a : v) sum += a;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

void check_exponent(double x) {
  if (!(x > 0.0 && x < 1.0)) fail(ErrorCode::InvalidArgument, "exponent x must lie in (0, 1)");
}

// Log-atoms -log(Gamma_j)/x of a unit-rate arrival stream.
void log_atoms(RandomStream& rng, double x, std::size_t K, std::vector<double>& out) {
  out.resize(K);
  double arrival = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    arrival += rng.exponential();
    out[j] = -std::log(arrival) / x;
  }
}

}  // namespace

void validate_tree(const CascadeTree& tree) {
  if (tree.x.empty()) fail(ErrorCode::InvalidArgument, "cascade needs at least one level");
  for (std::size_t k = 0; k < tree.x.size(); ++k) {
    check_exponent(tree.x[k]);
    if (k > 0 && !(tree.x[k] > tree.x[k - 1])) fail(ErrorCode::InvalidArgument, "exponents must increase");
  }
  if (tree.K < 100) fail(ErrorCode::InvalidArgument, "K must be at least 100");
}

double ppp_tail_mass(double x, double a) { return x / (1.0 - x) * std::pow(a, 1.0 - x); }

PPPSample sample_ppp_atoms(double x, std::size_t K, std::uint64_t seed, std::uint64_t stream) {
  check_exponent(x);
  if (K == 0) fail(ErrorCode::InvalidArgument, "K must be positive");
  RandomStream rng(seed, stream);
  std::vector<double> logs;
  log_atoms(rng, x, K, logs);
  PPPSample out{std::vector<double>(K), 0.0};
  for (std::size_t j = 0; j < K; ++j) out.atoms[j] = std::exp(logs[j]);
  out.tail_mass = ppp_tail_mass(x, out.atoms.back());
  return out;
}

double ppp_tail_exponent(const std::vector<double>& atoms) {
  if (atoms.size() < 20) fail(ErrorCode::InvalidArgument, "need at least 20 atoms");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, count = 0.0;
  for (std::size_t j = 10; j <= atoms.size(); ++j) {
    const double lx = std::log(atoms[j - 1]);
    const double ly = std::log(static_cast<double>(j));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    count += 1.0;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

std::vector<std::size_t> RPCSample::path(std::size_t leaf) const {
  std::vector<std::size_t> p(depth);
  for (std::size_t k = depth; k-- > 0;) {
    p[k] = leaf % K;
    leaf /= K;
  }
  return p;
}

RPCSample sample_rpc(const CascadeTree& tree) {
  validate_tree(tree);
  const std::size_t n = tree.depth();
  double leaves = 1.0;
  for (std::size_t k = 0; k < n; ++k) leaves *= static_cast<double>(tree.K);
  if (leaves > static_cast<double>(tree.max_leaves)) {
    fail(ErrorCode::TreeTooLarge, "K^n = " + std::to_string(leaves) + " exceeds the leaf cap");
  }
  RandomStream rng(tree.seed, 0);
  std::vector<double> log_w{0.0};
  std::vector<double> logs;
  double relative_tail = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> next;
    next.reserve(log_w.size() * tree.K);
    double worst = 0.0;
    for (double parent : log_w) {
      log_atoms(rng, tree.x[k], tree.K, logs);
      const double retained = std::exp(numerics::log_sum_exp(logs));
      worst = std::max(worst, ppp_tail_mass(tree.x[k], std::exp(logs.back())) / retained);
      for (double l : logs) next.push_back(parent + l);
    }
    relative_tail += worst;
    log_w = std::move(next);
  }
  RPCSample out{n, tree.K, std::vector<double>(log_w.size()), relative_tail};
  for (std::size_t i = 0; i < log_w.size(); ++i) out.weights[i] = std::exp(log_w[i]);
  return out;
}

std::size_t lex_overlap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) fail(ErrorCode::DepthMismatch, "leaf paths have different depths");
  std::size_t k = 0;
  while (k < a.size() && a[k] == b[k]) ++k;
  return k;
}

CavitySample sample_cavity(const DiscreteOrderParameter& op, const Correlator& c, double M,
                           std::size_t N, const CascadeTree& tree, std::size_t samples) {
  validate_tree(tree);
  const std::size_t n = op.levels();
  if (tree.depth() != n) fail(ErrorCode::DepthMismatch, "tree depth differs from the order parameter");
  if (N == 0 || samples < 2) fail(ErrorCode::InvalidArgument, "need N >= 1 and samples >= 2");
  const std::vector<double> delta = level_variances(c, op, M);
  std::vector<double> m(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) m[k] = m[k - 1] + delta[k - 1];
  std::vector<double> sd(n + 1);
  for (std::size_t k = 0; k <= n; ++k) sd[k] = std::sqrt(delta[k]);

  CavitySample out;
  double leaves = 1.0;
  for (std::size_t k = 0; k < n; ++k) leaves *= static_cast<double>(tree.K);
  if (leaves * static_cast<double>(N) <= 1e6) {
    // One realization: Gaussians per node, accumulated down the tree.
    RandomStream rng(tree.seed, 1);
    const std::size_t L = static_cast<std::size_t>(leaves);
    out.fields.assign(N, std::vector<double>(L));
    for (std::size_t i = 0; i < N; ++i) {
      std::vector<double> partial{0.0};
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> next;
        next.reserve(partial.size() * tree.K);
        for (double p : partial) {
          for (std::size_t j = 0; j < tree.K; ++j) next.push_back(p + sd[k] * rng.normal());
        }
        partial = std::move(next);
      }
      for (std::size_t leaf = 0; leaf < L; ++leaf) out.fields[i][leaf] = partial[leaf] + sd[n] * rng.normal();
    }
  }

  // Probe pairs: leaf (0,..,0) against a leaf first differing at depth l + 1,
  // plus the leaf with itself. Node Gaussians along the two paths are shared
  // up to depth l.
  std::vector<std::vector<double>> products(n + 2, std::vector<double>(samples));
  std::vector<double> var_A(samples);
  const std::size_t chunk = 1024;
  const std::size_t chunks = (samples + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t b) {
    RandomStream rng(tree.seed, 1000 + b);
    std::vector<double> shared(n + 1), own(n + 1);
    for (std::size_t s = b * chunk; s < std::min(samples, (b + 1) * chunk); ++s) {
      for (std::size_t k = 0; k <= n; ++k) shared[k] = sd[k] * rng.normal();
      for (std::size_t k = 0; k <= n; ++k) own[k] = sd[k] * rng.normal();
      double base = 0.0;
      for (std::size_t k = 0; k <= n; ++k) base += shared[k];
      for (std::size_t l = 0; l <= n; ++l) {
        double other = 0.0;
        for (std::size_t k = 0; k < l; ++k) other += shared[k];
        for (std::size_t k = l; k <= n; ++k) other += own[k];
        products[l][s] = base * other;
      }
      products[n + 1][s] = base * base;
      double A = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        double a = 0.0;
        for (std::size_t k = 0; k <= n; ++k) a += sd[k] * rng.normal();
        A += a;
      }
      A /= std::sqrt(static_cast<double>(N));
      var_A[s] = A * A;
    }
  });
  for (std::size_t l = 0; l <= n; ++l) {
    const MeanSE est = mean_se(products[l]);
    out.report.levels.push_back({l, m[l], est.mean, est.se});
  }
  const MeanSE same = mean_se(products[n + 1]);
  out.report.levels.push_back({n + 1, M, same.mean, same.se});
  const MeanSE a_est = mean_se(var_A);
  out.report.var_A = a_est.mean;
  out.report.var_A_stderr = a_est.se;
  out.report.var_a_target = M;
  return out;
}

IdentityCheck check_averaging_identity(double x, double sigma, std::size_t K, std::size_t reps,
                                       std::uint64_t seed) {
  check_exponent(x);
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be nonnegative");
  if (K == 0 || reps < 2) fail(ErrorCode::InvalidArgument, "need K >= 1 and reps >= 2");
  std::vector<double> diff(reps), trunc(reps);
  parallel_for(reps, [&](std::size_t rep) {
    RandomStream rng(seed, rep);
    std::vector<double> logs, tilted(K);
    log_atoms(rng, x, K, logs);
    for (std::size_t j = 0; j < K; ++j) tilted[j] = logs[j] + sigma * rng.normal();
    const double plain = numerics::log_sum_exp(logs);
    const double shifted = numerics::log_sum_exp(tilted);
    diff[rep] = shifted - plain;
    const double tail = ppp_tail_mass(x, std::exp(logs.back()));
    trunc[rep] = tail * std::exp(0.5 * sigma * sigma - shifted) + tail * std::exp(-plain);
  });
  const MeanSE est = mean_se(diff);
  const MeanSE t = mean_se(trunc);
  IdentityCheck out{est.mean, 0.5 * x * sigma * sigma, est.se, t.mean};
  if (out.truncation > 3.0 * out.std_error) {
    fail(ErrorCode::TruncationDominates, "truncation bound exceeds 3 standard errors");
  }
  return out;
}

IdentityCheck check_nested_identity(double x1, double x2, double sigma1, double sigma2, std::size_t K,
                                    std::size_t reps, std::uint64_t seed) {
  check_exponent(x1);
  check_exponent(x2);
  if (!(x1 < x2)) fail(ErrorCode::InvalidArgument, "exponents must increase");
  if (K == 0 || reps < 2) fail(ErrorCode::InvalidArgument, "need K >= 1 and reps >= 2");
  std::vector<double> diff(reps), trunc(reps);
  parallel_for(reps, [&](std::size_t rep) {
    RandomStream rng(seed, rep);
    std::vector<double> top, low, plain(K), tilted(K), plain_low(K), tilted_low(K);
    log_atoms(rng, x1, K, top);
    double worst = ppp_tail_mass(x1, std::exp(top.back())) / std::exp(numerics::log_sum_exp(top));
    for (std::size_t a = 0; a < K; ++a) {
      log_atoms(rng, x2, K, low);
      const double g1 = sigma1 * rng.normal();
      for (std::size_t b = 0; b < K; ++b) {
        plain_low[b] = low[b];
        tilted_low[b] = low[b] + sigma2 * rng.normal();
      }
      const double lp = numerics::log_sum_exp(plain_low);
      worst = std::max(worst, ppp_tail_mass(x2, std::exp(low.back())) / std::exp(lp));
      plain[a] = top[a] + lp;
      tilted[a] = top[a] + g1 + numerics::log_sum_exp(tilted_low);
    }
    diff[rep] = numerics::log_sum_exp(tilted) - numerics::log_sum_exp(plain);
    trunc[rep] = worst;
  });
  const MeanSE est = mean_se(diff);
  const MeanSE t = mean_se(trunc);
  return {est.mean, 0.5 * x1 * sigma1 * sigma1 + 0.5 * x2 * sigma2 * sigma2, est.se, t.mean};
}

}  // namespace isofree
