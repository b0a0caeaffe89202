#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fpld/priors.hpp"
#include "fpld/rng.hpp"

namespace fpld {

enum class OverlapMode { exact_pmf, analytic_density, empirical };

/// Distribution of A = <X, X'> for independent prior draws.
///
/// exact_pmf: sorted atoms with log-probabilities.
/// analytic_density: Gaussian tensor overlap S^r with S = <v, v'>, v, v' in R^d;
///   densities are read as f_d evaluated at t = q^{1/r}.
/// empirical: sorted samples.
class OverlapDistribution {
public:
  static OverlapDistribution from_log_pmf(std::vector<double> atoms, std::vector<double> log_probs);
  static OverlapDistribution from_samples(std::vector<double> samples);
  static OverlapDistribution gaussian_tensor_analytic(long d, int r);

  OverlapMode mode() const { return mode_; }

  // exact_pmf
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& log_probs() const { return log_probs_; }
  /// log P(A = q); -inf when q is not an atom.
  double log_prob(double q) const;
  bool has_atom(double q) const;
  /// True when some atom mass fell below e^-745 and was flushed to zero.
  bool flushed() const { return flushed_; }

  // empirical
  const std::vector<double>& samples() const { return samples_; }
  /// |samples| ascending.
  const std::vector<double>& abs_sorted() const { return abs_sorted_; }

  // analytic_density
  long dimension() const { return d_; }
  int order() const { return r_; }
  /// log f_d(t) at t = sign(q)|q|^{1/r}.
  double log_density(double q) const;
  /// d/dq log f_d(t(q)) by chain rule.
  double log_density_derivative(double q) const;
  /// log P(|S| > y) under f_d.
  double log_abs_tail_latent(double y) const;

  /// |A| values in ascending order with log masses (exact_pmf), merged over sign.
  const std::vector<double>& abs_atoms() const { return abs_atoms_; }
  const std::vector<double>& abs_log_tail() const { return abs_log_tail_; }

private:
  OverlapMode mode_ = OverlapMode::exact_pmf;
  std::vector<double> atoms_, log_probs_;
  std::vector<double> abs_atoms_, abs_log_tail_;  // log P(|A| > abs_atoms_[j])
  std::vector<double> samples_, abs_sorted_;
  long d_ = 0;
  int r_ = 1;
  bool flushed_ = false;
};

struct QuantileResult {
  double value = 0.0;
  bool saturated = false;
};

/// q(D) = inf{y : P(|A| <= y) >= 1 - e^{-D}}.
QuantileResult quantile_detail(const OverlapDistribution& dist, double D);
double quantile(const OverlapDistribution& dist, double D);

/// Memoizing wrapper around quantile().
class QuantileFn {
public:
  explicit QuantileFn(std::shared_ptr<const OverlapDistribution> dist) : dist_(std::move(dist)) {}
  double operator()(double D) const;
  const OverlapDistribution& distribution() const { return *dist_; }

private:
  std::shared_ptr<const OverlapDistribution> dist_;
  mutable std::mutex mu_;
  mutable std::map<double, double> cache_;
};

/// Step a_n(q) > 0 with q + a_n(q) an atom.
struct SpeedFunction {
  std::function<double(double)> step;
  std::string name;
  double operator()(double q) const { return step(q); }
};

/// a_n(s^r) = (s+2)^r - s^r on the s-grid of a tensor overlap.
SpeedFunction tensor_speed(int r);
/// Gap to the nearest larger atom of an exact pmf.
SpeedFunction nearest_atom_speed(const OverlapDistribution& dist);

/// (log P(q + a) - log P(q)) / a with a = speed(q).
double discrete_log_pmf_diff(const OverlapDistribution& dist, double q_atom, const SpeedFunction& speed);

/// Exact overlap law of the sparse Rademacher tensor prior via the binomial
/// mixture over the number T of jointly nonzero coordinates.
OverlapDistribution exact_pmf_sparse_rademacher(long n, long k, int r);
/// log P(S = s) of the latent sum before mapping s -> s^r (atoms s).
OverlapDistribution exact_pmf_sparse_rademacher_latent(long n, long k);
/// Exact overlap law of the truncated order-3 model (atoms (v.v')^3).
OverlapDistribution exact_pmf_truncated(long n, long k);
/// Latent overlap v.v' of the truncated model (before cubing).
OverlapDistribution exact_pmf_truncated_latent(long n, long k);
/// Exact overlap law of a discrete_atoms prior (pairs of atoms).
OverlapDistribution exact_pmf_discrete(const PriorModel& prior);
/// Dispatches to the exact constructor for the prior kind.
OverlapDistribution exact_overlap(const PriorModel& prior);

/// One overlap draw using a distributionally exact low-dimensional
/// representation (binomial mixtures, chi-square differences).
double sample_overlap(const PriorModel& prior, Rng& rng);
/// M i.i.d. overlap draws, chunked over substreams; sorted.
OverlapDistribution empirical_overlap(const PriorModel& prior, std::size_t M, const Rng& rng);
/// Same law, computed from explicit pairs of latent draws.
OverlapDistribution empirical_overlap_latent(const PriorModel& prior, std::size_t M, const Rng& rng);

struct TripleOverlapSamples {
  std::vector<double> triple_sum;  ///< |<X',X''>| + |<X,X'>| + |<X,X''>|
  std::vector<double> pair;        ///< <X,X'> from the same triple
};
TripleOverlapSamples triple_overlap_samples(const PriorModel& prior, std::size_t M, const Rng& rng);

enum class DensityFamilyKind { gaussian_inner_product, clustering_product };

struct DensityFamily {
  DensityFamilyKind kind = DensityFamilyKind::gaussian_inner_product;
  long d = 1;  ///< gaussian_inner_product
  long n = 1, p = 1, s = 1;  ///< clustering_product
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 1;
};

struct DensityDerivative {
  double value = 0.0;
  double bandwidth = 0.0;  ///< kernel bandwidth (0 for analytic)
  double step = 0.0;       ///< finite-difference step (0 for analytic)
  double stderr_ = 0.0;    ///< Monte-Carlo error bar (0 for analytic)
};

/// d/dt log f(t) of the overlap density at t != 0.
DensityDerivative analytic_log_density_derivative(const DensityFamily& family, double point);

std::string to_string(OverlapMode m);

}  // namespace fpld
