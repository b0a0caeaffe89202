#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fpld/multi_index.hpp"
#include "fpld/rng.hpp"

namespace fpld {

enum class PriorKind {
  gaussian_tensor,           ///< X = vec(v^{(x)r}), v_i ~ N(0,1)
  sparse_rademacher_tensor,  ///< X = vec(v^{(x)r}), v_i ~ Rad(k/n)
  sparse_clustering,         ///< X = xi mu^T, xi_i = +-1, mu_j = b_j g_j, b_j ~ Ber(s/p)
  truncated_sparse_tensor3,  ///< X = vec(v^{(x)3}), v = u unless ||u||_0 outside [ceil(k/2), 2k]
  discrete_atoms,            ///< explicit finite support in the flat space
};

/// A GAM prior. Construct through the named factories, which validate.
struct PriorModel {
  PriorKind kind = PriorKind::gaussian_tensor;
  long n = 1;
  long k = 1;
  int r = 1;
  long p = 1;
  long s = 1;
  double delta = 1.0;
  std::vector<std::vector<double>> atoms;
  std::vector<double> probs;

  static PriorModel gaussian_tensor(long n, int r);
  static PriorModel sparse_rademacher_tensor(long n, long k, int r);
  static PriorModel sparse_clustering(long n, long p, long s, double delta);
  static PriorModel truncated_sparse_tensor3(long n, long k);
  static PriorModel discrete_atoms(std::vector<std::vector<double>> atoms, std::vector<double> probs);

  void validate() const;
  /// Flattened signal dimension N.
  std::size_t ambient_dim() const;
  /// Tensor order of the flat signal in terms of the latent vector (1 for
  /// clustering and discrete priors).
  int order() const;
  bool is_finite_support() const;
  /// Human readable id, e.g. "sparse_rademacher_tensor(n=50,k=7,r=1)".
  std::string id() const;
  /// SNR implied by the clustering parametrization, delta / s.
  double clustering_snr() const { return delta / static_cast<double>(s); }
  /// Lower/upper support-size band of the truncated model.
  long band_lo() const { return (k + 1) / 2; }
  long band_hi() const { return 2 * k; }
};

/// Latent generating object: v for tensor priors, (xi, mu) for clustering,
/// the atom itself for discrete priors.
struct Latent {
  std::vector<double> v;
  std::vector<double> xi;
  std::vector<double> mu;
  long atom = -1;
};

struct SignalSample {
  std::vector<double> flat;
  Latent latent;
};

struct GamInstance {
  PriorModel prior;
  double snr = 1.0;

  GamInstance() = default;
  GamInstance(PriorModel prior, double snr);
  std::size_t ambient_dim() const { return prior.ambient_dim(); }
};

Latent sample_latent(const PriorModel& prior, Rng& rng);
/// Flattening of the latent object (row-major tensor / outer product).
std::vector<double> flatten(const PriorModel& prior, const Latent& latent);
/// Entry of the tensor form at a multi-position (length r, or (i, j) for
/// clustering), computed from the latent directly.
double tensor_entry(const PriorModel& prior, const Latent& latent, const std::vector<long>& pos);
/// Inverse of the row-major flattening index.
std::vector<long> unflatten_index(const PriorModel& prior, std::size_t flat_index);

SignalSample sample_signal(const PriorModel& prior, Rng& rng);

struct Observation {
  SignalSample signal;
  std::vector<double> y;
};
Observation sample_observation(const GamInstance& gam, Rng& rng);

/// <X, X'> from two latent objects without materializing the flat vectors.
double latent_overlap(const PriorModel& prior, const Latent& a, const Latent& b);

struct MomentValue {
  double value = 0.0;
  bool exact = true;
};

inline constexpr int kDefaultMomentCap = 12;

/// E[X^alpha]. Exact for all kinds except truncated_sparse_tensor3, where a
/// fixed-seed Monte-Carlo estimate is returned with exact = false.
MomentValue moment(const PriorModel& prior, const MultiIndex& alpha, int degree_cap = kDefaultMomentCap);

/// Latent exponent vector that E[X^alpha] factorizes over (length n for
/// tensors, n + p for clustering).
std::vector<int> latent_exponents(const PriorModel& prior, const MultiIndex& alpha);

/// E[v^e] of one latent coordinate (tensor priors) or one mu coordinate
/// (clustering).
double latent_marginal_moment(const PriorModel& prior, int e);

/// E||X||^2 and ||E X||^2.
double second_moment_norm(const PriorModel& prior);
double mean_norm_sq(const PriorModel& prior);
/// E||X||^2 - ||E X||^2.
double trivial_mmse(const PriorModel& prior);

/// P(||u||_0 outside the truncation band) for the truncated model.
double truncation_probability(long n, long k);

/// JSON round trip: {"kind": ..., "params": {...}}. Errors carry a JSON pointer.
PriorModel prior_from_json(const std::string& text);
std::string prior_to_json(const PriorModel& prior);

std::string to_string(PriorKind kind);

}  // namespace fpld
