#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fpld/estimators.hpp"
#include "fpld/fp.hpp"
#include "fpld/oracle.hpp"
#include "fpld/priors.hpp"
#include "fpld/rng.hpp"

namespace fpld {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// v_i = sign(d_i) 1{|d_i| >= tau}.
std::vector<int> diag_threshold(const std::vector<double>& diagonal, double tau);

struct ThresholdTrial {
  long n = 0, k = 0;
  double lambda = 0.0;  ///< amplitude of the diagonal observations
  double tau = 0.0;
  std::size_t trials = 0, failures = 0;
  double failure_rate = 0.0;
  double stderr_ = 0.0;  ///< binomial standard error of the failure rate
  double bound = 0.0;    ///< 2 n^-2 + 4 k n^-3 + 4 k n^-27
  bool lambda_ge_2tau = false;
  bool within_bound = false;  ///< failure_rate <= bound + 3 stderr
};

double threshold_failure_bound(long n, long k);

/// Exact-recovery trials on d_i = lambda v_i + Z_iii with v from the truncated
/// model. tau defaults to sqrt(6 log n).
ThresholdTrial run_threshold_trials(long n, long k, double lambda, std::size_t trials, const Rng& rng,
                                    double tau = kNaN);

enum class ScalingModel { gaussian_tensor, sparse_dense, sparse_sparse, clustering };

struct ScalingConfig {
  ScalingModel model = ScalingModel::gaussian_tensor;
  std::vector<long> sizes;     ///< n per problem; defaults per model when empty
  std::vector<double> d_grid;  ///< D values; defaults per model when empty
  int r = 2;                   ///< tensor order (gaussian_tensor)
  double beta = kNaN;  ///< k = round(n^beta); defaults 0.7 (sparse_dense), 0.3 (sparse_sparse)
  std::size_t mc_samples = 1000000;  ///< clustering overlap draws
};

struct ScalingRow {
  std::string instance;
  long n = 0;
  double D = 0.0;
  double q = 0.0;
  double scale = 0.0;
  double ratio = 0.0;
  bool saturated = false;
};

struct ScalingReport {
  std::string model;
  std::string predicted;  ///< text form of the predicted scale
  std::vector<ScalingRow> rows;
  double min_ratio = 0.0, max_ratio = 0.0;
  double spread = 0.0;  ///< max_ratio / min_ratio
};

ScalingReport quantile_scaling_experiment(const ScalingConfig& config, const Rng& rng);
std::string to_string(ScalingModel m);

struct EquivalenceRow {
  double lambda = 0.0;
  int fp_sign = 0;
  double fp_derivative = 0.0;
  double lower_sq = kNaN, lower_se = kNaN;
  double upper_sq = kNaN;
  double oracle_sq = kNaN;
  double q_D = 0.0;
  double q_bench = 0.0;  ///< q(D log^2 n)
  bool sandwich_ok = true;
};

struct EquivalenceConfig {
  PriorModel prior;
  int D = 3;
  std::vector<double> lambdas;
  std::size_t mc_samples = 20000;
  bool lower = true;
  bool upper = true;
  bool oracle = true;
  std::size_t upper_budget = 1000000;
};

struct EquivalenceReport {
  std::string model;
  int D = 0;
  double q_D = 0.0;
  double q_bench = 0.0;
  double lambda_star = kNaN;     ///< FP-derivative sign flip at q(D)
  double lambda_dagger = kNaN;   ///< oracle Corr^2 = q(D)
  double lambda_lower = kNaN;    ///< first grid lambda with lower-bound Corr^2 >= q(D)
  double factor = kNaN;          ///< max(l*/l+, l+/l*)
  std::vector<EquivalenceRow> rows;
  std::size_t sandwich_violations = 0;
};

/// Sweeps lambda; lambda_star from the FP derivative at q(D), lambda_dagger by
/// bisection on the exact oracle when the prior has finite support.
EquivalenceReport equivalence_sweep(const EquivalenceConfig& config, const Rng& rng);

/// Exact 1-D degree-D Corr^2 sum over the diagonal entries v_i of the
/// truncated order-3 model observed at snr lambda (Y_iii = a v_i + Z_iii).
double truncated_diagonal_corr_sq(long n, long k, double lambda, int D);

struct CounterexampleConfig {
  long n = 20, k = 4;
  int D = 1;
  std::vector<double> amplitudes{1.25, 1.5};
  std::vector<long> q_primes{1, 2};
  long q_test = 1;  ///< q' at which the quenched margin is tested
  std::size_t replicas = 64;
  std::uint64_t budget = 100000000ULL;
};

struct CounterexampleRow {
  double amplitude = 0.0;
  double lambda = 0.0;  ///< amplitude^2
  double annealed_derivative = 0.0;
  int annealed_sign = 0;
  std::vector<double> annealed_diffs;  ///< F_ann(q'^3) - F_ann(0) per q'
  std::vector<QuenchedEstimate> quenched;
  std::vector<double> jensen_gap;  ///< quenched F - annealed F per q'
  double corr_diag = 0.0;
  bool annealed_easy = false;
  bool oracle_nontrivial = false;
  bool quenched_positive = false;
  std::string verdict;
};

struct CounterexampleReport {
  long n = 0, k = 0;
  int D = 0;
  double q_D = 0.0;
  double lambda_star = 0.0;  ///< annealed sign flip
  std::vector<CounterexampleRow> rows;
  bool found = false;
  double found_amplitude = kNaN;
  std::string verdict;
};

CounterexampleReport counterexample_experiment(const CounterexampleConfig& config, const Rng& rng);

/// Cumulant upper bound, overlap lower bound and exact oracle at one point.
struct BoundReport {
  std::string model;
  double lambda = 0.0;
  int D = 0;
  double upper = kNaN;
  double lower_sq = kNaN, lower_se = kNaN;
  double oracle = kNaN;
  std::uint64_t seed = 0;
  std::size_t mc_samples = 0;
  bool sandwich_ok = true;
};

BoundReport bound_report(const PriorModel& prior, double lambda, int D, std::size_t mc_samples, std::uint64_t seed,
                         std::size_t upper_budget = 1000000);

}  // namespace fpld
