#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fpld/overlap.hpp"
#include "fpld/priors.hpp"
#include "fpld/rng.hpp"

namespace fpld {

/// F_ann,lambda(q) = -lambda q - log P(q) (pmf) or -lambda q - log f(q) (density).
double annealed_fp(const OverlapDistribution& dist, double lambda, double q);

struct FpDerivative {
  double q = 0.0;                       ///< q(D)
  double step = 0.0;                    ///< a_n(q) in discrete mode, 0 for densities
  double lambda_plus_derivative = 0.0;  ///< lambda + dF/dq (= -(d/dq) log P)
  double fp_derivative = 0.0;           ///< dF/dq or Delta F
  int sign = 0;                         ///< sign of fp_derivative: +1 hard, -1 easy
};

/// Evaluates the (discrete) FP derivative at q(D). A speed function is
/// required for exact pmfs.
FpDerivative fp_derivative_at_quantile(const OverlapDistribution& dist, double lambda, double D,
                                       const SpeedFunction* speed = nullptr);

struct FpPoint {
  double q = 0.0;
  double f_ann = 0.0;
  double derivative = 0.0;  ///< dF/dq or Delta F; NaN if q + a_n(q) is not an atom
  int sign = 0;             ///< sign of lambda + derivative
};

struct FpCurve {
  double lambda = 0.0;
  bool discrete = true;
  std::vector<FpPoint> points;
};

/// Curve over all atoms in [0, q(D_max)] (pmf) or 64 log-spaced points in
/// [q(1)/8, q(D_max)] (density), unless an explicit grid is given.
FpCurve fp_curve(const OverlapDistribution& dist, double lambda, double D_max,
                 const SpeedFunction* speed = nullptr, const std::vector<double>* grid = nullptr);

/// Order-3 noise tensor with i.i.d. standard normal entries, row-major.
struct NoiseTensor3 {
  long n = 0;
  std::vector<double> z;
  double at(long i, long j, long k) const { return z[static_cast<std::size_t>((i * n + j) * n + k)]; }
  /// <Z, vec(v^{(x)3})>
  double cubic_form(const std::vector<double>& v) const;
};
NoiseTensor3 sample_noise3(long n, Rng& rng);

/// Per-overlap log inner sums of the quenched potential for one (v, Z):
/// log sum over v' in the truncated support with <v,v'> = q' of
/// P(v') exp(a^2 q'^3 + a <Z, v'^{(x)3}> - a^2 ||v'||_0^3 / 2).
struct InnerSums {
  long min_overlap = 0;              ///< q' of log_sum[0]
  std::vector<double> log_sum;       ///< indexed by q' - min_overlap; -inf if empty
  std::uint64_t enumerated = 0;      ///< number of v' visited
};
InnerSums quenched_inner_log_sums(long n, long k, double amplitude, const std::vector<double>& v,
                                  const NoiseTensor3& Z, std::uint64_t budget = 100000000ULL);
/// Same enumeration shared across several amplitudes.
std::vector<InnerSums> quenched_inner_log_sums_multi(long n, long k, const std::vector<double>& amplitudes,
                                                    const std::vector<double>& v, const NoiseTensor3& Z,
                                                    std::uint64_t budget = 100000000ULL);

/// Number of v' in the truncated support (all signed supports of size in band).
std::uint64_t truncated_support_size(long n, long k);

struct QuenchedEstimate {
  double amplitude = 0.0;
  long q_prime = 0;
  double q = 0.0;             ///< (q')^3
  double f_mean = 0.0;        ///< MC estimate of F(q)
  double stderr_ = 0.0;
  double diff_mean = 0.0;     ///< F(q) - F(0), paired over replicas
  double diff_stderr = 0.0;
  std::size_t replicas = 0;
  std::uint64_t inner_size = 0;  ///< v' enumerated per replica
};

/// Quenched FP of the truncated model at amplitude a (Y = a X + Z): outer
/// Monte-Carlo over (v, Z) replicas, inner sum enumerated exactly. Returns one
/// estimate per requested q'.
std::vector<QuenchedEstimate> quenched_fp_mc(const PriorModel& prior, double amplitude,
                                             const std::vector<long>& q_primes, std::size_t replicas,
                                             const Rng& rng, std::uint64_t budget = 100000000ULL);
/// Several amplitudes on common (v, Z) replicas; indexed [amplitude][q'].
std::vector<std::vector<QuenchedEstimate>> quenched_fp_mc_multi(const PriorModel& prior,
                                                                const std::vector<double>& amplitudes,
                                                                const std::vector<long>& q_primes,
                                                                std::size_t replicas, const Rng& rng,
                                                                std::uint64_t budget = 100000000ULL);

struct GammaCurveEstimate {
  long q_prime = 0;
  long m = 0;
  double max_value = 0.0;  ///< -inf if the candidate set is empty
  std::uint64_t candidates = 0;
};

/// max of <vec(v'^{(x)3}), Z> over v' in {-1,0,1}^n with ||v'||_0 = m and
/// <v, v'> = q'.
GammaCurveEstimate gamma_max(const std::vector<double>& v, const NoiseTensor3& Z, long q_prime, long m,
                             std::uint64_t budget = 100000000ULL);

/// sqrt(m^3) sqrt(2 log C(n,m) - log(m log(n/m)) - A).
double gamma_zero_lower_bound(long n, long m, double A);

}  // namespace fpld
