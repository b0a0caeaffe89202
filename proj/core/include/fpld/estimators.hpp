#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fpld/multi_index.hpp"
#include "fpld/priors.hpp"
#include "fpld/rng.hpp"

namespace fpld {

/// exp_{<=D}(x) = sum_{k<=D} x^k / k!, ascending compensated summation.
double truncated_exp(double x, int D);

struct TruncExpValue {
  double value = 0.0;
  bool flagged = false;  ///< |x| > 700: terms formed in log space
};
TruncExpValue truncated_exp_checked(double x, int D);

/// Probabilists' Hermite polynomials by the three-term recurrence.
class HermiteEvaluator {
public:
  explicit HermiteEvaluator(int max_degree);
  /// h_0(z), ..., h_max(z) into the internal workspace.
  const std::vector<double>& table(double z);
  double operator()(int k, double z);
  int max_degree() const { return max_degree_; }

private:
  int max_degree_;
  std::vector<double> work_;
};

double hermite_he(int k, double z);
/// H_alpha(y) = prod_j h_{alpha_j}(y_j).
double hermite(const MultiIndex& alpha, const std::vector<double>& y);

/// W(y | x) = sum_{|alpha| <= D} x^alpha H_alpha(y) / alpha!, summed over
/// alpha supported on supp(x) via a degree-truncated product of per-coordinate
/// series.
double weight_w(const std::vector<double>& y, const std::vector<double>& x, int D);
/// Same value by explicit multi-index enumeration over supp(x).
double weight_w_enumerated(const std::vector<double>& y, const std::vector<double>& x, int D,
                           std::size_t budget = 5000000);

struct ReferenceSet {
  std::vector<std::vector<double>> X;
  std::uint64_t seed = 0;
};
ReferenceSet make_reference_set(const PriorModel& prior, std::size_t M, std::uint64_t seed);

inline constexpr std::size_t kDefaultReferenceSize = 2048;

/// p(y) = (1/M) sum_k W(y | sqrt(lambda) X_k) sqrt(lambda) X_k.
std::vector<double> materialized_estimator(const GamInstance& gam, const ReferenceSet& refset,
                                           const std::vector<double>& y, int D);

struct CorrBoundEstimate {
  double numerator = 0.0;  ///< E[A exp_{<=D}(lambda A)]
  double se_num = 0.0;
  double denominator = 0.0;  ///< E[S exp_{<=3D}(lambda S)]
  double se_den = 0.0;
  double ratio = 0.0;  ///< numerator / (2 sqrt(denominator)), lower bound on Corr
  double se_ratio = 0.0;
  double ratio_jackknife = 0.0;
  double se_jackknife = 0.0;
  double lower_sq = 0.0;     ///< max(ratio, 0)^2
  double se_lower_sq = 0.0;  ///< 2 max(ratio, 0) se_ratio
  int D = 0;
  double lambda = 0.0;
  std::size_t m_num = 0, m_den = 0;
  bool flagged = false;  ///< some |lambda A| > 700 or nonpositive denominator
  bool has_ratio = false;
};

/// Overlap-only lower bound on the degree-D correlation.
CorrBoundEstimate corr_lower_bound_overlap(const PriorModel& prior, double lambda, int D, std::size_t M_ov,
                                           const Rng& rng);

/// Running envelope of lower bounds over an ascending lambda grid. Corr is
/// nondecreasing in lambda, so the bound at lambda' <= lambda also bounds
/// Corr(lambda). Each entry takes the earlier estimate with the largest
/// lower_sq - 3 se_lower_sq.
struct MonotoneLowerBound {
  double lambda = 0.0;
  double lower_sq = 0.0;
  double se_lower_sq = 0.0;
  double source_lambda = 0.0;
};
std::vector<MonotoneLowerBound> monotone_envelope(const std::vector<CorrBoundEstimate>& ascending);

struct ExpTruncationGap {
  double gap = 0.0;         ///< |E[V exp_{<=D}(V)] - E[V e^V 1{|V| <= q}]|
  double gap_stderr = 0.0;
  double q = 0.0;           ///< q(C_t D) of |V|
  bool q_saturated = false;
  double remainder_term = 0.0;  ///< e^q ||V||_{D+2}^{D+2} / (D+1)!
  double tail_term = 0.0;       ///< e^{-C_t D/2} sum_k ||V||_{2k+2}^{k+1} / k!
  double bound = 0.0;
  bool holds = false;  ///< gap <= bound + 3 stderr
};

/// Monte-Carlo truncation gap for V = scale * samples with the analytic bound
/// from sample L_p norms, or from `lp_norm` when given.
ExpTruncationGap exp_truncation_gap(const std::vector<double>& samples, double scale, int D, double C_t,
                                    const std::function<double(double)>& lp_norm = {});

}  // namespace fpld
