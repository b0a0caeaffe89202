#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fpld/multi_index.hpp"
#include "fpld/priors.hpp"

namespace fpld {

/// Memoizing moment oracle alpha -> E[X^alpha].
class MomentOracle {
public:
  using Fn = std::function<double(const MultiIndex&)>;
  /// Maps alpha to a cache key; equal keys must have equal moments.
  using KeyFn = std::function<std::vector<int>(const MultiIndex&)>;

  MomentOracle(std::size_t dim, int max_degree, bool exact, Fn fn, KeyFn key = {});

  double operator()(const MultiIndex& alpha) const;
  /// E[prod_{i in ids} X_i] for a multiset of coordinate ids.
  double of_multiset(const std::vector<std::size_t>& ids) const;

  std::size_t dim() const { return dim_; }
  int max_degree() const { return max_degree_; }
  bool exact() const { return exact_; }

private:
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& k) const noexcept;
  };
  std::size_t dim_;
  int max_degree_;
  bool exact_;
  Fn fn_;
  KeyFn key_;
  std::shared_ptr<std::mutex> mu_;
  std::shared_ptr<std::unordered_map<std::vector<int>, double, KeyHash>> cache_;
};

/// Oracle backed by moment(); memo keyed on canonicalized latent exponents.
MomentOracle prior_moment_oracle(const PriorModel& prior, int max_degree = kDefaultMomentCap);
/// Oracle of a single scalar variable from its raw moments m(j) = E[X^j].
MomentOracle scalar_moment_oracle(std::function<double(int)> raw_moment, int max_degree);
/// Oracle of the coordinate products X_i X_i' of two independent copies.
MomentOracle pair_product_oracle(const MomentOracle& base);

inline constexpr int kMaxPartitionVars = 10;

/// Joint cumulant of X_{vars[0]}, ..., X_{vars[m-1]} by the set-partition formula.
double cumulant_partition(const MomentOracle& oracle, const std::vector<std::size_t>& vars);
/// Same cumulant by the first-element recursion, memoized over submasks.
double cumulant_recursive(const MomentOracle& oracle, const std::vector<std::size_t>& vars);
/// kappa_alpha = kappa of the multiset of alpha.
double cumulant_of(const MomentOracle& oracle, const MultiIndex& alpha);

struct DiagonalSliceResult {
  double lhs = 0.0;  ///< kappa_m(sum X_i) / m!
  double rhs = 0.0;  ///< sum_{|gamma| = m} kappa_gamma / gamma!
  double residual = 0.0;
};
DiagonalSliceResult diagonal_slice_check(const MomentOracle& oracle, int m, std::size_t N);

/// kappa_alpha of (X_i X_i')_i for an independent copy X'.
double ktilde(const MomentOracle& oracle, const MultiIndex& alpha);
/// The same quantity from the pair-partition expansion: sum over pairs
/// (pi, sigma) of partitions with connected join of prod kappa_pi prod kappa_sigma.
double ktilde_pair_partition(const MomentOracle& oracle, const MultiIndex& alpha);

struct CumulantTable {
  std::vector<MultiIndex> alphas;
  std::vector<double> kappa;
  std::string provenance;  ///< "partition" or "recursion"
};
CumulantTable build_cumulant_table(const MomentOracle& oracle, int max_degree, bool use_recursion = false);

struct SwBound {
  double total = 0.0;
  std::vector<double> by_degree;  ///< contribution of |alpha| = d
  std::size_t terms = 0;
};
/// sum_i sum_{|alpha| <= D} lambda^{|alpha|} kappa(X_i, X_alpha)^2 / alpha!.
SwBound sw_corr_upper_bound(const PriorModel& prior, double lambda, int D, std::size_t budget = 10000000);
SwBound sw_corr_upper_bound(const MomentOracle& oracle, double lambda, int D, std::size_t budget = 10000000);

struct NonnegReport {
  double min_kappa = 0.0;
  MultiIndex argmin;
  std::size_t coverage = 0;         ///< number of alpha checked
  bool nonneg_cumulants = false;    ///< min_kappa >= -tol
  bool nonneg_moments = false;      ///< latent E v^j >= 0, j <= 2D
  double rho_fit = 0.0;             ///< max E v^k E v^t / E v^{k+t}
  bool supermultiplicative = false; ///< rho_fit <= rho_max
  std::vector<double> latent_cumulants;  ///< kappa_j(v), j = 1..D
};
NonnegReport check_low_order_nonneg(const MomentOracle& joint, const std::function<double(int)>& latent_moment, int D,
                                    double rho_max = 1.0, double tol = 1e-9);
NonnegReport check_low_order_nonneg(const PriorModel& prior, int D, double rho_max = 1.0, double tol = 1e-9);

}  // namespace fpld
