#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fpld/multi_index.hpp"
#include "fpld/priors.hpp"
#include "fpld/rng.hpp"

namespace fpld {

/// Monomials Y^alpha with |alpha| <= D over `dim` coordinates, graded-lex.
struct MonomialBasis {
  std::size_t dim = 0;
  int D = 0;
  std::vector<MultiIndex> alphas;

  static MonomialBasis make(std::size_t dim, int D);
  std::size_t size() const { return alphas.size(); }
};

/// E[(mu + Z)^e] for scalar mu.
double shifted_gaussian_moment_1d(double mu, int e);
/// prod_j E[(mu_j + Z_j)^{e_j}].
double shifted_gaussian_monomial_moment(const std::vector<double>& mu, const MultiIndex& e);

/// Explicit atoms (flat signals) with probabilities.
struct FiniteSupport {
  std::vector<std::vector<double>> atoms;
  std::vector<double> probs;
};

inline constexpr std::size_t kOracleMaxAtoms = 10000;
inline constexpr std::size_t kOracleMaxBasis = 2000;

/// Enumerates a finite-support prior; identical flat atoms are merged.
FiniteSupport enumerate_support(const PriorModel& prior, std::size_t max_atoms = kOracleMaxAtoms);

struct OracleOptions {
  std::size_t max_atoms = kOracleMaxAtoms;
  std::size_t max_basis = kOracleMaxBasis;
  bool keep_coefficients = false;
  /// Use Corr^2 = N * (one-coordinate Corr^2) when coordinates are i.i.d.
  bool allow_product_reduction = true;
};

struct OracleReport {
  std::size_t basis_size = 0;
  std::size_t num_atoms = 0;
  double cond_number = 0.0;  ///< max / min kept eigenvalue of the diagonally scaled Gram matrix
  double min_eigenvalue = 0.0;
  std::size_t rank = 0;
  std::vector<double> corr_sq_per_coord;
  double corr_sq_total = 0.0;
  double second_moment = 0.0;  ///< E||X||^2
  double mmse = 0.0;
  bool product_reduced = false;
  double lambda = 0.0;
  int D = 0;
  MonomialBasis basis;
  /// G^+ c^{(i)} per coordinate (filled when keep_coefficients is set).
  std::vector<std::vector<double>> coefficients;
};

/// Degree-D correlation and MMSE from atoms of the flat signal.
OracleReport exact_corr_and_mmse(const FiniteSupport& support, double lambda, int D,
                                 const OracleOptions& opts = {});
OracleReport exact_corr_and_mmse(const PriorModel& prior, double lambda, int D, const OracleOptions& opts = {});

/// Evaluates the fitted projection sum_alpha coef_alpha y^alpha per coordinate.
std::vector<double> evaluate_projection(const OracleReport& report, const std::vector<double>& y);

std::string oracle_report_json(const OracleReport& report);

using EstimatorFn = std::function<std::vector<double>(const std::vector<double>& y)>;

struct McCorr {
  double corr = 0.0;
  double stderr_ = 0.0;
  double inner_mean = 0.0;  ///< E<f(Y), X>
  double inner_se = 0.0;
  double norm_sq_mean = 0.0;  ///< E||f(Y)||^2
  double norm_sq_se = 0.0;
  std::size_t samples = 0;
};

/// E<f(Y), X> / sqrt(E||f(Y)||^2) by Monte Carlo; f must be safe to call
/// concurrently.
McCorr mc_corr_of_estimator(const GamInstance& gam, const EstimatorFn& f, std::size_t M, const Rng& rng);

}  // namespace fpld
