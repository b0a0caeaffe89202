#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "fpld/applications.hpp"
#include "fpld/error.hpp"
#include "fpld/oracle.hpp"
#include "fpld/priors.hpp"
#include "fpld/rng.hpp"

using namespace fpld;

namespace {

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const int steps = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade));
  for (int i = 0; i <= steps; ++i) g.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
  return g;
}

}  // namespace

TEST(DiagThreshold, Examples) {
  EXPECT_EQ(diag_threshold({5.0}, 2.0), std::vector<int>{1});
  EXPECT_EQ(diag_threshold({-3.0, 0.5, 4.0}, 2.0), (std::vector<int>{-1, 0, 1}));
  EXPECT_EQ(diag_threshold({2.0}, 2.0), std::vector<int>{1});
  EXPECT_EQ(diag_threshold({-2.0}, 2.0), std::vector<int>{-1});
  EXPECT_THROW(diag_threshold({1.0}, 0.0), ValidationError);
}

TEST(DiagThreshold, BoundFormula) {
  const double b = threshold_failure_bound(500, 10);
  EXPECT_NEAR(b, 2.0 / 250000.0 + 40.0 / 125000000.0 + 40.0 * std::pow(500.0, -27.0), 1e-20);
  EXPECT_NEAR(b, 8.32e-6, 1e-12);
}

TEST(DiagThreshold, NoSignalAlwaysFails) {
  const auto t = run_threshold_trials(50, 3, 0.0, 400, Rng(1));
  EXPECT_EQ(t.failures, t.trials);
  EXPECT_DOUBLE_EQ(t.failure_rate, 1.0);
  EXPECT_NEAR(t.tau, std::sqrt(6.0 * std::log(50.0)), 1e-15);
  EXPECT_FALSE(t.lambda_ge_2tau);
}

TEST(DiagThreshold, FailureRateNonincreasingInLambda) {
  std::size_t prev = 1000000;
  for (double l : {0.0, 2.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0}) {
    const auto t = run_threshold_trials(100, 5, l, 2000, Rng(2));
    EXPECT_LE(t.failures, prev) << l;
    prev = t.failures;
  }
}

TEST(DiagThreshold, WithinBoundAtTwiceTau) {
  const long n = 500, k = 10;
  const double lambda = 2.0 * std::sqrt(6.0 * std::log(500.0));
  const auto t = run_threshold_trials(n, k, lambda, 2000, Rng(3));
  EXPECT_TRUE(t.lambda_ge_2tau);
  EXPECT_TRUE(t.within_bound) << t.failure_rate << " vs " << t.bound;
  EXPECT_NEAR(t.stderr_, std::sqrt(t.failure_rate * (1.0 - t.failure_rate) / 2000.0), 1e-15);
}

TEST(DiagThreshold, CustomTauAndDeterminism) {
  const auto a = run_threshold_trials(60, 4, 3.0, 500, Rng(4), 1.5);
  const auto b = run_threshold_trials(60, 4, 3.0, 500, Rng(4), 1.5);
  EXPECT_DOUBLE_EQ(a.tau, 1.5);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_THROW(run_threshold_trials(60, 4, 3.0, 0, Rng(4)), ValidationError);
  EXPECT_THROW(run_threshold_trials(60, 4, -1.0, 10, Rng(4)), ValidationError);
}

TEST(Scaling, GaussianTensorBanded) {
  for (int r : {1, 2, 3}) {
    ScalingConfig c;
    c.model = ScalingModel::gaussian_tensor;
    c.r = r;
    const auto rep = quantile_scaling_experiment(c, Rng(5));
    EXPECT_EQ(rep.rows.size(), 10u);
    EXPECT_LT(rep.spread, 4.0) << r;
    for (const auto& row : rep.rows) {
      EXPECT_GT(row.ratio, 0.0);
      EXPECT_NEAR(row.ratio, row.q / row.scale, 1e-15);
    }
  }
}

TEST(Scaling, SparseModels) {
  ScalingConfig dense;
  dense.model = ScalingModel::sparse_dense;
  const auto d = quantile_scaling_experiment(dense, Rng(6));
  EXPECT_LT(d.spread, 4.0);

  ScalingConfig sparse;
  sparse.model = ScalingModel::sparse_sparse;
  sparse.beta = 0.3;
  const auto s = quantile_scaling_experiment(sparse, Rng(6));
  EXPECT_LT(s.spread, 4.0);
  for (const auto& row : s.rows) {
    const double logn = std::log(static_cast<double>(row.n));
    const double mult = row.D / logn;
    EXPECT_NEAR(mult, std::round(mult), 1e-12);
  }
}

TEST(Scaling, ClusteringBandedAndReproducible) {
  ScalingConfig c;
  c.model = ScalingModel::clustering;
  c.mc_samples = 100000;
  const auto a = quantile_scaling_experiment(c, Rng(7));
  const auto b = quantile_scaling_experiment(c, Rng(7));
  EXPECT_LT(a.spread, 4.0);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].q, b.rows[i].q);
}

TEST(Scaling, RejectsTinySizes) {
  ScalingConfig c;
  c.sizes = {1};
  EXPECT_THROW(quantile_scaling_experiment(c, Rng(8)), ValidationError);
}

TEST(Equivalence, SparseRademacherCrossingsAgree) {
  EquivalenceConfig c;
  c.prior = PriorModel::sparse_rademacher_tensor(200, 20, 1);
  c.D = 3;
  c.lambdas = geometric_grid(0.05, 50.0, 16);
  c.mc_samples = 4000;
  const auto rep = equivalence_sweep(c, Rng(9));
  ASSERT_FALSE(std::isnan(rep.lambda_star));
  ASSERT_FALSE(std::isnan(rep.lambda_dagger));
  EXPECT_LE(rep.factor, 8.0) << rep.lambda_star << " " << rep.lambda_dagger;
  EXPECT_EQ(rep.sandwich_violations, 0u);
  EXPECT_EQ(rep.rows.size(), c.lambdas.size());
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.fp_sign, row.lambda < rep.lambda_star ? 1 : -1);
    EXPECT_LE(row.oracle_sq, row.upper_sq * (1.0 + 1e-9) + 1e-12);
  }
  // oracle is continuous and crosses q(D) at lambda_dagger
  EXPECT_NEAR(exact_corr_and_mmse(c.prior, rep.lambda_dagger, c.D).corr_sq_total, rep.q_D, 1e-6);
}

TEST(Equivalence, VanishingSnrLimit) {
  EquivalenceConfig c;
  c.prior = PriorModel::sparse_rademacher_tensor(20, 3, 1);
  c.D = 2;
  c.lambdas = {1e-8, 1e-6};
  c.mc_samples = 2000;
  const auto rep = equivalence_sweep(c, Rng(10));
  for (const auto& row : rep.rows) {
    EXPECT_LT(row.oracle_sq, 1e-4);
    EXPECT_LT(row.upper_sq, 1e-4);
    EXPECT_LE(row.oracle_sq, rep.q_D);
    EXPECT_LE(row.lower_sq - 3.0 * row.lower_se, rep.q_D);
  }
}

TEST(Equivalence, LambdaStarTracksAlgorithmicScale) {
  // r = 1, k = n^0.75: lambda_ALG ~ sqrt(n) / k up to polylog factors.
  std::vector<double> normalized;
  for (long n : {256L, 4096L}) {
    const long k = std::lround(std::pow(static_cast<double>(n), 0.75));
    EquivalenceConfig c;
    c.prior = PriorModel::sparse_rademacher_tensor(n, k, 1);
    c.D = 2;
    c.lambdas = {1.0};
    c.lower = c.upper = c.oracle = false;
    const auto rep = equivalence_sweep(c, Rng(11));
    ASSERT_FALSE(std::isnan(rep.lambda_star));
    normalized.push_back(rep.lambda_star / (std::sqrt(static_cast<double>(n)) / static_cast<double>(k)));
  }
  const double f = std::max(normalized[0] / normalized[1], normalized[1] / normalized[0]);
  EXPECT_LT(f, 2.0) << normalized[0] << " " << normalized[1];
}

TEST(Equivalence, Errors) {
  EquivalenceConfig c;
  c.prior = PriorModel::sparse_rademacher_tensor(10, 2, 1);
  EXPECT_THROW(equivalence_sweep(c, Rng(12)), ValidationError);
  c.lambdas = {0.0};
  EXPECT_THROW(equivalence_sweep(c, Rng(12)), ValidationError);
  c.prior = PriorModel::sparse_clustering(10, 20, 3, 1.0);
  c.lambdas = {1.0};
  EXPECT_THROW(equivalence_sweep(c, Rng(12)), DomainError);
}

TEST(Counterexample, DiagonalCorrMatchesEnumeratedMarginals) {
  const long n = 5, k = 2;
  const auto prior = PriorModel::truncated_sparse_tensor3(n, k);
  const auto sup = enumerate_support(prior);
  const auto N = static_cast<std::size_t>(n);
  FiniteSupport diag;
  std::vector<std::map<double, double>> marg(N);
  for (std::size_t a = 0; a < sup.atoms.size(); ++a) {
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) {
      v[i] = sup.atoms[a][i * (N * N + N + 1)];
      marg[i][v[i]] += sup.probs[a];
    }
    diag.atoms.push_back(v);
    diag.probs.push_back(sup.probs[a]);
  }
  for (double l : {0.3, 1.0, 2.5})
    for (int D : {1, 2, 3}) {
      double ref = 0.0;
      for (const auto& m : marg) {
        FiniteSupport one;
        for (auto [x, p] : m) {
          one.atoms.push_back({x});
          one.probs.push_back(p);
        }
        ref += exact_corr_and_mmse(one, l, D).corr_sq_total;
      }
      const double got = truncated_diagonal_corr_sq(n, k, l, D);
      EXPECT_NEAR(got, ref, 1e-10) << l << " " << D;
      EXPECT_LE(got, exact_corr_and_mmse(diag, l, D).corr_sq_total + 1e-10);
    }
  EXPECT_THROW(truncated_diagonal_corr_sq(3, 4, 1.0, 1), ValidationError);
}

TEST(Counterexample, SmallConfigConsistency) {
  CounterexampleConfig c;
  c.n = 12;
  c.k = 3;
  c.amplitudes = {0.0, 1.0, 1.5};
  c.q_primes = {0, 1};
  c.q_test = 1;
  c.replicas = 24;
  const auto a = counterexample_experiment(c, Rng(13));
  const auto b = counterexample_experiment(c, Rng(13));
  ASSERT_EQ(a.rows.size(), 3u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& row = a.rows[i];
    EXPECT_DOUBLE_EQ(row.lambda, row.amplitude * row.amplitude);
    EXPECT_EQ(row.annealed_sign, row.lambda < a.lambda_star ? 1 : -1);
    ASSERT_EQ(row.quenched.size(), 2u);
    ASSERT_EQ(row.jensen_gap.size(), 2u);
    for (std::size_t j = 0; j < row.quenched.size(); ++j) {
      EXPECT_GE(row.jensen_gap[j], -3.0 * row.quenched[j].stderr_ - 1e-9);
      EXPECT_EQ(row.quenched[j].f_mean, b.rows[i].quenched[j].f_mean);
    }
    EXPECT_EQ(row.verdict, b.rows[i].verdict);
  }
  // zero amplitude: annealed is -log P(q), quenched is -E_v log P(q | v) >= it
  const auto& z = a.rows[0];
  for (std::size_t j = 0; j < z.quenched.size(); ++j) EXPECT_GT(z.quenched[j].stderr_, 0.0);
  EXPECT_EQ(a.found, b.found);
  EXPECT_FALSE(a.verdict.empty());
}

TEST(BoundReportTest, SandwichAndReproducible) {
  const auto p = PriorModel::sparse_rademacher_tensor(4, 2, 1);
  const auto a = bound_report(p, 0.8, 2, 20000, 99);
  const auto b = bound_report(p, 0.8, 2, 20000, 99);
  EXPECT_TRUE(a.sandwich_ok);
  EXPECT_FALSE(std::isnan(a.upper));
  EXPECT_FALSE(std::isnan(a.oracle));
  EXPECT_FALSE(std::isnan(a.lower_sq));
  EXPECT_LE(a.oracle, a.upper);
  EXPECT_EQ(a.lower_sq, b.lower_sq);
  EXPECT_EQ(a.seed, 99u);
}
