#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "fpld/overlap.hpp"
#include "fpld/priors.hpp"
#include "fpld/specfun.hpp"

using namespace fpld;

namespace {

// All 3^n latent vectors of Rad(rho) coordinates with their probabilities.
void enumerate_rad(long n, double rho, const std::function<void(const std::vector<int>&, double)>& fn) {
  std::vector<int> v(static_cast<std::size_t>(n), -1);
  while (true) {
    double p = 1.0;
    for (int x : v) p *= x == 0 ? 1.0 - rho : 0.5 * rho;
    fn(v, p);
    std::size_t i = 0;
    while (i < v.size() && v[i] == 1) v[i++] = -1;
    if (i == v.size()) return;
    ++v[i];
  }
}

std::map<double, double> brute_sparse_rademacher(long n, long k, int r) {
  const double rho = static_cast<double>(k) / n;
  std::vector<std::pair<std::vector<int>, double>> all;
  enumerate_rad(n, rho, [&](const std::vector<int>& v, double p) { all.emplace_back(v, p); });
  std::map<double, double> pmf;
  for (const auto& [a, pa] : all)
    for (const auto& [b, pb] : all) {
      long s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
      pmf[std::pow(static_cast<double>(s), r)] += pa * pb;
    }
  return pmf;
}

std::map<double, double> brute_truncated_latent(long n, long k) {
  const double rho = static_cast<double>(k) / n;
  const long lo = (k + 1) / 2, hi = 2 * k;
  std::map<std::vector<int>, double> law;
  std::vector<int> ind(static_cast<std::size_t>(n), 0);
  for (long i = 0; i < k; ++i) ind[static_cast<std::size_t>(i)] = 1;
  enumerate_rad(n, rho, [&](const std::vector<int>& v, double p) {
    const long m = std::count_if(v.begin(), v.end(), [](int x) { return x != 0; });
    law[(m < lo || m > hi) ? ind : v] += p;
  });
  std::map<double, double> pmf;
  for (const auto& [a, pa] : law)
    for (const auto& [b, pb] : law) {
      long s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
      pmf[static_cast<double>(s)] += pa * pb;
    }
  return pmf;
}

void expect_matches(const OverlapDistribution& d, const std::map<double, double>& ref, double tol) {
  std::map<double, double> got;
  for (std::size_t i = 0; i < d.atoms().size(); ++i) got[d.atoms()[i]] += std::exp(d.log_probs()[i]);
  for (const auto& [q, p] : ref)
    if (p > 0) EXPECT_NEAR(got[q], p, tol) << "atom " << q;
  for (const auto& [q, p] : got) EXPECT_TRUE(ref.count(q) || p < tol) << "extra atom " << q;
}

double total_mass(const OverlapDistribution& d) {
  CompensatedSum s;
  for (double lp : d.log_probs()) s.add(std::exp(lp));
  return s.value();
}

}  // namespace

TEST(ExactPmf, SingleCoordinate) {
  // k = n: v, v' are uniform signs, so S = +-1 with probability 1/2 each
  const auto d = exact_pmf_sparse_rademacher(1, 1, 1);
  EXPECT_EQ(d.log_prob(0.0), kNegInf);
  EXPECT_NEAR(std::exp(d.log_prob(1.0)), 0.5, 1e-15);
  EXPECT_NEAR(std::exp(d.log_prob(-1.0)), 0.5, 1e-15);
  EXPECT_EQ(d.log_prob(2.0), kNegInf);
  // k/n = 1/2: P(S = 0) = 1 - 1/4, P(S = +-1) = 1/8
  const auto h = exact_pmf_sparse_rademacher(2, 1, 1);
  const auto h_ref = brute_sparse_rademacher(2, 1, 1);
  EXPECT_NEAR(std::exp(h.log_prob(0.0)), h_ref.at(0.0), 1e-15);
  EXPECT_FALSE(d.has_atom(0.5));
}

TEST(ExactPmf, MatchesBruteForce) {
  for (long n : {1, 2, 3, 4})
    for (long k = 1; k <= n; ++k)
      for (int r : {1, 2, 3}) {
        SCOPED_TRACE(testing::Message() << n << " " << k << " " << r);
        expect_matches(exact_pmf_sparse_rademacher(n, k, r), brute_sparse_rademacher(n, k, r), 1e-14);
      }
  const auto d = exact_pmf_sparse_rademacher(2, 2, 1);
  EXPECT_NEAR(std::exp(d.log_prob(2.0)), 0.25, 1e-15);
  EXPECT_NEAR(std::exp(d.log_prob(0.0)), 0.5, 1e-15);
}

TEST(ExactPmf, TruncatedMatchesBruteForce) {
  for (auto [n, k] : std::vector<std::pair<long, long>>{{4, 1}, {5, 2}, {6, 2}}) {
    SCOPED_TRACE(testing::Message() << n << " " << k);
    const auto ref = brute_truncated_latent(n, k);
    expect_matches(exact_pmf_truncated_latent(n, k), ref, 1e-12);
    std::map<double, double> cubed;
    for (const auto& [q, p] : ref) cubed[q * q * q] += p;
    expect_matches(exact_pmf_truncated(n, k), cubed, 1e-12);
  }
}

TEST(ExactPmf, DiscretePairs) {
  const auto prior = PriorModel::discrete_atoms({{1.0}, {0.0}}, {0.5, 0.5});
  const auto d = exact_pmf_discrete(prior);
  EXPECT_NEAR(std::exp(d.log_prob(1.0)), 0.25, 1e-15);
  EXPECT_NEAR(std::exp(d.log_prob(0.0)), 0.75, 1e-15);
}

TEST(ExactPmf, Normalization) {
  for (auto [n, k, r] : std::vector<std::tuple<long, long, int>>{{50, 7, 1}, {50, 7, 3}, {1000, 30, 3}, {10000, 100, 1}}) {
    const auto d = exact_pmf_sparse_rademacher(n, k, r);
    EXPECT_NEAR(total_mass(d), 1.0, 1e-12) << n;
    EXPECT_TRUE(std::is_sorted(d.atoms().begin(), d.atoms().end()));
  }
  EXPECT_NEAR(total_mass(exact_pmf_truncated(20, 4)), 1.0, 1e-12);
  EXPECT_NEAR(total_mass(exact_pmf_truncated(200, 10)), 1.0, 1e-12);
}

TEST(ExactPmf, LargeNUnderflowIsFlagged) {
  const auto d = exact_pmf_sparse_rademacher(10000, 10000, 1);
  EXPECT_TRUE(d.flushed());
  EXPECT_NEAR(total_mass(d), 1.0, 1e-12);
}

TEST(Quantile, ConstantAbsoluteValue) {
  const auto d = OverlapDistribution::from_log_pmf({-1.0, 1.0}, {std::log(0.5), std::log(0.5)});
  for (double D : {0.01, 1.0, 5.0, 30.0}) EXPECT_EQ(quantile(d, D), 1.0);
}

TEST(Quantile, MatchesCdfScan) {
  const auto d = exact_pmf_sparse_rademacher(50, 7, 1);
  for (double D : {0.5, 1.0, 3.0, 6.0}) {
    std::map<double, double> absmass;
    for (std::size_t i = 0; i < d.atoms().size(); ++i) absmass[std::fabs(d.atoms()[i])] += std::exp(d.log_probs()[i]);
    double cdf = 0.0, q = std::nan("");
    for (const auto& [a, p] : absmass) {
      cdf += p;
      if (cdf >= 1.0 - std::exp(-D)) {
        q = a;
        break;
      }
    }
    EXPECT_EQ(quantile(d, D), q) << D;
  }
}

TEST(Quantile, MonotoneInAllModes) {
  const auto exact = exact_pmf_sparse_rademacher(40, 6, 3);
  const auto analytic = OverlapDistribution::gaussian_tensor_analytic(30, 2);
  const auto emp = empirical_overlap(PriorModel::gaussian_tensor(20, 1), 20000, Rng(3));
  for (const auto* d : {&exact, &analytic, &emp}) {
    double prev = -1.0;
    for (double D = 0.05; D < 9.0; D *= 1.3) {
      const double q = quantile(*d, D);
      EXPECT_GE(q, prev) << to_string(d->mode()) << " " << D;
      prev = q;
    }
  }
}

TEST(Quantile, EmpiricalSaturation) {
  const auto emp = empirical_overlap(PriorModel::gaussian_tensor(5, 1), 1000, Rng(4));
  const auto r = quantile_detail(emp, 20.0);
  EXPECT_TRUE(r.saturated);
  EXPECT_EQ(r.value, emp.abs_sorted().back());
  EXPECT_FALSE(quantile_detail(emp, 1.0).saturated);
}

TEST(Quantile, AnalyticAgreesWithEmpirical) {
  const auto analytic = OverlapDistribution::gaussian_tensor_analytic(10, 1);
  const auto emp = empirical_overlap(PriorModel::gaussian_tensor(10, 1), 200000, Rng(5));
  for (double D : {0.5, 1.0, 2.0, 4.0}) EXPECT_NEAR(quantile(analytic, D) / quantile(emp, D), 1.0, 0.03) << D;
}

TEST(Quantile, GaussianTensorScalingWindow) {
  double lo = 1e9, hi = 0.0;
  for (long n : {50, 100, 200}) {
    const auto d = OverlapDistribution::gaussian_tensor_analytic(n, 2);
    for (double D = 1.0; D <= 20.0; D += 1.0) {
      const double ratio = std::sqrt(quantile(d, D)) / std::sqrt(n * D);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  EXPECT_GT(lo, 0.5);
  EXPECT_LT(hi, 2.0);
}

TEST(Quantile, MemoizedFunction) {
  const QuantileFn q(std::make_shared<const OverlapDistribution>(exact_pmf_sparse_rademacher(30, 5, 1)));
  EXPECT_EQ(q(2.0), quantile(q.distribution(), 2.0));
  EXPECT_EQ(q(2.0), q(2.0));
}

TEST(Quantile, ChangeOfVariable) {
  const auto emp = empirical_overlap(PriorModel::sparse_rademacher_tensor(60, 10, 1), 50000, Rng(6));
  std::vector<double> g;
  for (double a : emp.abs_sorted()) g.push_back(a * a);
  const auto ms = mean_stderr(g);
  // int_0^inf g(q(t)) e^-t dt = int_0^1 g(q(-log(1-u))) du, midpoint rule
  const int K = 400000;
  double acc = 0.0;
  for (int i = 0; i < K; ++i) {
    const double u = (i + 0.5) / K;
    const double q = quantile(emp, -std::log1p(-u));
    acc += q * q;
  }
  EXPECT_NEAR(acc / K, ms.mean, 3.0 * ms.stderr_);
}

TEST(Quantile, MomentGrowthBound) {
  const auto emp = empirical_overlap(PriorModel::gaussian_tensor(100, 1), 100000, Rng(7));
  const double B = 10.0, kappa = 1.0;
  double C = 0.0;
  const double tmax = std::log(100000.0);
  for (double t = 0.01; t <= tmax; t += 0.01) C = std::max(C, quantile(emp, t) / (B * std::pow(t, kappa)));
  for (int p = 1; p <= 20; ++p) {
    double s = 0.0;
    for (double a : emp.abs_sorted()) s += std::pow(a / B, p);
    const double norm_p = B * std::pow(s / emp.abs_sorted().size(), 1.0 / p);
    const double K = C * std::pow(std::tgamma(kappa * p + 1.0), 1.0 / p) / std::pow(p, kappa);
    EXPECT_LE(norm_p, K * B * std::pow(p, kappa) * (1 + 1e-12)) << p;
    EXPECT_LE(K, C * std::pow(1.0 + kappa, kappa));
  }
}

TEST(Empirical, ConstantPrior) {
  const auto prior = PriorModel::discrete_atoms({{1.0, -2.0, 0.5}}, {1.0});
  const auto emp = empirical_overlap(prior, 1000, Rng(8));
  for (double s : emp.samples()) EXPECT_EQ(s, 5.25);
}

TEST(Empirical, GaussianMoments) {
  const auto emp = empirical_overlap(PriorModel::gaussian_tensor(100, 1), 100000, Rng(9));
  const auto ms = mean_stderr(emp.samples());
  EXPECT_NEAR(ms.mean, 0.0, 3.0 * ms.stderr_);
  double s2 = 0.0, s4 = 0.0;
  for (double x : emp.samples()) {
    s2 += x * x;
    s4 += x * x * x * x;
  }
  const double M = 100000.0, var = s2 / M;
  const double se_var = std::sqrt((s4 / M - var * var) / M);
  EXPECT_NEAR(var, 100.0, 3.0 * se_var);
  EXPECT_TRUE(std::is_sorted(emp.samples().begin(), emp.samples().end()));
}

TEST(Empirical, KolmogorovDistanceToExact) {
  const long n = 30, k = 5;
  const auto exact = exact_pmf_sparse_rademacher(n, k, 1);
  const std::size_t M = 100000;
  const double delta = 0.01;
  const double tol = 3.0 * std::sqrt(std::log(2.0 / delta) / (2.0 * M));
  for (const auto& emp : {empirical_overlap(PriorModel::sparse_rademacher_tensor(n, k, 1), M, Rng(10)),
                          empirical_overlap_latent(PriorModel::sparse_rademacher_tensor(n, k, 1), M, Rng(11))}) {
    double cdf = 0.0, ks = 0.0;
    const auto& xs = emp.samples();
    for (std::size_t i = 0; i < exact.atoms().size(); ++i) {
      cdf += std::exp(exact.log_probs()[i]);
      const double ecdf =
          static_cast<double>(std::upper_bound(xs.begin(), xs.end(), exact.atoms()[i]) - xs.begin()) / M;
      ks = std::max(ks, std::fabs(ecdf - cdf));
    }
    EXPECT_LT(ks, tol);
  }
}

TEST(Empirical, TotalVariationShrinks) {
  const auto prior = PriorModel::sparse_rademacher_tensor(10, 3, 1);
  const auto exact = exact_pmf_sparse_rademacher(10, 3, 1);
  std::vector<double> tv;
  for (std::size_t M : {1000u, 10000u, 100000u}) {
    const auto emp = empirical_overlap(prior, M, Rng(12));
    std::map<double, double> freq;
    for (double x : emp.samples()) freq[x] += 1.0 / M;
    double t = 0.0;
    for (std::size_t i = 0; i < exact.atoms().size(); ++i)
      t += std::fabs(freq[exact.atoms()[i]] - std::exp(exact.log_probs()[i]));
    tv.push_back(0.5 * t);
  }
  EXPECT_LT(tv[2], tv[0]);
  EXPECT_LT(tv[2] * std::sqrt(100000.0), 4.0 * tv[0] * std::sqrt(1000.0));
}

TEST(Empirical, Deterministic) {
  const auto prior = PriorModel::sparse_clustering(20, 40, 5, 1.0);
  EXPECT_EQ(empirical_overlap(prior, 5000, Rng(13)).samples(), empirical_overlap(prior, 5000, Rng(13)).samples());
}

TEST(Empirical, ClusteringLawsAgree) {
  const auto prior = PriorModel::sparse_clustering(10, 30, 6, 1.0);
  const auto a = empirical_overlap(prior, 100000, Rng(14));
  const auto b = empirical_overlap_latent(prior, 100000, Rng(15));
  for (double D : {1.0, 2.0, 3.0, 4.0}) EXPECT_NEAR(quantile(a, D) / quantile(b, D), 1.0, 0.05) << D;
}

TEST(Speed, DiscreteDifference) {
  const auto two = OverlapDistribution::from_log_pmf({0.0, 1.0}, {std::log(0.5), std::log(0.5)});
  EXPECT_EQ(discrete_log_pmf_diff(two, 0.0, nearest_atom_speed(two)), 0.0);
  EXPECT_THROW(discrete_log_pmf_diff(two, 0.5, nearest_atom_speed(two)), DomainError);

  const auto d = exact_pmf_sparse_rademacher(50, 7, 3);
  const auto lat = exact_pmf_sparse_rademacher_latent(50, 7);
  const auto sp = tensor_speed(3);
  const double q = quantile(d, 3.0);
  const double s = std::cbrt(q);
  const double direct = (lat.log_prob(s + 2) - lat.log_prob(s)) / (std::pow(s + 2, 3) - std::pow(s, 3));
  EXPECT_NEAR(discrete_log_pmf_diff(d, q, sp), direct, 1e-12);
  EXPECT_EQ(sp(8.0), 56.0);
  EXPECT_LT(discrete_log_pmf_diff(d, q, sp), 0.0);
}

TEST(Speed, SignNegativeAtLogScale) {
  for (long n : {200, 1000}) {
    const auto d = exact_pmf_sparse_rademacher(n, 3, 3);
    const double D = std::log(static_cast<double>(n));
    EXPECT_LT(discrete_log_pmf_diff(d, quantile(d, D), tensor_speed(3)), 0.0) << n;
  }
}

TEST(Speed, NearestAtomIsAtom) {
  const auto d = exact_pmf_truncated(20, 4);
  const auto sp = nearest_atom_speed(d);
  for (std::size_t i = 0; i + 1 < d.atoms().size(); ++i) {
    const double a = sp(d.atoms()[i]);
    EXPECT_GT(a, 0.0);
    EXPECT_TRUE(d.has_atom(d.atoms()[i] + a));
  }
}

TEST(AnalyticDerivative, GaussianFamily) {
  DensityFamily fam;
  fam.d = 3;
  const double h = 1e-5;
  const double fd = (log_inner_product_density(3, 2.0 + h) - log_inner_product_density(3, 2.0 - h)) / (2 * h);
  EXPECT_NEAR(analytic_log_density_derivative(fam, 2.0).value, fd, 1e-6);
  EXPECT_EQ(analytic_log_density_derivative(fam, -1.3).value, -analytic_log_density_derivative(fam, 1.3).value);
  EXPECT_THROW(analytic_log_density_derivative(fam, 0.0), DomainError);
  fam.d = 10000;
  const double t = std::sqrt(10000.0 * 4.0);
  EXPECT_NEAR(analytic_log_density_derivative(fam, t).value / -std::sqrt(4.0 / 10000.0), 1.0, 0.05);
}

TEST(AnalyticDerivative, ClusteringKernelEstimate) {
  DensityFamily fam;
  fam.kind = DensityFamilyKind::clustering_product;
  fam.n = 10;
  fam.p = 20;
  fam.s = 10;
  fam.mc_samples = 200000;
  const auto r = analytic_log_density_derivative(fam, 5.0);
  EXPECT_GT(r.bandwidth, 0.0);
  EXPECT_EQ(r.step, 0.5 * r.bandwidth);
  EXPECT_LT(r.value, 0.0);
  EXPECT_GT(r.stderr_, 0.0);
}

TEST(TripleOverlap, ZeroPrior) {
  const auto prior = PriorModel::discrete_atoms({{0.0, 0.0}}, {1.0});
  const auto t = triple_overlap_samples(prior, 100, Rng(16));
  for (double x : t.triple_sum) EXPECT_EQ(x, 0.0);
}

TEST(TripleOverlap, QuantileSandwich) {
  const auto prior = PriorModel::sparse_rademacher_tensor(12, 3, 1);
  const std::size_t M = 200000;
  const auto t = triple_overlap_samples(prior, M, Rng(17));
  const auto tri = OverlapDistribution::from_samples(t.triple_sum);
  const auto pair = OverlapDistribution::from_samples(t.pair);
  const auto exact = exact_pmf_sparse_rademacher(12, 3, 1);
  for (double D : {1.5, 2.0, 3.0, 4.0, 6.0}) {
    EXPECT_GE(quantile(tri, D), quantile(pair, D)) << D;
    // union bound: P(sum > 3y) <= 3 P(|A| > y)
    EXPECT_LE(quantile(tri, D), 3.0 * quantile(exact, D + std::log(3.0))) << D;
  }
}
