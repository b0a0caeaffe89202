#include <gtest/gtest.h>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fpld/cumulants.hpp"
#include "fpld/error.hpp"
#include "fpld/estimators.hpp"
#include "fpld/multi_index.hpp"
#include "fpld/oracle.hpp"
#include "fpld/priors.hpp"
#include "fpld/rng.hpp"

using namespace fpld;

namespace {

// E[(mu + Z)^e] by the Stein recursion m_e = mu m_{e-1} + (e-1) m_{e-2}.
double stein_moment(double mu, int e) {
  double a = 1.0, b = mu;
  if (e == 0) return a;
  for (int j = 2; j <= e; ++j) {
    const double c = mu * b + (j - 1) * a;
    a = b;
    b = c;
  }
  return b;
}

// E[tanh(sqrt(l) Y)^2] for Y = sqrt(l) X + Z, X = +-1: the unrestricted Corr^2.
double bayes_corr_sq_rademacher(double l) {
  const double s = std::sqrt(l);
  const double h = 1e-3;
  double acc = 0.0;
  for (double z = -12.0; z <= 12.0; z += h) {
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    const double t = std::tanh(s * (s + z));
    acc += phi * t * t * h;
  }
  return acc;
}

FiniteSupport random_support(std::size_t dim, std::size_t atoms, Rng& rng) {
  FiniteSupport s;
  double tot = 0.0;
  for (std::size_t a = 0; a < atoms; ++a) {
    std::vector<double> x(dim);
    for (auto& v : x) v = 2.0 * rng.uniform() - 1.0;
    s.atoms.push_back(x);
    const double p = 0.2 + rng.uniform();
    s.probs.push_back(p);
    tot += p;
  }
  for (auto& p : s.probs) p /= tot;
  return s;
}

PriorModel rademacher1() { return PriorModel::sparse_rademacher_tensor(1, 1, 1); }

}  // namespace

TEST(Oracle, ShiftedMomentExamples) {
  EXPECT_DOUBLE_EQ(shifted_gaussian_moment_1d(0.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(shifted_gaussian_moment_1d(2.0, 3), 14.0);
  EXPECT_DOUBLE_EQ(shifted_gaussian_moment_1d(0.0, 4), 3.0);
  EXPECT_DOUBLE_EQ(shifted_gaussian_monomial_moment({2.0, 0.0}, MultiIndex(std::vector<int>{3, 4})), 42.0);
}

TEST(Oracle, ShiftedMomentMatchesSteinRecursion) {
  for (double mu : {-1.7, -0.3, 0.0, 0.5, 2.2})
    for (int e = 0; e <= 16; ++e) {
      const double ref = stein_moment(mu, e);
      EXPECT_NEAR(shifted_gaussian_moment_1d(mu, e), ref, 1e-12 * std::max(1.0, std::abs(ref))) << mu << " " << e;
    }
}

TEST(Oracle, BasisIsGradedLexWithConstant) {
  const auto b = MonomialBasis::make(3, 3);
  EXPECT_EQ(b.size(), 20u);
  EXPECT_EQ(b.alphas.front().degree(), 0);
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_TRUE(b.alphas[i - 1] < b.alphas[i]);
  for (const auto& a : b.alphas) EXPECT_LE(a.degree(), 3);
}

TEST(Oracle, RademacherLinearClosedForm) {
  for (double l : {0.0, 0.3, 1.0, 4.0}) {
    const auto rep = exact_corr_and_mmse(rademacher1(), l, 1);
    EXPECT_NEAR(rep.corr_sq_total, l / (1.0 + l), 1e-12);
    EXPECT_NEAR(rep.mmse, 1.0 / (1.0 + l), 1e-12);
  }
  EXPECT_NEAR(exact_corr_and_mmse(rademacher1(), 1.0, 1).corr_sq_total, 0.5, 1e-12);
}

TEST(Oracle, CenteredDegreeZero) {
  const auto p = PriorModel::sparse_rademacher_tensor(3, 2, 1);
  const auto rep = exact_corr_and_mmse(p, 2.0, 0);
  EXPECT_NEAR(rep.corr_sq_total, 0.0, 1e-14);
  EXPECT_NEAR(rep.mmse, second_moment_norm(p), 1e-12);
}

TEST(Oracle, DegreeZeroIsSquaredMean) {
  FiniteSupport s{{{1.0, 2.0}, {3.0, -1.0}}, {0.25, 0.75}};
  const auto rep = exact_corr_and_mmse(s, 1.5, 0);
  const double m0 = 0.25 * 1.0 + 0.75 * 3.0, m1 = 0.25 * 2.0 - 0.75 * 1.0;
  EXPECT_NEAR(rep.corr_sq_total, m0 * m0 + m1 * m1, 1e-12);
}

TEST(Oracle, ApproachesBayesCorrelationFromBelow) {
  const double l = 0.5;
  const double bayes = bayes_corr_sq_rademacher(l);
  double prev = -1.0;
  for (int D = 1; D <= 15; D += 2) {
    const double c = exact_corr_and_mmse(rademacher1(), l, D).corr_sq_total;
    EXPECT_LE(c, bayes + 1e-9);
    EXPECT_GE(c, prev - 1e-12);
    prev = c;
  }
  EXPECT_NEAR(prev, bayes, 1e-5);
}

TEST(Oracle, MonotoneInDegreeAndSnrOnRandomInstances) {
  Rng rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const auto s = random_support(2, 3 + trial % 3, rng);
    double prev = -1.0;
    for (int D = 0; D <= 4; ++D) {
      const double c = exact_corr_and_mmse(s, 1.3, D).corr_sq_total;
      EXPECT_GE(c, prev - 1e-9) << trial << " D=" << D;
      prev = c;
    }
    prev = -1.0;
    for (double l : {0.0, 0.2, 0.7, 1.5, 3.0}) {
      const double c = exact_corr_and_mmse(s, l, 3).corr_sq_total;
      EXPECT_GE(c, prev - 1e-9) << trial << " lambda=" << l;
      prev = c;
    }
  }
}

TEST(Oracle, MmseIdentity) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_support(3, 4, rng);
    const auto rep = exact_corr_and_mmse(s, 0.9, 3);
    EXPECT_NEAR(rep.mmse + rep.corr_sq_total, rep.second_moment, 1e-10);
    const double sum = std::accumulate(rep.corr_sq_per_coord.begin(), rep.corr_sq_per_coord.end(), 0.0);
    EXPECT_NEAR(sum, rep.corr_sq_total, 1e-12);
    EXPECT_LE(rep.corr_sq_total, rep.second_moment + 1e-10);
  }
}

TEST(Oracle, InvariantUnderCoordinateRelabeling) {
  Rng rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const auto s = random_support(3, 5, rng);
    FiniteSupport t = s, u = s;
    for (auto& a : t.atoms) std::swap(a[0], a[2]);
    for (auto& a : u.atoms) a[1] = -a[1];
    const double c = exact_corr_and_mmse(s, 1.1, 3).corr_sq_total;
    EXPECT_NEAR(exact_corr_and_mmse(t, 1.1, 3).corr_sq_total, c, 1e-9);
    EXPECT_NEAR(exact_corr_and_mmse(u, 1.1, 3).corr_sq_total, c, 1e-9);
  }
}

TEST(Oracle, ProductReductionMatchesFullGram) {
  for (long k : {1L, 2L}) {
    const auto p = PriorModel::sparse_rademacher_tensor(3, k, 1);
    OracleOptions full;
    full.allow_product_reduction = false;
    for (int D : {1, 2, 3}) {
      const auto a = exact_corr_and_mmse(p, 1.7, D);
      const auto b = exact_corr_and_mmse(p, 1.7, D, full);
      EXPECT_TRUE(a.product_reduced);
      EXPECT_FALSE(b.product_reduced);
      EXPECT_NEAR(a.corr_sq_total, b.corr_sq_total, 1e-9) << k << " " << D;
    }
  }
}

TEST(Oracle, EnumerateSupportMergesAtoms) {
  const auto p = PriorModel::sparse_rademacher_tensor(2, 1, 2);
  const auto s = enumerate_support(p);
  double tot = 0.0;
  for (double q : s.probs) tot += q;
  EXPECT_NEAR(tot, 1.0, 1e-14);
  for (std::size_t i = 0; i < s.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < s.atoms.size(); ++j) EXPECT_NE(s.atoms[i], s.atoms[j]);
  // x x^T identifies x and -x: {0, e1e1^T, e2e2^T, (11)(11)^T, (1-1)(1-1)^T}.
  EXPECT_EQ(s.atoms.size(), 5u);
}

TEST(Oracle, Errors) {
  OracleOptions small;
  small.max_atoms = 4;
  small.allow_product_reduction = false;
  EXPECT_THROW(exact_corr_and_mmse(PriorModel::sparse_rademacher_tensor(3, 2, 1), 1.0, 1, small), BudgetError);
  OracleOptions tiny;
  tiny.max_basis = 5;
  tiny.allow_product_reduction = false;
  EXPECT_THROW(exact_corr_and_mmse(PriorModel::sparse_rademacher_tensor(3, 2, 1), 1.0, 2, tiny), BudgetError);
  EXPECT_THROW(exact_corr_and_mmse(PriorModel::gaussian_tensor(2, 1), 1.0, 1), DomainError);
  EXPECT_THROW(exact_corr_and_mmse(rademacher1(), -1.0, 1), ValidationError);
  EXPECT_THROW(exact_corr_and_mmse(rademacher1(), 1.0, -1), ValidationError);
}

TEST(Oracle, ProjectionCoefficients) {
  OracleOptions o;
  o.keep_coefficients = true;
  const double l = 2.0;
  const auto rep = exact_corr_and_mmse(rademacher1(), l, 1, o);
  for (double y : {-1.5, 0.0, 0.7, 3.0}) {
    const auto f = evaluate_projection(rep, {y});
    ASSERT_EQ(f.size(), 1u);
    EXPECT_NEAR(f[0], std::sqrt(l) / (1.0 + l) * y, 1e-12);
  }
  const auto plain = exact_corr_and_mmse(rademacher1(), l, 1);
  EXPECT_THROW(evaluate_projection(plain, {0.0}), ValidationError);
}

TEST(Oracle, JsonReport) {
  const auto rep = exact_corr_and_mmse(PriorModel::sparse_rademacher_tensor(2, 1, 1), 1.0, 2);
  const auto j = nlohmann::json::parse(oracle_report_json(rep));
  for (const char* key : {"basis_size", "cond_number", "corr_sq_per_coord", "corr_sq_total", "mmse"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_NEAR(j["corr_sq_total"].get<double>(), rep.corr_sq_total, 1e-15);
  EXPECT_EQ(j["corr_sq_per_coord"].size(), 2u);
}

TEST(OracleMc, ConstantMeanEstimator) {
  const auto p = PriorModel::discrete_atoms({{1.0, 2.0}, {3.0, -1.0}}, {0.25, 0.75});
  const GamInstance gam(p, 1.0);
  const std::vector<double> mean{2.5, -0.25};
  const auto r = mc_corr_of_estimator(gam, [&](const std::vector<double>&) { return mean; }, 20000, Rng(5));
  const double expect = std::sqrt(2.5 * 2.5 + 0.25 * 0.25);
  EXPECT_NEAR(r.corr, expect, 4.0 * r.stderr_ + 1e-12);
}

TEST(OracleMc, OptimalProjectionMatchesOracle) {
  OracleOptions o;
  o.keep_coefficients = true;
  const double l = 1.0;
  const auto rep = exact_corr_and_mmse(rademacher1(), l, 1, o);
  const GamInstance gam(rademacher1(), l);
  const auto r = mc_corr_of_estimator(gam, [&](const std::vector<double>& y) { return evaluate_projection(rep, y); },
                                      200000, Rng(6));
  EXPECT_NEAR(r.corr, std::sqrt(l / (1.0 + l)), 3.0 * r.stderr_);
}

TEST(OracleMc, ZeroEstimatorRejected) {
  const GamInstance gam(rademacher1(), 1.0);
  EXPECT_THROW(mc_corr_of_estimator(gam, [](const std::vector<double>&) { return std::vector<double>{0.0}; }, 100,
                                    Rng(7)),
               DomainError);
}

TEST(OracleMc, HermiteEstimatorBetweenLowerBoundAndOracle) {
  const auto p = PriorModel::sparse_rademacher_tensor(3, 1, 1);
  const double l = 1.5;
  const int D = 2;
  const double oracle = std::sqrt(exact_corr_and_mmse(p, l, D).corr_sq_total);
  const auto lb = corr_lower_bound_overlap(p, l, D, 200000, Rng(8));
  const GamInstance gam(p, l);
  const auto ref = make_reference_set(p, 1024, 9);
  const auto r = mc_corr_of_estimator(
      gam, [&](const std::vector<double>& y) { return materialized_estimator(gam, ref, y, D); }, 20000, Rng(10));
  EXPECT_LE(r.corr, oracle + 3.0 * r.stderr_);
  EXPECT_GE(r.corr + 3.0 * r.stderr_, lb.ratio - 3.0 * lb.se_ratio);
  EXPECT_LE(lb.ratio - 3.0 * lb.se_ratio, oracle);
}

TEST(OracleSandwich, CumulantUpperAndOverlapLower) {
  struct Case {
    PriorModel p;
    double l;
    int D;
  };
  const std::vector<Case> cases{{rademacher1(), 0.5, 2},
                                {PriorModel::sparse_rademacher_tensor(3, 1, 1), 1.0, 2},
                                {PriorModel::sparse_rademacher_tensor(3, 2, 1), 0.4, 3},
                                {PriorModel::sparse_rademacher_tensor(2, 1, 2), 0.3, 2}};
  std::uint64_t seed = 20;
  for (const auto& c : cases) {
    const double oracle = exact_corr_and_mmse(c.p, c.l, c.D).corr_sq_total;
    const double upper = sw_corr_upper_bound(c.p, c.l, c.D).total;
    const auto lb = corr_lower_bound_overlap(c.p, c.l, c.D, 100000, Rng(seed++));
    EXPECT_LE(oracle, upper * (1.0 + 1e-9) + 1e-12);
    EXPECT_LE(lb.lower_sq - 3.0 * lb.se_lower_sq, oracle);
  }
}
