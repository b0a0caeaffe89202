#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "fpld/rng.hpp"
#include "fpld/specfun.hpp"

using namespace fpld;

namespace {

std::vector<double> grid(double a, double b, int m, bool log) {
  std::vector<double> g(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / (m - 1);
    g[static_cast<std::size_t>(i)] = log ? a * std::pow(b / a, t) : a + (b - a) * t;
  }
  return g;
}

}  // namespace

TEST(BesselK, HalfOrderClosedForm) {
  EXPECT_NEAR(bessel_k(0.5, 1.0), std::sqrt(kPi / 2.0) * std::exp(-1.0), 1e-14);
  EXPECT_NEAR(bessel_k(0.5, 1.0), 0.4610685, 1e-7);
}

TEST(BesselK, AgreesWithBoostOnGrid) {
  double worst = 0.0;
  for (double nu : grid(0.0, 50.0, 26, false))
    for (double x : grid(0.1, 100.0, 25, true)) {
      const double ref = boost::math::cyl_bessel_k(nu, x);
      if (!(ref > 1e-300 && ref < 1e300)) continue;
      worst = std::max(worst, std::fabs(bessel_k(nu, x) / ref - 1.0));
    }
  EXPECT_LT(worst, 1e-11);
}

TEST(BesselK, LogValueBeyondDoubleRange) {
  const double lv = log_bessel_k(200.0, 0.5);
  EXPECT_TRUE(std::isfinite(lv));
  EXPECT_GT(lv, 700.0);
  EXPECT_NEAR(log_bessel_k(3.0, 1e4) + 1e4 + 0.5 * std::log(2e4 / kPi), 0.0, 1e-3);
}

TEST(BesselK, SymmetricInOrderAndErrors) {
  EXPECT_DOUBLE_EQ(bessel_k(-2.5, 3.0), bessel_k(2.5, 3.0));
  EXPECT_THROW(bessel_k(1.0, 0.0), DomainError);
  EXPECT_THROW(bessel_k(1.0, -1.0), DomainError);
  EXPECT_THROW(bessel_k(600.0, 1.0), ValidationError);
}

TEST(BesselK, RecurrenceAndRatioBounds) {
  for (double nu : grid(1.0, 50.0, 64, false))
    for (double x : grid(0.1, 100.0, 64, true)) {
      const double lkm = log_bessel_k(nu - 1.0, x), lk = log_bessel_k(nu, x), lkp = log_bessel_k(nu + 1.0, x);
      const double res = std::fabs(1.0 - std::exp(lkm - lkp) - 2.0 * nu / x * std::exp(lk - lkp));
      ASSERT_LT(res, 1e-10) << nu << " " << x;
      const double ratio = std::exp(lkp - lk);
      const double lo = (nu + std::sqrt(x * x + nu * nu)) / x;
      const double hi = (nu + 0.5 + std::sqrt(x * x + (nu + 0.5) * (nu + 0.5))) / x;
      ASSERT_GT(ratio, lo) << nu << " " << x;
      ASSERT_LT(ratio, hi) << nu << " " << x;
    }
}

TEST(BesselK, SmallArgumentAsymptotics) {
  for (double nu : {0.5, 1.0, 2.5}) {
    const double x = 1e-6;
    EXPECT_NEAR(bessel_k(nu, x) * 2.0 * std::pow(x / 2.0, nu) / std::tgamma(nu), 1.0, 1e-4);
  }
}

TEST(BesselK, LogDerivativeIdentity) {
  // d/dx log(x^nu K_nu(x)) = -K_{nu-1}/K_nu
  for (double nu : {0.5, 1.5, 4.0})
    for (double x : {0.5, 2.0, 10.0}) {
      const double h = 1e-5;
      auto g = [&](double y) { return nu * std::log(y) + log_bessel_k(nu, y); };
      const double fd = (g(x + h) - g(x - h)) / (2 * h);
      EXPECT_NEAR(fd, -bessel_k_ratio(nu - 1.0, nu, x), 1e-7);
    }
}

TEST(InnerProductDensity, OneDimensionalClosedForm) {
  for (double x : {0.1, 1.0, 3.0}) EXPECT_NEAR(inner_product_density(1, x), bessel_k(0.0, x) / kPi, 1e-15);
  EXPECT_THROW(inner_product_density(1, 0.0), DomainError);
  EXPECT_THROW(inner_product_density(0, 1.0), ValidationError);
}

TEST(InnerProductDensity, IntegratesToOneAndSymmetric) {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int d : {1, 2, 3, 5, 10}) {
    auto f = [d](double x) { return inner_product_density(d, x); };
    const double half = ts.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    EXPECT_NEAR(2.0 * half, 1.0, 1e-8) << d;
    EXPECT_EQ(inner_product_density(d, 1.7), inner_product_density(d, -1.7));
  }
}

TEST(InnerProductDensity, ChiSquareGoodnessOfFitD3) {
  Rng rng(2024);
  const int M = 1000000, bins = 40;
  const double lo = -8.0, hi = 8.0, w = (hi - lo) / bins;
  std::vector<double> counts(bins + 2, 0.0);
  for (int i = 0; i < M; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += rng.normal() * rng.normal();
    if (s < lo)
      counts[0] += 1;
    else if (s >= hi)
      counts[bins + 1] += 1;
    else
      counts[1 + static_cast<std::size_t>((s - lo) / w)] += 1;
  }
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [](double x) { return inner_product_density(3, x); };
  const double tail = ts.integrate(f, hi, std::numeric_limits<double>::infinity());
  double chi2 = 0.0;
  int df = 0;
  for (int b = 0; b < bins + 2; ++b) {
    double p;
    if (b == 0 || b == bins + 1)
      p = tail;
    else
      p = ts.integrate(f, lo + (b - 1) * w, lo + b * w);
    const double e = p * M;
    if (e < 5) continue;
    chi2 += (counts[static_cast<std::size_t>(b)] - e) * (counts[static_cast<std::size_t>(b)] - e) / e;
    ++df;
  }
  const boost::math::chi_squared dist(df - 1);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

TEST(GaussianOverlapDerivative, LimitsAndFiniteDifference) {
  EXPECT_NEAR(log_density_derivative_gaussian_overlap(3, 200.0), -1.0, 1e-2);
  const int d = 10000;
  const double D = 4.0, t = std::sqrt(d * D);
  EXPECT_NEAR(log_density_derivative_gaussian_overlap(d, t) / -std::sqrt(D / d), 1.0, 0.05);
  const double h = 1e-5;
  const double fd = (log_inner_product_density(5, 2.0 + h) - log_inner_product_density(5, 2.0 - h)) / (2 * h);
  EXPECT_NEAR(log_density_derivative_gaussian_overlap(5, 2.0), fd, 1e-6);
  const double fd3 = (log_inner_product_density(3, 2.0 + h) - log_inner_product_density(3, 2.0 - h)) / (2 * h);
  EXPECT_NEAR(log_density_derivative_gaussian_overlap(3, 2.0), fd3, 1e-6);
  EXPECT_THROW(log_density_derivative_gaussian_overlap(3, 0.0), DomainError);
}

TEST(RademacherLclt, ExactValues) {
  EXPECT_NEAR(rademacher_pmf_and_lclt(2, 0).exact, 0.5, 1e-15);
  EXPECT_NEAR(rademacher_pmf_and_lclt(4, 2).exact, 0.25, 1e-15);
  EXPECT_THROW(rademacher_pmf_and_lclt(4, 1), DomainError);
  EXPECT_THROW(rademacher_pmf_and_lclt(4, 6), DomainError);
}

TEST(RademacherLclt, RatioWindow) {
  const long n = 10000;
  for (long s = -200; s <= 200; s += 2) {
    const auto r = rademacher_pmf_and_lclt(n, s);
    ASSERT_GE(r.ratio, 0.95);
    ASSERT_LE(r.ratio, 1.05);
  }
}

TEST(ChiSquare, DensityCltDeviation) {
  EXPECT_LT(chisq_density_clt_check(1e4, 0.0).density, 0.01);
  double prev = 1e9;
  for (double u : {1e2, 1e3, 1e4}) {
    double sup = 0.0;
    for (double x = -2.0; x <= 2.0; x += 0.05) sup = std::max(sup, chisq_density_clt_check(u, x).density);
    EXPECT_LT(sup, prev);
    prev = sup;
  }
}

TEST(ChiSquare, SupBound) {
  const double C = std::exp(1.0) / (2.0 * std::sqrt(kPi)) * 1.01;
  for (double u : {3.0, 10.0, 100.0, 1e4}) {
    EXPECT_LE(chisq_density_sup(u), C / std::sqrt(u));
    EXPECT_NEAR(chisq_density_sup(u), chisq_density(u, u - 2.0), 1e-15);
  }
  EXPECT_NEAR(chisq_density(2.0, 1.0), 0.5 * std::exp(-0.5), 1e-15);
}
