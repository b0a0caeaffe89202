#include "fpld/specfun.hpp"

#include <algorithm>
#include <cmath>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"

namespace fpld {

namespace {

double log_cosh(double y) {
  const double a = std::fabs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

// Large-x asymptotic expansion; returns log K_nu(x).
double log_bessel_k_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  CompensatedSum sum;
  sum.add(1.0);
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * x);
    if (std::fabs(term) > std::fabs(prev)) break;  // series starts diverging
    sum.add(term);
    if (std::fabs(term) < 1e-17 * std::fabs(sum.value())) break;
    prev = term;
  }
  return 0.5 * std::log(kPi / (2.0 * x)) - x + std::log(sum.value());
}

double log_bessel_k_integral(double nu, double x) {
  auto phi = [nu, x](double u) { return -x * std::cosh(u) + log_cosh(nu * u); };
  auto dphi = [nu, x](double u) { return -x * std::sinh(u) + nu * std::tanh(nu * u); };

  double peak = 0.0;
  if (nu * nu > x) {
    double hi = std::asinh(nu / x) + 1e-12;
    double lo = std::min(1e-12, 0.5 * hi);
    if (dphi(lo) > 0.0 && dphi(hi) < 0.0) peak = bisect(dphi, lo, hi, 1e-15);
  }
  const double fmax = phi(peak);

  // Upper cutoff where the integrand has fallen below e^-60 of its peak.
  double step = std::max(1.0, peak);
  double upper = peak + 1.0;
  while (phi(upper) > fmax - 60.0) {
    upper += step;
    step *= 1.5;
  }
  double lo_u = peak, hi_u = upper;
  for (int i = 0; i < 80 && hi_u - lo_u > 1e-6; ++i) {
    const double mid = 0.5 * (lo_u + hi_u);
    if (phi(mid) > fmax - 60.0)
      lo_u = mid;
    else
      hi_u = mid;
  }
  upper = hi_u;

  auto integrand = [&](double u) { return std::exp(phi(u) - fmax); };
  double total = 0.0;
  if (peak > 0.0) total += tanh_sinh(integrand, 0.0, peak, 1e-14, 10);
  total += tanh_sinh(integrand, peak, upper, 1e-14, 10);
  return fmax + std::log(total);
}

// No order cap; large orders are used internally for high-dimensional overlaps.
BesselKValue log_bessel_k_any_order(double nu, double x) {
  if (x > 30.0 + nu * nu) return {log_bessel_k_asymptotic(nu, x), BesselMethod::asymptotic_large_x};
  return {log_bessel_k_integral(nu, x), BesselMethod::integral};
}

}  // namespace

BesselKValue log_bessel_k_detail(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k requires x > 0");
  nu = std::fabs(nu);
  if (nu > 500.0) throw ValidationError("bessel_k order must satisfy |nu| <= 500");
  return log_bessel_k_any_order(nu, x);
}

double log_bessel_k(double nu, double x) { return log_bessel_k_detail(nu, x).log_value; }

double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

double bessel_k_ratio(double nu1, double nu2, double x) {
  return std::exp(log_bessel_k(nu1, x) - log_bessel_k(nu2, x));
}

double log_inner_product_density(int d, double x) {
  if (d < 1) throw ValidationError("inner product density requires d >= 1");
  const double nu = 0.5 * (d - 1);
  const double lnorm = 0.5 * std::log(kPi) + std::lgamma(0.5 * d) + nu * kLn2;
  const double ax = std::fabs(x);
  if (ax == 0.0) {
    if (d == 1) throw DomainError("inner product density for d = 1 diverges at x = 0");
    // x^nu K_nu(x) -> Gamma(nu) 2^{nu-1}
    return std::lgamma(nu) + (nu - 1.0) * kLn2 - lnorm;
  }
  return nu * std::log(ax) + log_bessel_k_any_order(nu, ax).log_value - lnorm;
}

double inner_product_density(int d, double x) { return std::exp(log_inner_product_density(d, x)); }

double log_density_derivative_gaussian_overlap(int d, double t) {
  if (d < 1) throw ValidationError("dimension must be >= 1");
  if (!(t > 0.0)) throw DomainError("log-density derivative requires t > 0");
  const double nu = 0.5 * (d - 1);
  return -std::exp(log_bessel_k_any_order(std::fabs(nu - 1.0), t).log_value -
                   log_bessel_k_any_order(nu, t).log_value);
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

RademacherLclt rademacher_pmf_and_lclt(long n, long s) {
  if (n < 1) throw ValidationError("Rademacher walk length must be >= 1");
  if (std::labs(s) > n || ((n + s) % 2) != 0)
    throw DomainError("Rademacher pmf requires |s| <= n and s = n (mod 2)");
  const double dn = static_cast<double>(n);
  const double lp = log_binomial(dn, 0.5 * static_cast<double>(n + s)) - dn * kLn2;
  RademacherLclt r;
  r.exact = std::exp(lp);
  r.gaussian = 2.0 / std::sqrt(dn) * std_normal_pdf(static_cast<double>(s) / std::sqrt(dn));
  r.ratio = std::exp(lp - std::log(r.gaussian));
  return r;
}

double log_chisq_density(double u, double t) {
  if (!(u > 0.0)) throw ValidationError("chi-square degrees of freedom must be positive");
  if (t <= 0.0) return kNegInf;
  return (0.5 * u - 1.0) * std::log(t) - 0.5 * t - 0.5 * u * kLn2 - std::lgamma(0.5 * u);
}

double chisq_density(double u, double t) { return std::exp(log_chisq_density(u, t)); }

ChisqCltDeviation chisq_density_clt_check(double u, double x) {
  if (u < 2.0) throw ValidationError("chi-square CLT check requires u >= 2");
  const double s = std::sqrt(2.0 * u);
  const double t = u + x * s;
  const double g = chisq_density(u, t);
  const double dg = g * ((0.5 * u - 1.0) / t - 0.5);
  const double phi = std_normal_pdf(x);
  return {std::fabs(s * g - phi), std::fabs(2.0 * u * dg + x * phi)};
}

double chisq_density_sup(double u) {
  if (u <= 2.0) throw ValidationError("chi-square sup requires u > 2");
  return chisq_density(u, u - 2.0);
}

std::string to_string(BesselMethod m) {
  return m == BesselMethod::integral ? "integral" : "asymptotic_large_x";
}

}  // namespace fpld
