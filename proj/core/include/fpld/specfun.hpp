#pragma once

#include <string>

namespace fpld {

enum class BesselMethod { integral, asymptotic_large_x };

struct BesselKValue {
  double log_value;  ///< log K_nu(x)
  BesselMethod method;
};

/// log K_nu(x) for x > 0, |nu| <= 500. Double-exponential quadrature of
/// int_0^inf exp(-x cosh u) cosh(nu u) du in log space; large-x asymptotic
/// series when x > 30 + nu^2.
BesselKValue log_bessel_k_detail(double nu, double x);
double log_bessel_k(double nu, double x);
double bessel_k(double nu, double x);
/// K_{nu1}(x) / K_{nu2}(x) computed in log space.
double bessel_k_ratio(double nu1, double nu2, double x);

/// Density of <G, H> for independent standard Gaussian vectors in R^d.
double inner_product_density(int d, double x);
double log_inner_product_density(int d, double x);

/// d/dt log f_d(t) = -K_{nu-1}(t)/K_nu(t), nu = (d-1)/2, t > 0.
double log_density_derivative_gaussian_overlap(int d, double t);

struct RademacherLclt {
  double exact;     ///< P(S_n = s)
  double gaussian;  ///< (2/sqrt n) phi(s/sqrt n)
  double ratio;
};
/// Exact pmf of a length-n Rademacher walk at s and its local-CLT value.
RademacherLclt rademacher_pmf_and_lclt(long n, long s);

double log_chisq_density(double u, double t);
double chisq_density(double u, double t);

struct ChisqCltDeviation {
  double density;     ///< |sqrt(2u) g_u(u + x sqrt(2u)) - phi(x)|
  double derivative;  ///< |2u g_u'(u + x sqrt(2u)) - phi'(x)|
};
ChisqCltDeviation chisq_density_clt_check(double u, double x);
/// sup_t g_u(t) (attained at t = u - 2 for u > 2).
double chisq_density_sup(double u);

double std_normal_pdf(double x);

std::string to_string(BesselMethod m);

}  // namespace fpld
