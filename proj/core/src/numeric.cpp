#include "fpld/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "fpld/error.hpp"

namespace fpld {

void LogSumExp::add(double log_term) {
  if (log_term == kNegInf) return;
  if (std::isnan(log_term)) throw DomainError("log-sum-exp received NaN term");
  if (log_term <= max_) {
    scaled_ += std::exp(log_term - max_);
  } else {
    scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  }
}

void LogSumExp::merge(const LogSumExp& other) {
  if (other.empty()) return;
  if (empty()) {
    *this = other;
    return;
  }
  if (other.max_ <= max_) {
    scaled_ += other.scaled_ * std::exp(other.max_ - max_);
  } else {
    scaled_ = scaled_ * std::exp(max_ - other.max_) + other.scaled_;
    max_ = other.max_;
  }
}

double LogSumExp::value() const { return empty() ? kNegInf : max_ + std::log(scaled_); }

double log_sum_exp(std::span<const double> terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (m == kNegInf) return kNegInf;
  CompensatedSum s;
  for (double t : terms) s.add(std::exp(t - m));
  return m + std::log(s.value());
}

double log_diff_exp(double a, double b) {
  if (b > a) throw DomainError("log_diff_exp requires a >= b");
  if (b == kNegInf) return a;
  return a + std::log1p(-std::exp(b - a));
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t h = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, h)) + pairwise_sum(xs.subspan(h));
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double log_factorial(double n) { return std::lgamma(n + 1.0); }

double log_binomial(double n, double k) {
  if (k < 0 || k > n) return kNegInf;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double odd_double_factorial(int m) {
  double r = 1.0;
  for (int j = 1; j <= m; ++j) r *= static_cast<double>(2 * j - 1);
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
  return std::round(r);
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.count = xs.size();
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = pairwise_sum(xs) / n;
  if (xs.size() > 1) {
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
    out.stderr_ = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  }
  return out;
}

namespace {

// Sum of tanh-sinh nodes at level `level` (step h = 2^-level), skipping nodes
// already present at coarser levels when `odd_only`.
template <class F>
double ts_level(const F& f, double c, double r, double h, bool odd_only, double& max_abs) {
  double s = 0.0;
  const double half_pi = 0.5 * kPi;
  for (int k = odd_only ? 1 : 0;; k += odd_only ? 2 : 1) {
    const double t = k * h;
    const double sh = half_pi * std::sinh(t);
    const double ch = std::cosh(sh);
    const double w = half_pi * std::cosh(t) / (ch * ch);
    // 1 - tanh(sh), computed without cancellation.
    const double comp = 2.0 / (std::exp(2.0 * sh) + 1.0);
    const double x_off = r * comp;  // distance from the endpoints
    if (w < 1e-300) break;
    double term = 0.0;
    if (k == 0) {
      term = w * f(c);
    } else {
      const double xp = (c + r) - x_off;
      const double xm = (c - r) + x_off;
      const bool in_p = xp < c + r, in_m = xm > c - r;
      if (!in_p && !in_m) break;
      term = w * ((in_p ? f(xp) : 0.0) + (in_m ? f(xm) : 0.0));
    }
    max_abs = std::max(max_abs, std::fabs(term));
    s += term;
    if (k > 0 && std::fabs(term) <= 1e-18 * max_abs && t > 3.0) break;
    if (t > 6.5) break;
  }
  return s * h;
}

}  // namespace

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_levels, double* err) {
  if (!(b > a)) {
    if (err) *err = 0.0;
    return 0.0;
  }
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double max_abs = 0.0;
  double h = 1.0;
  double sum = ts_level(f, c, r, h, false, max_abs) / h;  // raw node sum
  double est = sum * h * r;
  double diff = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    sum += ts_level(f, c, r, h, true, max_abs) / h;
    const double next = sum * h * r;
    diff = std::fabs(next - est);
    est = next;
    if (level >= 3 && diff <= tol * std::fabs(est)) break;
  }
  if (err) *err = diff;
  return est;
}

double tanh_sinh_log(const std::function<double(double)>& g, double a, double b, double shift,
                     double tol, int max_levels) {
  const double v = tanh_sinh([&](double u) { return std::exp(g(u) - shift); }, a, b, tol, max_levels);
  if (v <= 0.0) return kNegInf;
  return shift + std::log(v);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw DomainError("bisect: no sign change on bracket");
  for (int i = 0; i < max_iter && (hi - lo) > xtol * std::max(1.0, std::fabs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace fpld
