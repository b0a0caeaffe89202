#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fpld {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Streaming log-sum-exp.
class LogSumExp {
public:
  void add(double log_term);
  void merge(const LogSumExp& other);
  /// log of the accumulated sum; -inf when empty.
  double value() const;
  bool empty() const { return max_ == kNegInf; }

private:
  double max_ = kNegInf;
  double scaled_ = 0.0;  // sum of exp(term - max_)
};

double log_sum_exp(std::span<const double> terms);
/// log(exp(a) - exp(b)) for a >= b.
double log_diff_exp(double a, double b);

/// Recursive pairwise summation; result does not depend on thread layout.
double pairwise_sum(std::span<const double> xs);
double compensated_sum(std::span<const double> xs);

double log_factorial(double n);
double log_binomial(double n, double k);
/// Exact (2m-1)!! as double; (-1)!! = 1.
double odd_double_factorial(int m);
double binomial(int n, int k);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};
/// Sample mean and standard error (pairwise-summed).
MeanStderr mean_stderr(std::span<const double> xs);

/// Tanh-sinh quadrature of f on [a, b]; iterates level refinement until the
/// relative change falls below tol.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-13, int max_levels = 9, double* err = nullptr);

/// log of the integral of exp(g) over [a, b], given an upper bound or good
/// estimate `shift` of max g, evaluated stably.
double tanh_sinh_log(const std::function<double(double)>& g, double a, double b, double shift,
                     double tol = 1e-13, int max_levels = 9);

/// Bisection for a sign change of f on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-13,
              int max_iter = 200);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

}  // namespace fpld
