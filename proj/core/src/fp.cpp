#include "fpld/fp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "fpld/parallel.hpp"

namespace fpld {

double annealed_fp(const OverlapDistribution& dist, double lambda, double q) {
  switch (dist.mode()) {
    case OverlapMode::exact_pmf: {
      const double lp = dist.log_prob(q);
      if (lp == kNegInf) throw DomainError("overlap " + format_double(q) + " has zero mass");
      return -lambda * q - lp;
    }
    case OverlapMode::analytic_density: {
      const double lf = dist.log_density(q);
      if (lf == kNegInf) throw DomainError("overlap density vanishes at " + format_double(q));
      return -lambda * q - lf;
    }
    case OverlapMode::empirical:
      break;
  }
  throw ValidationError("annealed FP needs an exact pmf or an analytic density");
}

FpDerivative fp_derivative_at_quantile(const OverlapDistribution& dist, double lambda, double D,
                                       const SpeedFunction* speed) {
  FpDerivative out;
  out.q = quantile(dist, D);
  if (dist.mode() == OverlapMode::exact_pmf) {
    if (!speed) throw ValidationError("a speed function is required for discrete overlaps");
    out.step = (*speed)(out.q);
    out.lambda_plus_derivative = -discrete_log_pmf_diff(dist, out.q, *speed);
  } else if (dist.mode() == OverlapMode::analytic_density) {
    out.lambda_plus_derivative = -dist.log_density_derivative(out.q);
  } else {
    throw ValidationError("FP derivative needs an exact pmf or an analytic density");
  }
  out.fp_derivative = out.lambda_plus_derivative - lambda;
  out.sign = (out.fp_derivative > 0) - (out.fp_derivative < 0);
  return out;
}

FpCurve fp_curve(const OverlapDistribution& dist, double lambda, double D_max, const SpeedFunction* speed,
                 const std::vector<double>* grid) {
  FpCurve curve;
  curve.lambda = lambda;
  curve.discrete = dist.mode() == OverlapMode::exact_pmf;
  std::vector<double> qs;
  if (grid) {
    qs = *grid;
  } else if (curve.discrete) {
    const double qmax = quantile(dist, D_max);
    for (double a : dist.atoms())
      if (a >= 0.0 && a <= qmax) qs.push_back(a);
  } else {
    const double qmax = quantile(dist, D_max);
    const double qmin = quantile(dist, 1.0) / 8.0;
    if (!(qmin > 0.0) || !(qmax > qmin)) throw DomainError("degenerate density grid");
    for (int i = 0; i < 64; ++i) qs.push_back(qmin * std::pow(qmax / qmin, i / 63.0));
  }
  for (double q : qs) {
    FpPoint pt;
    pt.q = q;
    pt.f_ann = annealed_fp(dist, lambda, q);
    double lpd = std::numeric_limits<double>::quiet_NaN();
    if (curve.discrete) {
      if (!speed) throw ValidationError("a speed function is required for discrete overlaps");
      const double a = (*speed)(q);
      const double l1 = dist.log_prob(q + a);
      if (l1 != kNegInf) lpd = (l1 - dist.log_prob(q)) / a;
    } else if (q != 0.0) {
      lpd = dist.log_density_derivative(q);
    }
    pt.derivative = -lambda - lpd;
    if (!std::isnan(lpd)) pt.sign = (-lpd > 0) - (-lpd < 0);
    curve.points.push_back(pt);
  }
  return curve;
}

double NoiseTensor3::cubic_form(const std::vector<double>& v) const {
  CompensatedSum s;
  std::vector<long> supp;
  for (long i = 0; i < n; ++i)
    if (v[static_cast<std::size_t>(i)] != 0.0) supp.push_back(i);
  for (long i : supp)
    for (long j : supp)
      for (long k : supp)
        s.add(at(i, j, k) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)]);
  return s.value();
}

NoiseTensor3 sample_noise3(long n, Rng& rng) {
  NoiseTensor3 z;
  z.n = n;
  z.z.resize(static_cast<std::size_t>(n * n * n));
  for (auto& x : z.z) x = rng.normal();
  return z;
}

std::uint64_t truncated_support_size(long n, long k) {
  const long lo = (k + 1) / 2, hi = std::min(2 * k, n);
  long double total = 0.0L;
  for (long m = lo; m <= hi; ++m) total += std::exp(static_cast<long double>(log_binomial(n, m)) + m * std::log(2.0L));
  if (total > 1.8e19L) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(total)));
}

namespace {

// Depth-first enumeration of signed supports in increasing index order with
// incremental evaluation of the cubic form <W, v'^{(x)3}> (W symmetric).
class SupportWalker {
public:
  SupportWalker(long n, const std::vector<double>& W) : n_(n), W_(W), idx_(static_cast<std::size_t>(n)), sg_(static_cast<std::size_t>(n)) {}

  template <class Visit>
  void run(long lo, long hi, const std::vector<double>& v, Visit&& visit) {
    lo_ = lo;
    hi_ = hi;
    v_ = &v;
    rec(0, 0, 0.0, 0, true, visit);
  }

private:
  double w(long i, long j, long k) const { return W_[static_cast<std::size_t>((i * n_ + j) * n_ + k)]; }

  template <class Visit>
  void rec(long m, long start, double T, long ov, bool ones_prefix, Visit& visit) {
    if (m >= lo_) visit(m, T, ov, ones_prefix);
    if (m == hi_) return;
    for (long j = start; j < n_; ++j) {
      if (m + (n_ - j) < lo_) break;
      double Q = 0.0, R = 0.0;
      for (long a = 0; a < m; ++a) {
        const long ia = idx_[static_cast<std::size_t>(a)];
        const double sa = sg_[static_cast<std::size_t>(a)];
        R += w(j, j, ia) * sa;
        double inner = 0.5 * w(j, ia, ia) * sa;
        for (long b = a + 1; b < m; ++b) inner += w(j, ia, idx_[static_cast<std::size_t>(b)]) * sg_[static_cast<std::size_t>(b)];
        Q += 2.0 * sa * inner;  // sum_{a,b} W_jab s_a s_b with s_a^2 = 1
      }
      const double wjjj = w(j, j, j);
      const double vj = (*v_)[static_cast<std::size_t>(j)];
      idx_[static_cast<std::size_t>(m)] = j;
      for (int sigma : {1, -1}) {
        sg_[static_cast<std::size_t>(m)] = sigma;
        const double Tn = T + 3.0 * sigma * Q + 3.0 * R + sigma * wjjj;
        const long ovn = ov + static_cast<long>(sigma * vj);
        rec(m + 1, j + 1, Tn, ovn, ones_prefix && j == m && sigma == 1, visit);
      }
    }
  }

  long n_;
  const std::vector<double>& W_;
  std::vector<long> idx_;
  std::vector<double> sg_;
  long lo_ = 0, hi_ = 0;
  const std::vector<double>* v_ = nullptr;
};

std::vector<double> symmetrize(const NoiseTensor3& Z) {
  const long n = Z.n;
  std::vector<double> W(Z.z.size());
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      for (long k = 0; k < n; ++k)
        W[static_cast<std::size_t>((i * n + j) * n + k)] =
            (Z.at(i, j, k) + Z.at(i, k, j) + Z.at(j, i, k) + Z.at(j, k, i) + Z.at(k, i, j) + Z.at(k, j, i)) / 6.0;
  return W;
}

void check_latent(long n, const std::vector<double>& v, const NoiseTensor3& Z) {
  if (static_cast<long>(v.size()) != n || Z.n != n) throw ValidationError("latent and noise dimensions must match n");
  for (double x : v)
    if (x != 0.0 && x != 1.0 && x != -1.0) throw ValidationError("latent entries must lie in {-1, 0, 1}");
}

}  // namespace

std::vector<InnerSums> quenched_inner_log_sums_multi(long n, long k, const std::vector<double>& amplitudes,
                                                    const std::vector<double>& v, const NoiseTensor3& Z,
                                                    std::uint64_t budget) {
  if (n < 1 || k < 1 || k > n) throw ValidationError("truncated model requires 1 <= k <= n");
  check_latent(n, v, Z);
  if (amplitudes.empty()) throw ValidationError("at least one amplitude is required");
  for (double a : amplitudes)
    if (!(a >= 0.0)) throw ValidationError("amplitude must be >= 0");
  const std::uint64_t size = truncated_support_size(n, k);
  if (size > budget)
    throw BudgetError("quenched enumeration needs " + std::to_string(size) + " terms, budget " + std::to_string(budget));
  const long lo = (k + 1) / 2, hi = std::min(2 * k, n);
  const double rho = static_cast<double>(k) / static_cast<double>(n);
  std::vector<double> lp_in(static_cast<std::size_t>(hi + 1));
  for (long m = 0; m <= hi; ++m)
    lp_in[static_cast<std::size_t>(m)] = m * std::log(0.5 * rho) + (n - m) * std::log1p(-rho);
  const double pout = truncation_probability(n, k);
  double lp_ones = lp_in[static_cast<std::size_t>(k)];
  if (pout > 0.0) lp_ones = std::log(std::exp(lp_ones) + pout);

  const auto W = symmetrize(Z);
  const std::size_t A = amplitudes.size(), nb = static_cast<std::size_t>(2 * hi + 1);
  std::vector<LogSumExp> bins(A * nb);
  std::uint64_t enumerated = 0;
  SupportWalker walker(n, W);
  walker.run(lo, hi, v, [&](long m, double T, long ov, bool ones) {
    const double lprior = (ones && m == k) ? lp_ones : lp_in[static_cast<std::size_t>(m)];
    const double dm = static_cast<double>(m), dov = static_cast<double>(ov);
    const double shift = dov * dov * dov - 0.5 * dm * dm * dm;
    const std::size_t b = static_cast<std::size_t>(ov + hi);
    for (std::size_t i = 0; i < A; ++i) {
      const double a = amplitudes[i];
      bins[i * nb + b].add(lprior + a * a * shift + a * T);
    }
    ++enumerated;
  });
  std::vector<InnerSums> out(A);
  for (std::size_t i = 0; i < A; ++i) {
    out[i].min_overlap = -hi;
    out[i].enumerated = enumerated;
    out[i].log_sum.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) out[i].log_sum[b] = bins[i * nb + b].value();
  }
  return out;
}

InnerSums quenched_inner_log_sums(long n, long k, double a, const std::vector<double>& v, const NoiseTensor3& Z,
                                  std::uint64_t budget) {
  return quenched_inner_log_sums_multi(n, k, {a}, v, Z, budget).front();
}

std::vector<std::vector<QuenchedEstimate>> quenched_fp_mc_multi(const PriorModel& prior,
                                                                const std::vector<double>& amplitudes,
                                                                const std::vector<long>& q_primes,
                                                                std::size_t replicas, const Rng& rng,
                                                                std::uint64_t budget) {
  if (prior.kind != PriorKind::truncated_sparse_tensor3)
    throw ValidationError("quenched FP is implemented for the truncated order-3 model only");
  if (prior.n > 24 || prior.k > 5) throw BudgetError("quenched FP requires n <= 24 and k <= 5");
  if (replicas < 2) throw ValidationError("at least two outer replicas are required");
  for (long qp : q_primes)
    if (qp < 0) throw ValidationError("q' must be a nonnegative integer");

  const std::size_t A = amplitudes.size(), Q = q_primes.size();
  std::vector<double> f(replicas * A * Q), diff(replicas * A * Q);
  std::vector<std::uint64_t> sizes(replicas);
  parallel_chunks(replicas, [&](std::size_t rep) {
    Rng local = rng.split(rep);
    const Latent lat = sample_latent(prior, local);
    const NoiseTensor3 Z = sample_noise3(prior.n, local);
    const auto all = quenched_inner_log_sums_multi(prior.n, prior.k, amplitudes, lat.v, Z, budget);
    sizes[rep] = all.front().enumerated;
    for (std::size_t ai = 0; ai < A; ++ai) {
      const InnerSums& sums = all[ai];
      auto log_sum_at = [&](long qp) {
        const long idx = qp - sums.min_overlap;
        if (idx < 0 || idx >= static_cast<long>(sums.log_sum.size()) ||
            sums.log_sum[static_cast<std::size_t>(idx)] == kNegInf)
          throw DomainError("empty overlap class q'=" + std::to_string(qp) + " for a replica");
        return sums.log_sum[static_cast<std::size_t>(idx)];
      };
      const double f0 = -log_sum_at(0);
      for (std::size_t i = 0; i < Q; ++i) {
        const double fi = -log_sum_at(q_primes[i]);
        f[(rep * A + ai) * Q + i] = fi;
        diff[(rep * A + ai) * Q + i] = fi - f0;
      }
    }
  });
  std::vector<std::vector<QuenchedEstimate>> out(A);
  for (std::size_t ai = 0; ai < A; ++ai) {
    for (std::size_t i = 0; i < Q; ++i) {
      std::vector<double> fi(replicas), di(replicas);
      for (std::size_t rep = 0; rep < replicas; ++rep) {
        fi[rep] = f[(rep * A + ai) * Q + i];
        di[rep] = diff[(rep * A + ai) * Q + i];
      }
      const auto mf = mean_stderr(fi);
      const auto md = mean_stderr(di);
      QuenchedEstimate e;
      e.amplitude = amplitudes[ai];
      e.q_prime = q_primes[i];
      e.q = std::pow(static_cast<double>(q_primes[i]), 3);
      e.f_mean = mf.mean;
      e.stderr_ = mf.stderr_;
      e.diff_mean = md.mean;
      e.diff_stderr = md.stderr_;
      e.replicas = replicas;
      e.inner_size = sizes.front();
      out[ai].push_back(e);
    }
  }
  return out;
}

std::vector<QuenchedEstimate> quenched_fp_mc(const PriorModel& prior, double amplitude, const std::vector<long>& q_primes,
                                             std::size_t replicas, const Rng& rng, std::uint64_t budget) {
  if (!(amplitude >= 0.0)) throw ValidationError("amplitude must be >= 0");
  return quenched_fp_mc_multi(prior, {amplitude}, q_primes, replicas, rng, budget).front();
}

GammaCurveEstimate gamma_max(const std::vector<double>& v, const NoiseTensor3& Z, long q_prime, long m,
                             std::uint64_t budget) {
  const long n = Z.n;
  check_latent(n, v, Z);
  if (m < 1 || m > n) throw ValidationError("support size m must satisfy 1 <= m <= n");
  const double count = std::exp(log_binomial(n, m) + m * kLn2);
  if (count > static_cast<double>(budget))
    throw BudgetError("Gamma enumeration needs " + format_double(count) + " candidates, budget " + std::to_string(budget));
  const auto W = symmetrize(Z);
  GammaCurveEstimate out;
  out.q_prime = q_prime;
  out.m = m;
  out.max_value = kNegInf;
  SupportWalker walker(n, W);
  walker.run(m, m, v, [&](long, double T, long ov, bool) {
    if (ov != q_prime) return;
    ++out.candidates;
    out.max_value = std::max(out.max_value, T);
  });
  return out;
}

double gamma_zero_lower_bound(long n, long m, double A) {
  const double inner = 2.0 * log_binomial(n, m) - std::log(m * std::log(static_cast<double>(n) / m)) - A;
  if (inner <= 0.0) return 0.0;
  return std::sqrt(std::pow(static_cast<double>(m), 3)) * std::sqrt(inner);
}

}  // namespace fpld
