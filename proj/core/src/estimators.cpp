#include "fpld/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "fpld/overlap.hpp"
#include "fpld/parallel.hpp"

namespace fpld {

TruncExpValue truncated_exp_checked(double x, int D) {
  if (D < 0) throw ValidationError("truncation degree must be >= 0");
  TruncExpValue out;
  if (std::fabs(x) > 700.0) {
    out.flagged = true;
    const double lx = std::log(std::fabs(x));
    CompensatedSum s;
    for (int k = 0; k <= D; ++k) {
      const double mag = std::exp(k * lx - log_factorial(k));
      s.add((x < 0 && (k % 2 == 1)) ? -mag : mag);
    }
    out.value = s.value();
    return out;
  }
  CompensatedSum s;
  double term = 1.0;
  s.add(term);
  for (int k = 1; k <= D; ++k) {
    term *= x / k;
    s.add(term);
  }
  out.value = s.value();
  return out;
}

double truncated_exp(double x, int D) { return truncated_exp_checked(x, D).value; }

HermiteEvaluator::HermiteEvaluator(int max_degree) : max_degree_(max_degree), work_(static_cast<std::size_t>(max_degree) + 1) {
  if (max_degree < 0) throw ValidationError("Hermite degree must be >= 0");
}

const std::vector<double>& HermiteEvaluator::table(double z) {
  work_[0] = 1.0;
  if (max_degree_ >= 1) work_[1] = z;
  for (int k = 1; k < max_degree_; ++k)
    work_[static_cast<std::size_t>(k) + 1] = z * work_[static_cast<std::size_t>(k)] - k * work_[static_cast<std::size_t>(k) - 1];
  return work_;
}

double HermiteEvaluator::operator()(int k, double z) {
  if (k < 0 || k > max_degree_) throw ValidationError("Hermite degree out of range");
  return table(z)[static_cast<std::size_t>(k)];
}

double hermite_he(int k, double z) {
  HermiteEvaluator h(std::max(k, 0));
  return h(k, z);
}

double hermite(const MultiIndex& alpha, const std::vector<double>& y) {
  if (alpha.size() != y.size()) throw ValidationError("Hermite multi-index and point dimensions differ");
  double r = 1.0;
  for (std::size_t j = 0; j < y.size(); ++j)
    if (alpha[j] != 0) r *= hermite_he(alpha[j], y[j]);
  return r;
}

double weight_w(const std::vector<double>& y, const std::vector<double>& x, int D) {
  if (y.size() != x.size()) throw ValidationError("weight W needs equal-length y and x");
  if (D < 0) throw ValidationError("degree D must be >= 0");
  HermiteEvaluator h(D);
  std::vector<double> poly(static_cast<std::size_t>(D) + 1, 0.0), next(poly.size()), term(poly.size());
  poly[0] = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) continue;
    const auto& hj = h.table(y[j]);
    double c = 1.0;  // x^a / a!
    for (int a = 0; a <= D; ++a) {
      if (a > 0) c *= x[j] / a;
      term[static_cast<std::size_t>(a)] = c * hj[static_cast<std::size_t>(a)];
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (int d = 0; d <= D; ++d) {
      if (poly[static_cast<std::size_t>(d)] == 0.0) continue;
      for (int a = 0; a + d <= D; ++a)
        next[static_cast<std::size_t>(d + a)] += poly[static_cast<std::size_t>(d)] * term[static_cast<std::size_t>(a)];
    }
    poly.swap(next);
  }
  CompensatedSum s;
  for (double c : poly) s.add(c);
  return s.value();
}

double weight_w_enumerated(const std::vector<double>& y, const std::vector<double>& x, int D, std::size_t budget) {
  if (y.size() != x.size()) throw ValidationError("weight W needs equal-length y and x");
  std::vector<std::size_t> supp;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] != 0.0) supp.push_back(j);
  if (count_multi_indices(supp.size(), D) > budget) throw BudgetError("weight W enumeration exceeds budget");
  std::vector<double> xs, ys;
  for (auto j : supp) {
    xs.push_back(x[j]);
    ys.push_back(y[j]);
  }
  CompensatedSum s;
  for (const auto& a : enumerate_multi_indices(supp.size(), D)) s.add(a.power_of(xs) * hermite(a, ys) / a.factorial());
  return s.value();
}

ReferenceSet make_reference_set(const PriorModel& prior, std::size_t M, std::uint64_t seed) {
  if (M < 1) throw ValidationError("reference set size must be >= 1");
  ReferenceSet ref;
  ref.seed = seed;
  Rng rng(seed);
  ref.X.reserve(M);
  for (std::size_t i = 0; i < M; ++i) ref.X.push_back(sample_signal(prior, rng).flat);
  return ref;
}

std::vector<double> materialized_estimator(const GamInstance& gam, const ReferenceSet& refset,
                                           const std::vector<double>& y, int D) {
  const std::size_t N = gam.ambient_dim();
  if (N > 50) throw BudgetError("materialized estimator supports ambient dimension <= 50");
  if (D > 4) throw BudgetError("materialized estimator supports D <= 4");
  if (y.size() != N) throw ValidationError("observation has wrong dimension");
  if (refset.X.empty()) throw ValidationError("empty reference set");
  const double a = std::sqrt(gam.snr);
  std::vector<CompensatedSum> acc(N);
  std::vector<double> xs(N);
  for (const auto& X : refset.X) {
    for (std::size_t i = 0; i < N; ++i) xs[i] = a * X[i];
    const double w = weight_w(y, xs, D);
    for (std::size_t i = 0; i < N; ++i) acc[i].add(w * xs[i]);
  }
  std::vector<double> p(N);
  const double M = static_cast<double>(refset.X.size());
  for (std::size_t i = 0; i < N; ++i) p[i] = acc[i].value() / M;
  return p;
}

CorrBoundEstimate corr_lower_bound_overlap(const PriorModel& prior, double lambda, int D, std::size_t M_ov,
                                           const Rng& rng) {
  if (M_ov < 1000) throw ValidationError("M_ov must be >= 1000");
  if (D < 0) throw ValidationError("degree D must be >= 0");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  CorrBoundEstimate out;
  out.D = D;
  out.lambda = lambda;
  out.m_num = out.m_den = M_ov;

  std::vector<double> g(M_ov), h(M_ov);
  std::vector<char> flag(kMcChunks, 0);
  const std::size_t chunks = kMcChunks;
  const Rng num_rng = rng.split(1), den_rng = rng.split(2);
  parallel_chunks(chunks, [&](std::size_t c) {
    Rng rn = num_rng.split(c), rd = den_rng.split(c);
    const std::size_t begin = M_ov * c / chunks, end = M_ov * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      const double A = sample_overlap(prior, rn);
      const auto tn = truncated_exp_checked(lambda * A, D);
      g[i] = A * tn.value;
      const Latent x = sample_latent(prior, rd), x1 = sample_latent(prior, rd), x2 = sample_latent(prior, rd);
      const double S = std::fabs(latent_overlap(prior, x1, x2)) + std::fabs(latent_overlap(prior, x, x1)) +
                       std::fabs(latent_overlap(prior, x, x2));
      const auto td = truncated_exp_checked(lambda * S, 3 * D);
      h[i] = S * td.value;
      if (tn.flagged || td.flagged) flag[c] = 1;
    }
  });
  out.flagged = std::any_of(flag.begin(), flag.end(), [](char f) { return f != 0; });
  const auto mn = mean_stderr(g), md = mean_stderr(h);
  out.numerator = mn.mean;
  out.se_num = mn.stderr_;
  out.denominator = md.mean;
  out.se_den = md.stderr_;
  if (!(out.denominator > 0.0)) {
    out.flagged = true;
    return out;
  }
  out.has_ratio = true;
  const double sd = std::sqrt(out.denominator);
  out.ratio = out.numerator / (2.0 * sd);
  const double dn = 1.0 / (2.0 * sd);
  const double dd = -out.numerator / (4.0 * out.denominator * sd);
  out.se_ratio = std::sqrt(dn * dn * out.se_num * out.se_num + dd * dd * out.se_den * out.se_den);

  // Grouped jackknife over contiguous blocks of both sample sets.
  constexpr std::size_t G = 20;
  std::vector<double> gs(G, 0.0), hs(G, 0.0), cnt(G, 0.0);
  for (std::size_t i = 0; i < M_ov; ++i) {
    const std::size_t b = i * G / M_ov;
    gs[b] += g[i];
    hs[b] += h[i];
    cnt[b] += 1.0;
  }
  const double gt = pairwise_sum(gs), ht = pairwise_sum(hs), nt = pairwise_sum(cnt);
  std::vector<double> theta(G);
  bool ok = true;
  for (std::size_t b = 0; b < G; ++b) {
    const double n = nt - cnt[b];
    const double den = (ht - hs[b]) / n;
    if (!(den > 0.0)) ok = false;
    theta[b] = ((gt - gs[b]) / n) / (2.0 * std::sqrt(std::max(den, 1e-300)));
  }
  if (ok) {
    const double tbar = pairwise_sum(theta) / G;
    out.ratio_jackknife = G * out.ratio - (G - 1.0) * tbar;
    double ss = 0.0;
    for (double t : theta) ss += (t - tbar) * (t - tbar);
    out.se_jackknife = std::sqrt((G - 1.0) / G * ss);
  }
  const double pos = std::max(out.ratio, 0.0);
  out.lower_sq = pos * pos;
  out.se_lower_sq = 2.0 * pos * out.se_ratio;
  return out;
}

std::vector<MonotoneLowerBound> monotone_envelope(const std::vector<CorrBoundEstimate>& ascending) {
  std::vector<MonotoneLowerBound> out;
  double best_lcl = -std::numeric_limits<double>::infinity();
  MonotoneLowerBound cur;
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    const auto& e = ascending[i];
    if (i > 0 && e.lambda < ascending[i - 1].lambda) throw ValidationError("lambda grid must be ascending");
    if (e.has_ratio && e.lower_sq - 3.0 * e.se_lower_sq > best_lcl) {
      best_lcl = e.lower_sq - 3.0 * e.se_lower_sq;
      cur.lower_sq = e.lower_sq;
      cur.se_lower_sq = e.se_lower_sq;
      cur.source_lambda = e.lambda;
    }
    cur.lambda = e.lambda;
    out.push_back(cur);
  }
  return out;
}

ExpTruncationGap exp_truncation_gap(const std::vector<double>& samples, double scale, int D, double C_t,
                                    const std::function<double(double)>& lp_norm) {
  if (samples.size() < 2) throw ValidationError("need at least two samples");
  if (D < 0) throw ValidationError("degree D must be >= 0");
  if (!(C_t > 0.0)) throw ValidationError("C_t must be positive");
  ExpTruncationGap out;
  std::vector<double> V(samples.size());
  for (std::size_t i = 0; i < V.size(); ++i) V[i] = scale * samples[i];
  const auto dist = OverlapDistribution::from_samples(V);
  const auto qr = quantile_detail(dist, C_t * D > 0 ? C_t * D : 1e-12);
  out.q = qr.value;
  out.q_saturated = qr.saturated;
  std::vector<double> diff(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) {
    const double v = V[i];
    const double trunc = v * truncated_exp(v, D);
    const double full = std::fabs(v) <= out.q ? v * std::exp(v) : 0.0;
    diff[i] = trunc - full;
  }
  const auto ms = mean_stderr(diff);
  out.gap = std::fabs(ms.mean);
  out.gap_stderr = ms.stderr_;
  auto norm = [&](double p) {
    if (lp_norm) return lp_norm(p);
    CompensatedSum s;
    for (double v : V) s.add(std::pow(std::fabs(v), p));
    return std::pow(s.value() / static_cast<double>(V.size()), 1.0 / p);
  };
  out.remainder_term = std::exp(out.q) * std::pow(norm(D + 2.0), D + 2.0) / std::exp(log_factorial(D + 1.0));
  CompensatedSum tail;
  for (int k = 0; k <= D; ++k) tail.add(std::pow(norm(2.0 * k + 2.0), k + 1.0) / std::exp(log_factorial(k)));
  out.tail_term = std::exp(-0.5 * C_t * D) * tail.value();
  out.bound = out.remainder_term + out.tail_term;
  out.holds = out.gap <= out.bound + 3.0 * out.gap_stderr;
  return out;
}

}  // namespace fpld
