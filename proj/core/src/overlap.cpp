#include "fpld/overlap.hpp"

#include <algorithm>
#include <cmath>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "fpld/parallel.hpp"
#include "fpld/specfun.hpp"

namespace fpld {

namespace {

constexpr double kFlushLog = -745.0;

bool same_atom(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(a)); }

double signed_root(double q, int r) {
  if (r == 1) return q;
  const double t = std::pow(std::fabs(q), 1.0 / r);
  return q < 0 ? -t : t;
}

double int_pow(double s, int r) {
  double out = 1.0;
  for (int i = 0; i < r; ++i) out *= s;
  return out;
}

// log P(A_t = s) for a length-t Rademacher walk.
double log_walk(long t, long s) {
  if (std::labs(s) > t || ((t + s) & 1L) != 0) return kNegInf;
  return log_binomial(static_cast<double>(t), 0.5 * static_cast<double>(t + s)) - static_cast<double>(t) * kLn2;
}

// log P(I = i) for I ~ Hypergeometric(population n, m marked, m' drawn).
double log_hypergeom(long n, long m, long mp, long i) {
  if (i < 0 || i > m || i > mp || mp - i > n - m) return kNegInf;
  return log_binomial(static_cast<double>(m), static_cast<double>(i)) +
         log_binomial(static_cast<double>(n - m), static_cast<double>(mp - i)) -
         log_binomial(static_cast<double>(n), static_cast<double>(mp));
}

double binom_log_pmf(long n, double p, long t) {
  if (p <= 0.0) return t == 0 ? 0.0 : kNegInf;
  if (p >= 1.0) return t == n ? 0.0 : kNegInf;
  return log_binomial(static_cast<double>(n), static_cast<double>(t)) + t * std::log(p) + (n - t) * std::log1p(-p);
}

// Maps latent atoms s -> s^r, merging atoms that collide.
OverlapDistribution power_map(const OverlapDistribution& latent, int r) {
  std::map<double, LogSumExp> merged;
  for (std::size_t i = 0; i < latent.atoms().size(); ++i) merged[int_pow(latent.atoms()[i], r)].add(latent.log_probs()[i]);
  std::vector<double> atoms, lp;
  for (auto& [a, l] : merged) {
    atoms.push_back(a);
    lp.push_back(l.value());
  }
  return OverlapDistribution::from_log_pmf(std::move(atoms), std::move(lp));
}

}  // namespace

OverlapDistribution OverlapDistribution::from_log_pmf(std::vector<double> atoms, std::vector<double> log_probs) {
  if (atoms.size() != log_probs.size() || atoms.empty())
    throw ValidationError("pmf requires equal-length, nonempty atom and probability lists");
  std::vector<std::size_t> order(atoms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  OverlapDistribution d;
  d.mode_ = OverlapMode::exact_pmf;
  for (std::size_t idx : order) {
    double lp = log_probs[idx];
    if (lp < kFlushLog) {
      if (lp != kNegInf) d.flushed_ = true;
      continue;
    }
    if (!d.atoms_.empty() && same_atom(d.atoms_.back(), atoms[idx])) {
      LogSumExp acc;
      acc.add(d.log_probs_.back());
      acc.add(lp);
      d.log_probs_.back() = acc.value();
    } else {
      d.atoms_.push_back(atoms[idx]);
      d.log_probs_.push_back(lp);
    }
  }
  if (d.atoms_.empty()) throw ValidationError("pmf has no atom with positive mass");
  const double total = std::exp(log_sum_exp(d.log_probs_));
  if (std::fabs(total - 1.0) > 1e-12 && !d.flushed_)
    throw ValidationError("pmf does not sum to one (total " + format_double(total) + ")");

  // |A| atoms and upper tails.
  std::map<double, LogSumExp> abs_mass;
  for (std::size_t i = 0; i < d.atoms_.size(); ++i) abs_mass[std::fabs(d.atoms_[i])].add(d.log_probs_[i]);
  std::vector<double> masses;
  for (auto& [a, l] : abs_mass) {
    if (!d.abs_atoms_.empty() && same_atom(d.abs_atoms_.back(), a)) {
      LogSumExp acc;
      acc.add(masses.back());
      acc.add(l.value());
      masses.back() = acc.value();
      continue;
    }
    d.abs_atoms_.push_back(a);
    masses.push_back(l.value());
  }
  d.abs_log_tail_.assign(masses.size(), kNegInf);
  LogSumExp tail;
  for (std::size_t j = masses.size(); j-- > 0;) {
    d.abs_log_tail_[j] = tail.value();
    tail.add(masses[j]);
  }
  return d;
}

OverlapDistribution OverlapDistribution::from_samples(std::vector<double> samples) {
  if (samples.size() < 2) throw ValidationError("empirical overlap requires at least two samples");
  OverlapDistribution d;
  d.mode_ = OverlapMode::empirical;
  std::sort(samples.begin(), samples.end());
  d.samples_ = std::move(samples);
  d.abs_sorted_.resize(d.samples_.size());
  for (std::size_t i = 0; i < d.samples_.size(); ++i) d.abs_sorted_[i] = std::fabs(d.samples_[i]);
  std::sort(d.abs_sorted_.begin(), d.abs_sorted_.end());
  return d;
}

OverlapDistribution OverlapDistribution::gaussian_tensor_analytic(long d, int r) {
  if (d < 1) throw ValidationError("dimension must be >= 1");
  if (r < 1) throw ValidationError("order must be >= 1");
  OverlapDistribution out;
  out.mode_ = OverlapMode::analytic_density;
  out.d_ = d;
  out.r_ = r;
  return out;
}

double OverlapDistribution::log_prob(double q) const {
  if (mode_ != OverlapMode::exact_pmf) throw ValidationError("log_prob requires an exact pmf");
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), q - 1e-9 * std::max(1.0, std::fabs(q)));
  if (it != atoms_.end() && same_atom(*it, q)) return log_probs_[static_cast<std::size_t>(it - atoms_.begin())];
  return kNegInf;
}

bool OverlapDistribution::has_atom(double q) const { return log_prob(q) != kNegInf; }

double OverlapDistribution::log_density(double q) const {
  if (mode_ != OverlapMode::analytic_density) throw ValidationError("log_density requires an analytic density");
  return log_inner_product_density(static_cast<int>(d_), signed_root(q, r_));
}

double OverlapDistribution::log_density_derivative(double q) const {
  if (mode_ != OverlapMode::analytic_density)
    throw ValidationError("log_density_derivative requires an analytic density");
  if (q == 0.0) throw DomainError("log-density derivative undefined at overlap 0");
  const double t = signed_root(q, r_);
  const double at = std::fabs(t);
  const double g = log_density_derivative_gaussian_overlap(static_cast<int>(d_), at) * (t < 0 ? -1.0 : 1.0);
  const double dt_dq = std::pow(at, 1 - r_) / r_;
  return g * dt_dq;
}

double OverlapDistribution::log_abs_tail_latent(double y) const {
  if (mode_ != OverlapMode::analytic_density) throw ValidationError("tail requires an analytic density");
  if (y < 0.0) return 0.0;
  const int d = static_cast<int>(d_);
  auto lf = [d](double t) { return log_inner_product_density(d, t); };
  // density of |S| on (0, inf) is decreasing; integrate from y until it has
  // dropped by e^-50 relative to f(y).
  double lo = y;
  if (lo == 0.0) lo = 0.0;
  const double ref = (y == 0.0 && d == 1) ? lf(1e-300) : lf(std::max(y, 1e-300));
  double width = std::max(1.0, std::sqrt(static_cast<double>(d)));
  while (lf(lo + width) > ref - 50.0) width *= 2.0;
  const double v = tanh_sinh([&](double t) { return t <= 0.0 ? 0.0 : std::exp(lf(t) - ref); }, lo, lo + width, 1e-11, 10);
  return kLn2 + ref + std::log(v);
}

QuantileResult quantile_detail(const OverlapDistribution& dist, double D) {
  if (!(D > 0.0)) throw ValidationError("quantile level D must be positive");
  QuantileResult res;
  switch (dist.mode()) {
    case OverlapMode::exact_pmf: {
      const auto& a = dist.abs_atoms();
      const auto& tail = dist.abs_log_tail();
      for (std::size_t j = 0; j < a.size(); ++j)
        if (tail[j] <= -D) {
          res.value = a[j];
          return res;
        }
      res.value = a.back();
      return res;
    }
    case OverlapMode::empirical: {
      const auto& s = dist.abs_sorted();
      const double M = static_cast<double>(s.size());
      if (std::exp(-D) * M < 1.0) {
        res.value = s.back();
        res.saturated = true;
        return res;
      }
      auto j = static_cast<std::size_t>(std::ceil(-std::expm1(-D) * M));
      j = std::clamp<std::size_t>(j, 1, s.size());
      res.value = s[j - 1];
      return res;
    }
    case OverlapMode::analytic_density: {
      // Solve log P(|S| > y) = -D for y, then q = y^r.
      auto g = [&](double y) { return dist.log_abs_tail_latent(y) + D; };
      const double d = static_cast<double>(dist.dimension());
      double hi = std::sqrt(2.0 * d * D) + 2.0 * D + 1.0;
      while (g(hi) > 0.0) hi *= 2.0;
      double lo = 0.0;
      if (dist.dimension() == 1) lo = 1e-300;
      if (g(lo) <= 0.0) {
        res.value = 0.0;
        return res;
      }
      // Safeguarded Newton on the log tail: d/dy log tail = -2 f(y) / tail.
      double y = std::min(std::sqrt(2.0 * d * D) + D, 0.5 * (lo + hi));
      for (int it = 0; it < 100; ++it) {
        const double gy = g(y);
        if (gy > 0.0) lo = y; else hi = y;
        if (std::fabs(gy) < 1e-12 || (hi - lo) < 1e-12 * std::max(1.0, hi)) break;
        const double slope = -std::exp(kLn2 + log_inner_product_density(static_cast<int>(dist.dimension()), y) -
                                       (gy - D));
        double next = y - gy / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        y = next;
      }
      res.value = int_pow(y, dist.order());
      return res;
    }
  }
  return res;
}

double quantile(const OverlapDistribution& dist, double D) { return quantile_detail(dist, D).value; }

double QuantileFn::operator()(double D) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(D); it != cache_.end()) return it->second;
  }
  const double v = quantile(*dist_, D);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(D, v);
  return v;
}

SpeedFunction tensor_speed(int r) {
  if (r < 1) throw ValidationError("tensor order must be >= 1");
  SpeedFunction f;
  f.name = "tensor(r=" + std::to_string(r) + ")";
  f.step = [r](double q) {
    const double s = std::round(signed_root(q, r));
    return int_pow(s + 2.0, r) - int_pow(s, r);
  };
  return f;
}

SpeedFunction nearest_atom_speed(const OverlapDistribution& dist) {
  if (dist.mode() != OverlapMode::exact_pmf) throw ValidationError("nearest-atom speed requires an exact pmf");
  auto atoms = std::make_shared<std::vector<double>>(dist.atoms());
  SpeedFunction f;
  f.name = "nearest_atom";
  f.step = [atoms](double q) {
    auto it = std::upper_bound(atoms->begin(), atoms->end(), q + 1e-9 * std::max(1.0, std::fabs(q)));
    if (it == atoms->end()) throw DomainError("no atom above " + format_double(q));
    return *it - q;
  };
  return f;
}

double discrete_log_pmf_diff(const OverlapDistribution& dist, double q, const SpeedFunction& speed) {
  if (dist.mode() != OverlapMode::exact_pmf) throw ValidationError("discrete difference requires an exact pmf");
  const double a = speed(q);
  if (!(a > 0.0)) throw DomainError("speed function must be positive at " + format_double(q));
  const double l0 = dist.log_prob(q);
  const double l1 = dist.log_prob(q + a);
  if (l0 == kNegInf) throw DomainError("overlap atom " + format_double(q) + " has zero mass");
  if (l1 == kNegInf) throw DomainError("overlap atom " + format_double(q + a) + " has zero mass");
  return (l1 - l0) / a;
}

OverlapDistribution exact_pmf_sparse_rademacher_latent(long n, long k) {
  if (n < 1 || k < 1 || k > n) throw ValidationError("sparse Rademacher overlap requires 1 <= k <= n");
  const double rho = static_cast<double>(k) / static_cast<double>(n);
  const double p = rho * rho;
  // Restrict T to where its mass is not flushed.
  std::vector<double> lt(static_cast<std::size_t>(n) + 1);
  double lmax = kNegInf;
  for (long t = 0; t <= n; ++t) {
    lt[static_cast<std::size_t>(t)] = binom_log_pmf(n, p, t);
    lmax = std::max(lmax, lt[static_cast<std::size_t>(t)]);
  }
  long tmax = 0;
  for (long t = 0; t <= n; ++t)
    if (lt[static_cast<std::size_t>(t)] > lmax - 800.0) tmax = t;
  // Rows are renormalized so lgamma rounding at large n does not leak into the total mass.
  const double lt_norm = log_sum_exp(lt);
  std::vector<LogSumExp> acc(static_cast<std::size_t>(2 * tmax + 1));
  std::vector<double> row;
  for (long t = 0; t <= tmax; ++t) {
    const double ltt = lt[static_cast<std::size_t>(t)] - lt_norm;
    if (ltt < lmax - lt_norm - 800.0) continue;
    row.clear();
    for (long s = -t; s <= t; s += 2) row.push_back(log_walk(t, s));
    const double row_norm = log_sum_exp(row);
    for (long s = -t, j = 0; s <= t; s += 2, ++j)
      acc[static_cast<std::size_t>(s + tmax)].add(ltt + row[static_cast<std::size_t>(j)] - row_norm);
  }
  std::vector<double> atoms, lps;
  for (long s = -tmax; s <= tmax; ++s) {
    atoms.push_back(static_cast<double>(s));
    lps.push_back(acc[static_cast<std::size_t>(s + tmax)].value());
  }
  return OverlapDistribution::from_log_pmf(std::move(atoms), std::move(lps));
}

OverlapDistribution exact_pmf_sparse_rademacher(long n, long k, int r) {
  if (r < 1) throw ValidationError("order must be >= 1");
  auto latent = exact_pmf_sparse_rademacher_latent(n, k);
  return r == 1 ? latent : power_map(latent, r);
}

OverlapDistribution exact_pmf_truncated_latent(long n, long k) {
  if (n < 1 || k < 1 || k > n) throw ValidationError("truncated model requires 1 <= k <= n");
  const double rho = static_cast<double>(k) / static_cast<double>(n);
  const long lo = (k + 1) / 2, hi = std::min(2 * k, n);
  const double pout = truncation_probability(n, k);
  std::vector<double> lw(static_cast<std::size_t>(hi + 1), kNegInf);
  for (long m = lo; m <= hi; ++m) lw[static_cast<std::size_t>(m)] = binom_log_pmf(n, rho, m);

  // Overlap mixture for supports of sizes (m, m') placed uniformly at random
  // with independent uniform signs on at least one side.
  auto mix = [&](long m, long mp, double lweight, std::map<long, LogSumExp>& acc) {
    for (long i = 0; i <= std::min(m, mp); ++i) {
      const double lh = log_hypergeom(n, m, mp, i);
      if (lh == kNegInf) continue;
      for (long s = -i; s <= i; s += 2) acc[s].add(lweight + lh + log_walk(i, s));
    }
  };
  std::map<long, LogSumExp> acc;
  for (long m = lo; m <= hi; ++m)
    for (long mp = lo; mp <= hi; ++mp) mix(m, mp, lw[static_cast<std::size_t>(m)] + lw[static_cast<std::size_t>(mp)], acc);
  if (pout > 0.0) {
    const double lpo = std::log(pout);
    for (long mp = lo; mp <= hi; ++mp) mix(k, mp, kLn2 + lpo + lw[static_cast<std::size_t>(mp)], acc);
    acc[k].add(2.0 * lpo);
  }
  std::vector<double> atoms, lps;
  for (auto& [s, l] : acc) {
    atoms.push_back(static_cast<double>(s));
    lps.push_back(l.value());
  }
  return OverlapDistribution::from_log_pmf(std::move(atoms), std::move(lps));
}

OverlapDistribution exact_pmf_truncated(long n, long k) { return power_map(exact_pmf_truncated_latent(n, k), 3); }

OverlapDistribution exact_pmf_discrete(const PriorModel& prior) {
  if (prior.kind != PriorKind::discrete_atoms) throw ValidationError("expected a discrete_atoms prior");
  std::vector<double> atoms, lps;
  const std::size_t A = prior.atoms.size();
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t b = 0; b < A; ++b) {
      if (prior.probs[a] == 0.0 || prior.probs[b] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < prior.atoms[a].size(); ++i) dot += prior.atoms[a][i] * prior.atoms[b][i];
      atoms.push_back(dot);
      lps.push_back(std::log(prior.probs[a]) + std::log(prior.probs[b]));
    }
  return OverlapDistribution::from_log_pmf(std::move(atoms), std::move(lps));
}

OverlapDistribution exact_overlap(const PriorModel& prior) {
  switch (prior.kind) {
    case PriorKind::sparse_rademacher_tensor:
      return exact_pmf_sparse_rademacher(prior.n, prior.k, prior.r);
    case PriorKind::truncated_sparse_tensor3:
      return exact_pmf_truncated(prior.n, prior.k);
    case PriorKind::discrete_atoms:
      return exact_pmf_discrete(prior);
    case PriorKind::gaussian_tensor:
      return OverlapDistribution::gaussian_tensor_analytic(prior.n, prior.r);
    case PriorKind::sparse_clustering:
      throw ValidationError("no exact overlap law for sparse_clustering; use empirical_overlap");
  }
  throw ValidationError("unknown prior kind");
}

double sample_overlap(const PriorModel& prior, Rng& rng) {
  switch (prior.kind) {
    case PriorKind::gaussian_tensor: {
      const double d = static_cast<double>(prior.n);
      const double s = 0.5 * (sample_chi_square(rng, d) - sample_chi_square(rng, d));
      return int_pow(s, prior.r);
    }
    case PriorKind::sparse_rademacher_tensor: {
      const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
      const auto t = sample_binomial(rng, static_cast<std::uint64_t>(prior.n), rho * rho);
      const double s = 2.0 * static_cast<double>(sample_binomial(rng, t, 0.5)) - static_cast<double>(t);
      return int_pow(s, prior.r);
    }
    case PriorKind::sparse_clustering: {
      const double a = 2.0 * static_cast<double>(sample_binomial(rng, static_cast<std::uint64_t>(prior.n), 0.5)) -
                       static_cast<double>(prior.n);
      const double rho = static_cast<double>(prior.s) / static_cast<double>(prior.p);
      const auto u = sample_binomial(rng, static_cast<std::uint64_t>(prior.p), rho * rho);
      double b = 0.0;
      if (u > 0) b = 0.5 * (sample_chi_square(rng, static_cast<double>(u)) - sample_chi_square(rng, static_cast<double>(u)));
      return a * b;
    }
    default: {
      const Latent x = sample_latent(prior, rng);
      const Latent y = sample_latent(prior, rng);
      return latent_overlap(prior, x, y);
    }
  }
}

namespace {

template <class Draw>
std::vector<double> chunked_draws(std::size_t M, const Rng& rng, Draw draw) {
  std::vector<double> out(M);
  const std::size_t chunks = std::min<std::size_t>(kMcChunks, M);
  parallel_chunks(chunks, [&](std::size_t c) {
    Rng local = rng.split(c);
    const std::size_t begin = M * c / chunks, end = M * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) out[i] = draw(local);
  });
  return out;
}

}  // namespace

OverlapDistribution empirical_overlap(const PriorModel& prior, std::size_t M, const Rng& rng) {
  if (M < 2) throw ValidationError("M_ov must be >= 2");
  return OverlapDistribution::from_samples(chunked_draws(M, rng, [&](Rng& r) { return sample_overlap(prior, r); }));
}

OverlapDistribution empirical_overlap_latent(const PriorModel& prior, std::size_t M, const Rng& rng) {
  if (M < 2) throw ValidationError("M_ov must be >= 2");
  return OverlapDistribution::from_samples(chunked_draws(M, rng, [&](Rng& r) {
    const Latent x = sample_latent(prior, r);
    const Latent y = sample_latent(prior, r);
    return latent_overlap(prior, x, y);
  }));
}

TripleOverlapSamples triple_overlap_samples(const PriorModel& prior, std::size_t M, const Rng& rng) {
  if (M < 2) throw ValidationError("M_ov must be >= 2");
  TripleOverlapSamples out;
  out.triple_sum.resize(M);
  out.pair.resize(M);
  const std::size_t chunks = std::min<std::size_t>(kMcChunks, M);
  parallel_chunks(chunks, [&](std::size_t c) {
    Rng local = rng.split(c);
    const std::size_t begin = M * c / chunks, end = M * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      const Latent x = sample_latent(prior, local);
      const Latent x1 = sample_latent(prior, local);
      const Latent x2 = sample_latent(prior, local);
      const double a01 = latent_overlap(prior, x, x1);
      out.pair[i] = a01;
      out.triple_sum[i] =
          std::fabs(latent_overlap(prior, x1, x2)) + std::fabs(a01) + std::fabs(latent_overlap(prior, x, x2));
    }
  });
  return out;
}

DensityDerivative analytic_log_density_derivative(const DensityFamily& family, double point) {
  if (point == 0.0) throw DomainError("log-density derivative is undefined at 0");
  DensityDerivative out;
  if (family.kind == DensityFamilyKind::gaussian_inner_product) {
    const double v = log_density_derivative_gaussian_overlap(static_cast<int>(family.d), std::fabs(point));
    out.value = point > 0 ? v : -v;
    return out;
  }
  const PriorModel prior = PriorModel::sparse_clustering(family.n, family.p, family.s, 1.0);
  const std::size_t M = family.mc_samples;
  if (M < 1000) throw ValidationError("kernel estimate needs at least 1000 samples");
  const auto dist = empirical_overlap(prior, M, Rng(family.seed));
  const auto& xs = dist.samples();
  const auto ms = mean_stderr(xs);
  const double sd = ms.stderr_ * std::sqrt(static_cast<double>(M));
  const double iqr = xs[3 * M / 4] - xs[M / 4];
  const double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(M), -0.2);
  out.bandwidth = h;
  out.step = 0.5 * h;
  // Per-group kernel sums at t +- step/2; samples are sorted, so groups take a
  // strided subset to stay exchangeable.
  constexpr std::size_t G = 16;
  std::vector<double> plus(G, 0.0), minus(G, 0.0);
  const double tp = point + 0.5 * out.step, tm = point - 0.5 * out.step;
  const auto first = std::lower_bound(xs.begin(), xs.end(), point - 40.0 * h);
  const auto last = std::upper_bound(xs.begin(), xs.end(), point + 40.0 * h);
  for (auto it = first; it != last; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double up = (tp - *it) / h, um = (tm - *it) / h;
    plus[i % G] += std::exp(-0.5 * up * up);
    minus[i % G] += std::exp(-0.5 * um * um);
  }
  double P = 0.0, Mi = 0.0;
  for (std::size_t g = 0; g < G; ++g) {
    P += plus[g];
    Mi += minus[g];
  }
  if (P <= 0.0 || Mi <= 0.0) throw DomainError("no samples near the requested point");
  out.value = (std::log(P) - std::log(Mi)) / out.step;
  std::vector<double> per;
  for (std::size_t g = 0; g < G; ++g)
    if (plus[g] > 0 && minus[g] > 0) per.push_back((std::log(plus[g]) - std::log(minus[g])) / out.step);
  if (per.size() > 1) out.stderr_ = mean_stderr(per).stderr_;
  return out;
}

std::string to_string(OverlapMode m) {
  switch (m) {
    case OverlapMode::exact_pmf: return "exact_pmf";
    case OverlapMode::analytic_density: return "analytic_density";
    case OverlapMode::empirical: return "empirical";
  }
  return "unknown";
}

}  // namespace fpld
