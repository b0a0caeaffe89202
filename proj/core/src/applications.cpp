#include "fpld/applications.hpp"

#include <algorithm>
#include <cmath>

#include "fpld/cumulants.hpp"
#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "fpld/overlap.hpp"
#include "fpld/parallel.hpp"

namespace fpld {

std::vector<int> diag_threshold(const std::vector<double>& diagonal, double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  std::vector<int> out(diagonal.size(), 0);
  for (std::size_t i = 0; i < diagonal.size(); ++i)
    if (std::fabs(diagonal[i]) >= tau) out[i] = diagonal[i] > 0.0 ? 1 : -1;
  return out;
}

double threshold_failure_bound(long n, long k) {
  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  return 2.0 * std::pow(dn, -2.0) + 4.0 * dk * std::pow(dn, -3.0) + 4.0 * dk * std::pow(dn, -27.0);
}

ThresholdTrial run_threshold_trials(long n, long k, double lambda, std::size_t trials, const Rng& rng, double tau) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  const PriorModel prior = PriorModel::truncated_sparse_tensor3(n, k);
  ThresholdTrial out;
  out.n = n;
  out.k = k;
  out.lambda = lambda;
  out.tau = std::isnan(tau) ? std::sqrt(6.0 * std::log(static_cast<double>(n))) : tau;
  if (!(out.tau > 0.0)) throw ValidationError("tau must be positive");
  out.trials = trials;
  out.bound = threshold_failure_bound(n, k);
  out.lambda_ge_2tau = lambda >= 2.0 * out.tau;
  const std::size_t chunks = std::min<std::size_t>(trials, kMcChunks);
  std::vector<std::size_t> fails(chunks, 0);
  parallel_chunks(chunks, [&](std::size_t c) {
    Rng r = rng.split(c);
    std::vector<double> d(static_cast<std::size_t>(n));
    const std::size_t lo = trials * c / chunks, hi = trials * (c + 1) / chunks;
    for (std::size_t t = lo; t < hi; ++t) {
      const Latent lat = sample_latent(prior, r);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = lambda * lat.v[i] + r.normal();
      const auto vhat = diag_threshold(d, out.tau);
      bool ok = true;
      for (std::size_t i = 0; i < d.size() && ok; ++i) ok = static_cast<double>(vhat[i]) == lat.v[i];
      if (!ok) ++fails[c];
    }
  });
  for (auto f : fails) out.failures += f;
  const double T = static_cast<double>(trials);
  out.failure_rate = static_cast<double>(out.failures) / T;
  out.stderr_ = std::sqrt(out.failure_rate * (1.0 - out.failure_rate) / T);
  out.within_bound = out.failure_rate <= out.bound + 3.0 * out.stderr_;
  return out;
}

std::string to_string(ScalingModel m) {
  switch (m) {
    case ScalingModel::gaussian_tensor: return "gaussian_tensor";
    case ScalingModel::sparse_dense: return "sparse_dense";
    case ScalingModel::sparse_sparse: return "sparse_sparse";
    case ScalingModel::clustering: return "clustering";
  }
  return "unknown";
}

ScalingReport quantile_scaling_experiment(const ScalingConfig& cfg, const Rng& rng) {
  ScalingReport rep;
  rep.model = to_string(cfg.model);
  std::vector<long> sizes = cfg.sizes;
  std::vector<double> grid = cfg.d_grid;
  switch (cfg.model) {
    case ScalingModel::gaussian_tensor:
      if (sizes.empty()) sizes = {100, 400};
      if (grid.empty()) grid = {1, 2, 4, 8, 16};
      rep.predicted = "(sqrt(n D) + D)^r";
      break;
    case ScalingModel::sparse_dense:
      if (sizes.empty()) sizes = {2500, 10000};
      if (grid.empty()) grid = {1, 2, 4};
      rep.predicted = "sigma sqrt(D), sigma = k / sqrt(n)";
      break;
    case ScalingModel::sparse_sparse:
      if (sizes.empty()) sizes = {1000, 10000};
      if (grid.empty()) grid = {1, 2, 3};  // multiples of log n
      rep.predicted = "D / log n, D = c log n";
      break;
    case ScalingModel::clustering:
      if (sizes.empty()) sizes = {100, 400};
      if (grid.empty()) grid = {1, 2, 4, 8};
      rep.predicted = "sigma_S D, sigma_S = s sqrt(n / p), p = 4n, s = n";
      break;
  }
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const long n = sizes[si];
    if (n < 2) throw ValidationError("problem size must be >= 2");
    const double dn = static_cast<double>(n), logn = std::log(dn);
    std::string instance;
    OverlapDistribution dist;
    double sigma = 1.0;
    switch (cfg.model) {
      case ScalingModel::gaussian_tensor:
        dist = OverlapDistribution::gaussian_tensor_analytic(n, cfg.r);
        instance = PriorModel::gaussian_tensor(n, cfg.r).id();
        break;
      case ScalingModel::sparse_dense:
      case ScalingModel::sparse_sparse: {
        const double beta = std::isnan(cfg.beta) ? (cfg.model == ScalingModel::sparse_dense ? 0.7 : 0.3) : cfg.beta;
        const long k = std::max(1L, std::lround(std::pow(dn, beta)));
        dist = exact_pmf_sparse_rademacher(n, k, 1);
        instance = PriorModel::sparse_rademacher_tensor(n, k, 1).id();
        sigma = static_cast<double>(k) / std::sqrt(dn);
        break;
      }
      case ScalingModel::clustering: {
        const auto prior = PriorModel::sparse_clustering(n, 4 * n, n, 1.0);
        dist = empirical_overlap(prior, cfg.mc_samples, rng.split(static_cast<std::uint64_t>(si)));
        instance = prior.id();
        sigma = static_cast<double>(prior.s) * std::sqrt(dn / static_cast<double>(prior.p));
        break;
      }
    }
    for (double g : grid) {
      ScalingRow row;
      row.instance = instance;
      row.n = n;
      row.D = cfg.model == ScalingModel::sparse_sparse ? g * logn : g;
      const auto qr = quantile_detail(dist, row.D);
      row.q = qr.value;
      row.saturated = qr.saturated;
      switch (cfg.model) {
        case ScalingModel::gaussian_tensor:
          row.scale = std::pow(std::sqrt(dn * row.D) + row.D, cfg.r);
          break;
        case ScalingModel::sparse_dense: row.scale = sigma * std::sqrt(row.D); break;
        case ScalingModel::sparse_sparse: row.scale = row.D / logn; break;
        case ScalingModel::clustering: row.scale = sigma * row.D; break;
      }
      row.ratio = row.q / row.scale;
      rep.rows.push_back(row);
    }
  }
  if (rep.rows.empty()) throw ValidationError("empty scaling grid");
  rep.min_ratio = rep.max_ratio = rep.rows.front().ratio;
  for (const auto& r : rep.rows) {
    rep.min_ratio = std::min(rep.min_ratio, r.ratio);
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
  }
  rep.spread = rep.min_ratio > 0.0 ? rep.max_ratio / rep.min_ratio : std::numeric_limits<double>::infinity();
  return rep;
}

namespace {

struct FpSide {
  OverlapDistribution dist;
  SpeedFunction speed;
  bool discrete = true;
};

FpSide fp_side(const PriorModel& prior) {
  FpSide s;
  switch (prior.kind) {
    case PriorKind::sparse_rademacher_tensor:
      s.dist = exact_overlap(prior);
      s.speed = tensor_speed(prior.r);
      break;
    case PriorKind::truncated_sparse_tensor3:
    case PriorKind::discrete_atoms:
      s.dist = exact_overlap(prior);
      s.speed = nearest_atom_speed(s.dist);
      break;
    case PriorKind::gaussian_tensor:
      s.dist = OverlapDistribution::gaussian_tensor_analytic(prior.n, prior.r);
      s.discrete = false;
      break;
    default:
      throw DomainError("no FP side for prior " + to_string(prior.kind));
  }
  return s;
}

bool sandwich(double upper, double oracle, double lower_sq, double lower_se) {
  bool ok = true;
  if (!std::isnan(upper) && !std::isnan(oracle)) ok = ok && oracle <= upper * (1.0 + 1e-9) + 1e-12;
  if (!std::isnan(lower_sq) && !std::isnan(oracle)) ok = ok && lower_sq - 3.0 * lower_se <= oracle + 1e-12;
  if (!std::isnan(lower_sq) && !std::isnan(upper)) ok = ok && lower_sq - 3.0 * lower_se <= upper * (1.0 + 1e-9) + 1e-12;
  return ok;
}

double oracle_or_nan(const PriorModel& prior, double lambda, int D) {
  try {
    return exact_corr_and_mmse(prior, lambda, D).corr_sq_total;
  } catch (const BudgetError&) {
    return kNaN;
  } catch (const DomainError&) {
    return kNaN;
  }
}

}  // namespace

EquivalenceReport equivalence_sweep(const EquivalenceConfig& cfg, const Rng& rng) {
  cfg.prior.validate();
  if (cfg.lambdas.empty()) throw ValidationError("empty lambda grid");
  for (double l : cfg.lambdas)
    if (!(l > 0.0)) throw ValidationError("lambda grid must be positive");
  EquivalenceReport rep;
  rep.model = cfg.prior.id();
  rep.D = cfg.D;
  const FpSide side = fp_side(cfg.prior);
  const double logn = std::log(static_cast<double>(std::max(2L, cfg.prior.n)));
  rep.q_D = quantile(side.dist, cfg.D);
  rep.q_bench = quantile(side.dist, cfg.D * logn * logn);
  const auto fpd = fp_derivative_at_quantile(side.dist, 0.0, cfg.D, side.discrete ? &side.speed : nullptr);
  const double lpd = fpd.lambda_plus_derivative;
  if (lpd > 0.0) rep.lambda_star = lpd;

  SwBound unit;
  bool have_upper = false;
  if (cfg.upper && cfg.prior.kind != PriorKind::truncated_sparse_tensor3) {
    try {
      unit = sw_corr_upper_bound(cfg.prior, 1.0, cfg.D, cfg.upper_budget);
      have_upper = true;
    } catch (const BudgetError&) {
    } catch (const DomainError&) {
    }
  }

  std::vector<double> lambdas = cfg.lambdas;
  std::sort(lambdas.begin(), lambdas.end());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    EquivalenceRow row;
    row.lambda = lambdas[i];
    row.fp_derivative = lpd - row.lambda;
    row.fp_sign = row.fp_derivative > 0.0 ? 1 : (row.fp_derivative < 0.0 ? -1 : 0);
    row.q_D = rep.q_D;
    row.q_bench = rep.q_bench;
    if (cfg.lower) {
      const auto lb = corr_lower_bound_overlap(cfg.prior, row.lambda, cfg.D, cfg.mc_samples, rng.split(i));
      if (lb.has_ratio) {
        row.lower_sq = lb.lower_sq;
        row.lower_se = lb.se_lower_sq;
      }
    }
    if (have_upper) {
      double t = 0.0;
      for (std::size_t d = 0; d < unit.by_degree.size(); ++d) t += unit.by_degree[d] * std::pow(row.lambda, static_cast<double>(d));
      row.upper_sq = t;
    }
    if (cfg.oracle) row.oracle_sq = oracle_or_nan(cfg.prior, row.lambda, cfg.D);
    row.sandwich_ok = sandwich(row.upper_sq, row.oracle_sq, row.lower_sq, row.lower_se);
    if (!row.sandwich_ok) ++rep.sandwich_violations;
    if (std::isnan(rep.lambda_lower) && !std::isnan(row.lower_sq) && row.lower_sq >= rep.q_D) rep.lambda_lower = row.lambda;
    rep.rows.push_back(row);
  }

  // Oracle crossing of q(D) by bisection in log lambda.
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const double a = rep.rows[i].oracle_sq, b = rep.rows[i + 1].oracle_sq;
    if (std::isnan(a) || std::isnan(b)) continue;
    if (a < rep.q_D && b >= rep.q_D) {
      const double root = bisect(
          [&](double ll) { return oracle_or_nan(cfg.prior, std::exp(ll), cfg.D) - rep.q_D; },
          std::log(rep.rows[i].lambda), std::log(rep.rows[i + 1].lambda), 1e-8);
      rep.lambda_dagger = std::exp(root);
      break;
    }
  }
  if (!std::isnan(rep.lambda_star) && !std::isnan(rep.lambda_dagger))
    rep.factor = std::max(rep.lambda_star / rep.lambda_dagger, rep.lambda_dagger / rep.lambda_star);
  return rep;
}

double truncated_diagonal_corr_sq(long n, long k, double lambda, int D) {
  if (n < 1 || k < 1 || k > n) throw ValidationError("truncated model requires 1 <= k <= n");
  const double rho = static_cast<double>(k) / static_cast<double>(n);
  const long lo = (k + 1) / 2, hi = std::min(2 * k, n);
  // P(u_i != 0 and ||u||_0 in band)
  double pin = 0.0;
  for (long m = std::max(lo, 1L); m <= hi; ++m)
    pin += std::exp(log_binomial(static_cast<double>(n - 1), static_cast<double>(m - 1)) + (m - 1) * std::log(rho) +
                    (n - m) * std::log1p(-rho));
  pin *= rho;
  const double pout = truncation_probability(n, k);
  const FiniteSupport in{{{-1.0}, {0.0}, {1.0}}, {pin / 2.0, 1.0 - pin - pout, pin / 2.0 + pout}};
  const FiniteSupport out{{{-1.0}, {0.0}, {1.0}}, {pin / 2.0, 1.0 - pin, pin / 2.0}};
  const double ci = exact_corr_and_mmse(in, lambda, D).corr_sq_total;
  const double co = exact_corr_and_mmse(out, lambda, D).corr_sq_total;
  return static_cast<double>(k) * ci + static_cast<double>(n - k) * co;
}

CounterexampleReport counterexample_experiment(const CounterexampleConfig& cfg, const Rng& rng) {
  if (cfg.amplitudes.empty()) throw ValidationError("empty amplitude grid");
  const PriorModel prior = PriorModel::truncated_sparse_tensor3(cfg.n, cfg.k);
  prior.validate();
  CounterexampleReport rep;
  rep.n = cfg.n;
  rep.k = cfg.k;
  rep.D = cfg.D;
  const auto dist = exact_pmf_truncated(cfg.n, cfg.k);
  const auto speed = nearest_atom_speed(dist);
  const auto fpd = fp_derivative_at_quantile(dist, 0.0, cfg.D, &speed);
  rep.q_D = fpd.q;
  rep.lambda_star = fpd.lambda_plus_derivative;

  std::vector<long> qps = cfg.q_primes;
  if (std::find(qps.begin(), qps.end(), cfg.q_test) == qps.end()) qps.push_back(cfg.q_test);
  const auto quenched = quenched_fp_mc_multi(prior, cfg.amplitudes, qps, cfg.replicas, rng, cfg.budget);

  for (std::size_t ai = 0; ai < cfg.amplitudes.size(); ++ai) {
    CounterexampleRow row;
    row.amplitude = cfg.amplitudes[ai];
    row.lambda = row.amplitude * row.amplitude;
    row.annealed_derivative = fpd.lambda_plus_derivative - row.lambda;
    row.annealed_sign = row.annealed_derivative > 0.0 ? 1 : (row.annealed_derivative < 0.0 ? -1 : 0);
    const double f0 = annealed_fp(dist, row.lambda, 0.0);
    row.quenched = quenched[ai];
    for (const auto& e : row.quenched) {
      const double fq = annealed_fp(dist, row.lambda, e.q);
      row.annealed_diffs.push_back(fq - f0);
      row.jensen_gap.push_back(e.f_mean - fq);
    }
    row.corr_diag = truncated_diagonal_corr_sq(cfg.n, cfg.k, row.lambda, cfg.D);
    row.annealed_easy = row.annealed_sign < 0;
    row.oracle_nontrivial = row.corr_diag >= rep.q_D;
    for (const auto& e : row.quenched)
      if (e.q_prime == cfg.q_test) row.quenched_positive = e.diff_mean > 3.0 * e.diff_stderr;
    const bool agree = row.annealed_easy == row.oracle_nontrivial;
    row.verdict = std::string(agree ? "annealed agrees with oracle" : "annealed disagrees with oracle") +
                  (row.quenched_positive ? "; quenched increasing (hard)" : "; quenched not certified increasing");
    if (row.annealed_easy && row.oracle_nontrivial && row.quenched_positive && std::isnan(rep.found_amplitude)) {
      rep.found = true;
      rep.found_amplitude = row.amplitude;
    }
    rep.rows.push_back(row);
  }
  rep.verdict = rep.found ? "annealed FP matches the MMSE transition; quenched FP does not"
                          : "no amplitude separated the annealed and quenched potentials";
  return rep;
}

BoundReport bound_report(const PriorModel& prior, double lambda, int D, std::size_t mc_samples, std::uint64_t seed,
                         std::size_t upper_budget) {
  prior.validate();
  BoundReport rep;
  rep.model = prior.id();
  rep.lambda = lambda;
  rep.D = D;
  rep.seed = seed;
  rep.mc_samples = mc_samples;
  try {
    if (prior.kind != PriorKind::truncated_sparse_tensor3)
      rep.upper = sw_corr_upper_bound(prior, lambda, D, upper_budget).total;
  } catch (const BudgetError&) {
  } catch (const DomainError&) {
  }
  const auto lb = corr_lower_bound_overlap(prior, lambda, D, mc_samples, Rng(seed));
  if (lb.has_ratio) {
    rep.lower_sq = lb.lower_sq;
    rep.lower_se = lb.se_lower_sq;
  }
  rep.oracle = oracle_or_nan(prior, lambda, D);
  rep.sandwich_ok = sandwich(rep.upper, rep.oracle, rep.lower_sq, rep.lower_se);
  return rep;
}

}  // namespace fpld
