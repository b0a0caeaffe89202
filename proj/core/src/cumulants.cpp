#include "fpld/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"

namespace fpld {

std::size_t MomentOracle::KeyHash::operator()(const std::vector<int>& k) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (int v : k) h = (h ^ static_cast<std::size_t>(v + 7)) * 1099511628211ULL;
  return h;
}

MomentOracle::MomentOracle(std::size_t dim, int max_degree, bool exact, Fn fn, KeyFn key)
    : dim_(dim),
      max_degree_(max_degree),
      exact_(exact),
      fn_(std::move(fn)),
      key_(std::move(key)),
      mu_(std::make_shared<std::mutex>()),
      cache_(std::make_shared<std::unordered_map<std::vector<int>, double, KeyHash>>()) {}

double MomentOracle::operator()(const MultiIndex& alpha) const {
  if (alpha.size() != dim_) throw ValidationError("moment query has wrong dimension");
  if (alpha.degree() > max_degree_)
    throw BudgetError("moment degree " + std::to_string(alpha.degree()) + " exceeds oracle cap " +
                      std::to_string(max_degree_));
  std::vector<int> key = key_ ? key_(alpha) : alpha.exponents();
  {
    std::lock_guard<std::mutex> lock(*mu_);
    if (auto it = cache_->find(key); it != cache_->end()) return it->second;
  }
  const double v = fn_(alpha);
  std::lock_guard<std::mutex> lock(*mu_);
  cache_->emplace(std::move(key), v);
  return v;
}

double MomentOracle::of_multiset(const std::vector<std::size_t>& ids) const {
  return (*this)(MultiIndex::from_multiset(dim_, ids));
}

MomentOracle prior_moment_oracle(const PriorModel& prior, int max_degree) {
  const bool exact = prior.kind != PriorKind::truncated_sparse_tensor3;
  MomentOracle::KeyFn key;
  if (prior.kind == PriorKind::gaussian_tensor || prior.kind == PriorKind::sparse_rademacher_tensor) {
    key = [prior](const MultiIndex& a) {
      auto e = latent_exponents(prior, a);
      e.erase(std::remove(e.begin(), e.end(), 0), e.end());
      std::sort(e.begin(), e.end(), std::greater<>());
      return e;
    };
  } else if (prior.kind == PriorKind::sparse_clustering) {
    key = [prior](const MultiIndex& a) {
      auto e = latent_exponents(prior, a);
      std::vector<int> xi(e.begin(), e.begin() + prior.n), mu(e.begin() + prior.n, e.end());
      std::vector<int> out;
      for (auto* part : {&xi, &mu}) {
        part->erase(std::remove(part->begin(), part->end(), 0), part->end());
        std::sort(part->begin(), part->end(), std::greater<>());
        out.insert(out.end(), part->begin(), part->end());
        out.push_back(-1);
      }
      return out;
    };
  }
  return MomentOracle(prior.ambient_dim(), max_degree, exact,
                      [prior, max_degree](const MultiIndex& a) { return moment(prior, a, max_degree).value; },
                      std::move(key));
}

MomentOracle scalar_moment_oracle(std::function<double(int)> raw_moment, int max_degree) {
  return MomentOracle(1, max_degree, true, [raw_moment](const MultiIndex& a) { return raw_moment(a[0]); });
}

MomentOracle pair_product_oracle(const MomentOracle& base) {
  return MomentOracle(base.dim(), base.max_degree(), base.exact(), [base](const MultiIndex& a) {
    const double m = base(a);
    return m * m;
  });
}

namespace {

void check_vars(const MomentOracle& oracle, const std::vector<std::size_t>& vars) {
  if (vars.empty()) throw ValidationError("cumulant needs at least one variable");
  if (vars.size() > static_cast<std::size_t>(kMaxPartitionVars))
    throw BudgetError("cumulant order " + std::to_string(vars.size()) + " exceeds partition budget " +
                      std::to_string(kMaxPartitionVars));
  if (static_cast<int>(vars.size()) > oracle.max_degree())
    throw BudgetError("oracle degree cap is below the cumulant order");
  for (auto v : vars)
    if (v >= oracle.dim()) throw ValidationError("cumulant variable id out of range");
}

// E[prod over positions in mask], memoized per call.
class SubsetMoments {
public:
  SubsetMoments(const MomentOracle& oracle, const std::vector<std::size_t>& vars)
      : oracle_(oracle), vars_(vars), memo_(std::size_t{1} << vars.size(), std::numeric_limits<double>::quiet_NaN()) {}

  double operator()(unsigned mask) {
    double& slot = memo_[mask];
    if (std::isnan(slot)) {
      std::vector<std::size_t> ids;
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (mask & (1u << i)) ids.push_back(vars_[i]);
      slot = ids.empty() ? 1.0 : oracle_.of_multiset(ids);
    }
    return slot;
  }

private:
  const MomentOracle& oracle_;
  const std::vector<std::size_t>& vars_;
  std::vector<double> memo_;
};

}  // namespace

double cumulant_partition(const MomentOracle& oracle, const std::vector<std::size_t>& vars) {
  check_vars(oracle, vars);
  const int m = static_cast<int>(vars.size());
  SubsetMoments mom(oracle, vars);
  CompensatedSum total;
  std::vector<unsigned> masks;
  for_each_set_partition(m, [&](const std::vector<int>& block_of, int blocks) {
    masks.assign(static_cast<std::size_t>(blocks), 0u);
    for (int i = 0; i < m; ++i) masks[static_cast<std::size_t>(block_of[static_cast<std::size_t>(i)])] |= 1u << i;
    double prod = 1.0;
    for (unsigned b : masks) {
      prod *= mom(b);
      if (prod == 0.0) return;
    }
    double coef = 1.0;
    for (int j = 2; j < blocks; ++j) coef *= j;
    if ((blocks - 1) % 2 == 1) coef = -coef;
    total.add(coef * prod);
  });
  return total.value();
}

double cumulant_recursive(const MomentOracle& oracle, const std::vector<std::size_t>& vars) {
  check_vars(oracle, vars);
  const unsigned full = (1u << vars.size()) - 1u;
  SubsetMoments mom(oracle, vars);
  std::vector<double> kappa(full + 1, std::numeric_limits<double>::quiet_NaN());
  std::function<double(unsigned)> rec = [&](unsigned mask) -> double {
    double& slot = kappa[mask];
    if (!std::isnan(slot)) return slot;
    const unsigned first = mask & (~mask + 1u);
    const unsigned rest = mask ^ first;
    CompensatedSum s;
    s.add(mom(mask));
    // nonempty S subset of rest
    for (unsigned S = rest; S != 0; S = (S - 1) & rest) s.add(-rec(mask ^ S) * mom(S));
    slot = s.value();
    return slot;
  };
  return rec(full);
}

double cumulant_of(const MomentOracle& oracle, const MultiIndex& alpha) {
  return cumulant_partition(oracle, alpha.as_multiset());
}

DiagonalSliceResult diagonal_slice_check(const MomentOracle& oracle, int m, std::size_t N) {
  if (m < 1 || m > 6) throw ValidationError("diagonal slice check supports 1 <= m <= 6");
  if (N < 1 || N > 4 || N > oracle.dim()) throw ValidationError("diagonal slice check supports 1 <= N <= 4");
  auto sum_moment = [&](int j) {
    CompensatedSum s;
    for (const auto& g : enumerate_multi_indices(N, j, j)) {
      MultiIndex full(oracle.dim());
      for (std::size_t i = 0; i < N; ++i) full[i] = g[i];
      const double multinom = std::exp(log_factorial(j)) / g.factorial();
      s.add(std::round(multinom) * oracle(full));
    }
    return s.value();
  };
  const auto scalar = scalar_moment_oracle(sum_moment, m);
  DiagonalSliceResult r;
  r.lhs = cumulant_partition(scalar, std::vector<std::size_t>(static_cast<std::size_t>(m), 0)) / std::exp(log_factorial(m));
  CompensatedSum rhs;
  for (const auto& g : enumerate_multi_indices(N, m, m)) {
    MultiIndex full(oracle.dim());
    for (std::size_t i = 0; i < N; ++i) full[i] = g[i];
    rhs.add(cumulant_of(oracle, full) / g.factorial());
  }
  r.rhs = rhs.value();
  r.residual = std::fabs(r.lhs - r.rhs);
  return r;
}

double ktilde(const MomentOracle& oracle, const MultiIndex& alpha) {
  if (alpha.degree() > 5) throw BudgetError("ktilde supports |alpha| <= 5");
  if (alpha.degree() < 1) throw ValidationError("ktilde needs |alpha| >= 1");
  return cumulant_of(pair_product_oracle(oracle), alpha);
}

double ktilde_pair_partition(const MomentOracle& oracle, const MultiIndex& alpha) {
  if (alpha.degree() > 5) throw BudgetError("ktilde supports |alpha| <= 5");
  const auto vars = alpha.as_multiset();
  const int m = static_cast<int>(vars.size());
  if (m < 1) throw ValidationError("ktilde needs |alpha| >= 1");
  // Block cumulants by mask.
  std::vector<double> kb(std::size_t{1} << m, std::numeric_limits<double>::quiet_NaN());
  auto block_kappa = [&](unsigned mask) {
    double& slot = kb[mask];
    if (std::isnan(slot)) {
      std::vector<std::size_t> ids;
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) ids.push_back(vars[static_cast<std::size_t>(i)]);
      slot = cumulant_partition(oracle, ids);
    }
    return slot;
  };
  std::vector<std::vector<unsigned>> parts;
  for_each_set_partition(m, [&](const std::vector<int>& block_of, int blocks) {
    std::vector<unsigned> masks(static_cast<std::size_t>(blocks), 0u);
    for (int i = 0; i < m; ++i) masks[static_cast<std::size_t>(block_of[static_cast<std::size_t>(i)])] |= 1u << i;
    parts.push_back(std::move(masks));
  });
  auto connected = [m](const std::vector<unsigned>& a, const std::vector<unsigned>& b) {
    // Join is the full set iff the bipartite block graph is connected.
    unsigned reach = a.front();
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto* side : {&a, &b})
        for (unsigned blk : *side)
          if ((blk & reach) && (blk | reach) != reach) {
            reach |= blk;
            grew = true;
          }
    }
    return reach == (1u << m) - 1u;
  };
  CompensatedSum total;
  for (const auto& pi : parts)
    for (const auto& sigma : parts) {
      if (!connected(pi, sigma)) continue;
      double prod = 1.0;
      for (unsigned b : pi) prod *= block_kappa(b);
      for (unsigned b : sigma) prod *= block_kappa(b);
      total.add(prod);
    }
  return total.value();
}

CumulantTable build_cumulant_table(const MomentOracle& oracle, int max_degree, bool use_recursion) {
  CumulantTable t;
  t.provenance = use_recursion ? "recursion" : "partition";
  for (auto& a : enumerate_multi_indices(oracle.dim(), max_degree, 1)) {
    const auto vars = a.as_multiset();
    t.kappa.push_back(use_recursion ? cumulant_recursive(oracle, vars) : cumulant_partition(oracle, vars));
    t.alphas.push_back(std::move(a));
  }
  return t;
}

SwBound sw_corr_upper_bound(const MomentOracle& oracle, double lambda, int D, std::size_t budget) {
  if (!oracle.exact()) throw ValidationError("the cumulant bound needs an exact moment oracle");
  if (D < 0) throw ValidationError("degree D must be >= 0");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  const std::size_t N = oracle.dim();
  const std::size_t per = count_multi_indices(N, D);
  if (per > budget / std::max<std::size_t>(N, 1)) throw BudgetError("cumulant bound enumeration exceeds budget");
  SwBound out;
  out.by_degree.assign(static_cast<std::size_t>(D) + 1, 0.0);
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(D) + 1);
  const auto alphas = enumerate_multi_indices(N, D);
  for (std::size_t i = 0; i < N; ++i)
    for (const auto& a : alphas) {
      auto vars = a.as_multiset();
      vars.insert(vars.begin(), i);
      const double k = cumulant_partition(oracle, vars);
      const int d = a.degree();
      acc[static_cast<std::size_t>(d)].add(std::pow(lambda, d) * k * k / a.factorial());
      ++out.terms;
    }
  CompensatedSum total;
  for (int d = 0; d <= D; ++d) {
    out.by_degree[static_cast<std::size_t>(d)] = acc[static_cast<std::size_t>(d)].value();
    total.add(out.by_degree[static_cast<std::size_t>(d)]);
  }
  out.total = total.value();
  return out;
}

SwBound sw_corr_upper_bound(const PriorModel& prior, double lambda, int D, std::size_t budget) {
  if (prior.kind == PriorKind::truncated_sparse_tensor3)
    throw ValidationError("the cumulant bound needs an exact moment oracle");
  if (prior.kind == PriorKind::sparse_rademacher_tensor && prior.r == 1) {
    // i.i.d. coordinates: kappa(X_i, X_alpha) = 0 unless supp(alpha) is within {i}.
    prior.validate();
    const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
    const auto one = scalar_moment_oracle([rho](int e) { return e == 0 ? 1.0 : (e % 2 == 0 ? rho : 0.0); },
                                          std::max(D + 1, 2));
    auto out = sw_corr_upper_bound(one, lambda, D, budget);
    const auto n = static_cast<double>(prior.n);
    for (auto& b : out.by_degree) b *= n;
    out.total *= n;
    return out;
  }
  if (count_multi_indices(prior.ambient_dim(), D) > budget / prior.ambient_dim())
    throw BudgetError("cumulant bound enumeration exceeds budget");
  return sw_corr_upper_bound(prior_moment_oracle(prior, std::max(D + 1, 2)), lambda, D, budget);
}

NonnegReport check_low_order_nonneg(const MomentOracle& joint, const std::function<double(int)>& latent_moment, int D,
                                    double rho_max, double tol) {
  if (D < 1 || D > 4) throw ValidationError("nonnegativity check supports 1 <= D <= 4");
  if (joint.dim() > 4) throw BudgetError("nonnegativity check supports ambient dimension <= 4");
  NonnegReport rep;
  rep.min_kappa = std::numeric_limits<double>::infinity();
  for (const auto& a : enumerate_multi_indices(joint.dim(), D, 1)) {
    const double k = cumulant_of(joint, a);
    ++rep.coverage;
    if (k < rep.min_kappa) {
      rep.min_kappa = k;
      rep.argmin = a;
    }
  }
  rep.nonneg_cumulants = rep.min_kappa >= -tol;
  rep.nonneg_moments = true;
  for (int e = 1; e <= 2 * D; ++e)
    if (latent_moment(e) < -tol) rep.nonneg_moments = false;
  rep.rho_fit = 0.0;
  for (int k = 1; k <= D; ++k)
    for (int t = k; t <= D; ++t) {
      const double num = latent_moment(k) * latent_moment(t);
      const double den = latent_moment(k + t);
      if (den > tol)
        rep.rho_fit = std::max(rep.rho_fit, num / den);
      else if (num > tol)
        rep.rho_fit = std::numeric_limits<double>::infinity();
    }
  rep.supermultiplicative = rep.nonneg_moments && rep.rho_fit <= rho_max * (1.0 + 1e-12);
  const auto scalar = scalar_moment_oracle(latent_moment, std::max(D, 1));
  for (int j = 1; j <= D; ++j)
    rep.latent_cumulants.push_back(cumulant_partition(scalar, std::vector<std::size_t>(static_cast<std::size_t>(j), 0)));
  return rep;
}

NonnegReport check_low_order_nonneg(const PriorModel& prior, int D, double rho_max, double tol) {
  if (prior.ambient_dim() > 4) throw BudgetError("nonnegativity check supports ambient dimension <= 4");
  const auto joint = prior_moment_oracle(prior, std::max(2 * D, D + 1));
  std::function<double(int)> latent;
  if (prior.kind == PriorKind::discrete_atoms) {
    if (prior.ambient_dim() != 1) throw ValidationError("latent moments need a one-dimensional discrete prior");
    latent = [joint](int e) { return joint(MultiIndex(std::vector<int>{e})); };
  } else {
    latent = [prior](int e) { return latent_marginal_moment(prior, e); };
  }
  return check_low_order_nonneg(joint, latent, D, rho_max, tol);
}

}  // namespace fpld
