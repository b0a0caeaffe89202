#include "fpld/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include "json.hpp"

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "fpld/parallel.hpp"

namespace fpld {

MonomialBasis MonomialBasis::make(std::size_t dim, int D) {
  MonomialBasis b;
  b.dim = dim;
  b.D = D;
  b.alphas = enumerate_multi_indices(dim, D);
  return b;
}

double shifted_gaussian_moment_1d(double mu, int e) {
  if (e < 0) throw ValidationError("negative exponent");
  CompensatedSum s;
  for (int m = 0; 2 * m <= e; ++m) s.add(binomial(e, 2 * m) * odd_double_factorial(m) * std::pow(mu, e - 2 * m));
  return s.value();
}

double shifted_gaussian_monomial_moment(const std::vector<double>& mu, const MultiIndex& e) {
  if (mu.size() != e.size()) throw ValidationError("mean and exponent dimensions differ");
  double r = 1.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (e[j] != 0) r *= shifted_gaussian_moment_1d(mu[j], e[j]);
  return r;
}

namespace {

void add_atom(std::map<std::vector<double>, double>& acc, std::vector<double> atom, double p) {
  if (p <= 0.0) return;
  acc[std::move(atom)] += p;
}

FiniteSupport from_map(const std::map<std::vector<double>, double>& acc) {
  FiniteSupport s;
  for (const auto& [a, p] : acc) {
    s.atoms.push_back(a);
    s.probs.push_back(p);
  }
  return s;
}

// Calls fn(v, log_prob) for every v in {-1,0,1}^n under Rad(rho) coordinates.
void for_each_ternary(long n, double rho, const std::function<void(const std::vector<double>&, long, double)>& fn) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  const double l0 = std::log1p(-rho), l1 = std::log(rho / 2.0);
  std::function<void(long, long, double)> rec = [&](long i, long supp, double lp) {
    if (i == n) {
      fn(v, supp, lp);
      return;
    }
    const auto u = static_cast<std::size_t>(i);
    v[u] = 0.0;
    rec(i + 1, supp, lp + l0);
    v[u] = 1.0;
    rec(i + 1, supp + 1, lp + l1);
    v[u] = -1.0;
    rec(i + 1, supp + 1, lp + l1);
    v[u] = 0.0;
  };
  rec(0, 0, 0.0);
}

}  // namespace

FiniteSupport enumerate_support(const PriorModel& prior, std::size_t max_atoms) {
  prior.validate();
  std::map<std::vector<double>, double> acc;
  switch (prior.kind) {
    case PriorKind::discrete_atoms: {
      if (prior.atoms.size() > max_atoms) throw BudgetError("prior support exceeds atom budget");
      for (std::size_t a = 0; a < prior.atoms.size(); ++a) add_atom(acc, prior.atoms[a], prior.probs[a]);
      break;
    }
    case PriorKind::sparse_rademacher_tensor:
    case PriorKind::truncated_sparse_tensor3: {
      const double raw = std::pow(3.0, static_cast<double>(prior.n));
      if (raw > static_cast<double>(max_atoms)) throw BudgetError("prior support exceeds atom budget");
      const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
      const bool trunc = prior.kind == PriorKind::truncated_sparse_tensor3;
      double p_out = 0.0;
      Latent lat;
      for_each_ternary(prior.n, rho, [&](const std::vector<double>& v, long supp, double lp) {
        if (trunc && (supp < prior.band_lo() || supp > prior.band_hi())) {
          p_out += std::exp(lp);
          return;
        }
        lat.v = v;
        add_atom(acc, flatten(prior, lat), std::exp(lp));
      });
      if (trunc && p_out > 0.0) {
        lat.v.assign(static_cast<std::size_t>(prior.n), 0.0);
        std::fill(lat.v.begin(), lat.v.begin() + prior.k, 1.0);
        add_atom(acc, flatten(prior, lat), p_out);
      }
      break;
    }
    default:
      throw DomainError("prior " + to_string(prior.kind) + " has no finite support");
  }
  return from_map(acc);
}

OracleReport exact_corr_and_mmse(const FiniteSupport& support, double lambda, int D, const OracleOptions& opts) {
  if (support.atoms.empty() || support.atoms.size() != support.probs.size())
    throw ValidationError("support needs matching atoms and probabilities");
  if (support.atoms.size() > opts.max_atoms) throw BudgetError("prior support exceeds atom budget");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (D < 0) throw ValidationError("degree D must be >= 0");
  const std::size_t N = support.atoms.front().size();
  for (const auto& a : support.atoms)
    if (a.size() != N) throw ValidationError("atoms have different dimensions");
  if (count_multi_indices(N, D) > opts.max_basis) throw BudgetError("monomial basis exceeds budget");

  OracleReport rep;
  rep.lambda = lambda;
  rep.D = D;
  rep.num_atoms = support.atoms.size();
  rep.basis = MonomialBasis::make(N, D);
  const auto& basis = rep.basis.alphas;
  const std::size_t B = basis.size();
  rep.basis_size = B;

  // Sparse exponent lists for fast products.
  std::vector<std::vector<std::pair<std::size_t, int>>> sp(B);
  for (std::size_t a = 0; a < B; ++a)
    for (auto j : basis[a].support()) sp[a].emplace_back(j, basis[a][j]);

  const double sl = std::sqrt(lambda);
  const std::size_t A = support.atoms.size();
  const std::size_t chunks = std::min<std::size_t>(A, kMcChunks);
  std::vector<Eigen::MatrixXd> Gs(chunks, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(B)));
  std::vector<Eigen::MatrixXd> Cs(chunks, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(N)));
  std::vector<double> m2(chunks, 0.0);
  parallel_chunks(chunks, [&](std::size_t c) {
    auto& G = Gs[c];
    auto& C = Cs[c];
    const std::size_t lo = A * c / chunks, hi = A * (c + 1) / chunks;
    std::vector<std::vector<double>> tab(N, std::vector<double>(static_cast<std::size_t>(2 * D) + 1));
    std::vector<double> ey(B);
    for (std::size_t t = lo; t < hi; ++t) {
      const auto& x = support.atoms[t];
      const double p = support.probs[t];
      for (std::size_t j = 0; j < N; ++j)
        for (int e = 0; e <= 2 * D; ++e) tab[j][static_cast<std::size_t>(e)] = shifted_gaussian_moment_1d(sl * x[j], e);
      for (std::size_t a = 0; a < B; ++a) {
        double v = 1.0;
        for (auto [j, e] : sp[a]) v *= tab[j][static_cast<std::size_t>(e)];
        ey[a] = v;
      }
      for (std::size_t a = 0; a < B; ++a) {
        for (std::size_t b = a; b < B; ++b) {
          // product over the union of supports of alpha + beta
          double v = 1.0;
          auto ia = sp[a].begin(), ib = sp[b].begin();
          while (ia != sp[a].end() || ib != sp[b].end()) {
            if (ib == sp[b].end() || (ia != sp[a].end() && ia->first < ib->first)) {
              v *= tab[ia->first][static_cast<std::size_t>(ia->second)];
              ++ia;
            } else if (ia == sp[a].end() || ib->first < ia->first) {
              v *= tab[ib->first][static_cast<std::size_t>(ib->second)];
              ++ib;
            } else {
              v *= tab[ia->first][static_cast<std::size_t>(ia->second + ib->second)];
              ++ia;
              ++ib;
            }
          }
          G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += p * v;
        }
        for (std::size_t i = 0; i < N; ++i)
          if (x[i] != 0.0) C(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) += p * x[i] * ey[a];
      }
      double nx = 0.0;
      for (double xi : x) nx += xi * xi;
      m2[c] += p * nx;
    }
  });
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(B));
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(N));
  for (std::size_t c = 0; c < chunks; ++c) {
    G += Gs[c];
    C += Cs[c];
  }
  G.triangularView<Eigen::StrictlyLower>() = G.transpose().triangularView<Eigen::StrictlyLower>();
  rep.second_moment = compensated_sum(m2);

  // Jacobi equilibration; Corr^2 is invariant under rescaling the basis.
  Eigen::VectorXd scale(static_cast<Eigen::Index>(B));
  for (Eigen::Index a = 0; a < scale.size(); ++a) scale(a) = G(a, a) > 0.0 ? 1.0 / std::sqrt(G(a, a)) : 1.0;
  G = scale.asDiagonal() * G * scale.asDiagonal();
  C = scale.asDiagonal() * C;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw DomainError("Gram eigen-decomposition failed");
  const auto& ev = es.eigenvalues();
  const double gnorm = std::max(std::fabs(ev.minCoeff()), std::fabs(ev.maxCoeff()));
  rep.min_eigenvalue = ev.minCoeff();
  if (rep.min_eigenvalue < -1e-9 * gnorm) throw DomainError("Gram matrix is indefinite beyond tolerance");
  const double cut = 1e-10 * gnorm;
  double kept_min = gnorm;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) > cut) {
      inv(k) = 1.0 / ev(k);
      kept_min = std::min(kept_min, ev(k));
      ++rep.rank;
    }
  rep.cond_number = gnorm / kept_min;
  const Eigen::MatrixXd& U = es.eigenvectors();
  const Eigen::MatrixXd P = U.transpose() * C;  // B x N
  rep.corr_sq_per_coord.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    CompensatedSum s;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      const double v = P(k, static_cast<Eigen::Index>(i));
      s.add(v * v * inv(k));
    }
    rep.corr_sq_per_coord[i] = s.value();
  }
  if (opts.keep_coefficients) {
    const Eigen::MatrixXd coef = scale.asDiagonal() * U * inv.asDiagonal() * P;
    rep.coefficients.assign(N, std::vector<double>(B));
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t a = 0; a < B; ++a)
        rep.coefficients[i][a] = coef(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i));
  }
  rep.corr_sq_total = compensated_sum(rep.corr_sq_per_coord);
  rep.mmse = rep.second_moment - rep.corr_sq_total;
  return rep;
}

OracleReport exact_corr_and_mmse(const PriorModel& prior, double lambda, int D, const OracleOptions& opts) {
  prior.validate();
  if (opts.allow_product_reduction && prior.kind == PriorKind::sparse_rademacher_tensor && prior.r == 1 &&
      !opts.keep_coefficients) {
    const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
    FiniteSupport one{{{-1.0}, {0.0}, {1.0}}, {rho / 2.0, 1.0 - rho, rho / 2.0}};
    auto rep = exact_corr_and_mmse(one, lambda, D, opts);
    const auto n = static_cast<std::size_t>(prior.n);
    const double c1 = rep.corr_sq_per_coord[0];
    rep.corr_sq_per_coord.assign(n, c1);
    rep.corr_sq_total = c1 * static_cast<double>(n);
    rep.second_moment = rho * static_cast<double>(n);
    rep.mmse = rep.second_moment - rep.corr_sq_total;
    rep.product_reduced = true;
    return rep;
  }
  return exact_corr_and_mmse(enumerate_support(prior, opts.max_atoms), lambda, D, opts);
}

std::vector<double> evaluate_projection(const OracleReport& report, const std::vector<double>& y) {
  if (report.coefficients.empty()) throw ValidationError("oracle report has no coefficients");
  if (y.size() != report.basis.dim) throw ValidationError("observation has wrong dimension");
  std::vector<double> mono(report.basis.size());
  for (std::size_t a = 0; a < mono.size(); ++a) mono[a] = report.basis.alphas[a].power_of(y);
  std::vector<double> out(report.coefficients.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CompensatedSum s;
    for (std::size_t a = 0; a < mono.size(); ++a) s.add(report.coefficients[i][a] * mono[a]);
    out[i] = s.value();
  }
  return out;
}

std::string oracle_report_json(const OracleReport& r) {
  nlohmann::ordered_json j;
  j["lambda"] = r.lambda;
  j["D"] = r.D;
  j["basis_size"] = r.basis_size;
  j["num_atoms"] = r.num_atoms;
  j["rank"] = r.rank;
  j["cond_number"] = r.cond_number;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["product_reduced"] = r.product_reduced;
  j["corr_sq_per_coord"] = r.corr_sq_per_coord;
  j["corr_sq_total"] = r.corr_sq_total;
  j["second_moment"] = r.second_moment;
  j["mmse"] = r.mmse;
  return j.dump(2);
}

McCorr mc_corr_of_estimator(const GamInstance& gam, const EstimatorFn& f, std::size_t M, const Rng& rng) {
  if (M < 2) throw ValidationError("need at least two Monte-Carlo samples");
  std::vector<double> inner(M), nrm(M);
  const std::size_t chunks = std::min<std::size_t>(M, kMcChunks);
  parallel_chunks(chunks, [&](std::size_t c) {
    Rng r = rng.split(c);
    const std::size_t lo = M * c / chunks, hi = M * (c + 1) / chunks;
    for (std::size_t t = lo; t < hi; ++t) {
      const auto obs = sample_observation(gam, r);
      const auto fy = f(obs.y);
      if (fy.size() != obs.y.size()) throw ValidationError("estimator output has wrong dimension");
      double ip = 0.0, nn = 0.0;
      for (std::size_t i = 0; i < fy.size(); ++i) {
        ip += fy[i] * obs.signal.flat[i];
        nn += fy[i] * fy[i];
      }
      inner[t] = ip;
      nrm[t] = nn;
    }
  });
  McCorr out;
  out.samples = M;
  const auto mi = mean_stderr(inner), mn = mean_stderr(nrm);
  out.inner_mean = mi.mean;
  out.inner_se = mi.stderr_;
  out.norm_sq_mean = mn.mean;
  out.norm_sq_se = mn.stderr_;
  if (!(mn.mean > 0.0)) throw DomainError("estimator has zero norm");
  const double sd = std::sqrt(mn.mean);
  out.corr = mi.mean / sd;
  // delta method with the sample covariance of (inner, norm)
  double cov = 0.0;
  for (std::size_t t = 0; t < M; ++t) cov += (inner[t] - mi.mean) * (nrm[t] - mn.mean);
  cov /= static_cast<double>(M - 1) * static_cast<double>(M);
  const double g1 = 1.0 / sd, g2 = -0.5 * mi.mean / (mn.mean * sd);
  const double var = g1 * g1 * mi.stderr_ * mi.stderr_ + g2 * g2 * mn.stderr_ * mn.stderr_ + 2.0 * g1 * g2 * cov;
  out.stderr_ = std::sqrt(std::max(var, 0.0));
  return out;
}

}  // namespace fpld
