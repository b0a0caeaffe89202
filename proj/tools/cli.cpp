#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "fpld/applications.hpp"
#include "fpld/cumulants.hpp"
#include "fpld/error.hpp"
#include "fpld/estimators.hpp"
#include "fpld/fp.hpp"
#include "fpld/io.hpp"
#include "fpld/numeric.hpp"
#include "fpld/oracle.hpp"
#include "fpld/overlap.hpp"
#include "fpld/parallel.hpp"
#include "fpld/priors.hpp"
#include "fpld/specfun.hpp"

namespace fpld::cli {

namespace {

struct Options {
  // common
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out_dir;
  std::string format = "csv";
  std::size_t mc_samples = 20000;
  std::size_t enum_budget = 100000000;
  std::size_t basis_budget = kOracleMaxBasis;
  std::string scale = "log";
  // model-based
  std::string model;
  std::string mode = "auto";
  std::string d_grid = "1:10";
  std::string lambda_grid = "0.1:10";
  std::string x_grid = "0.1:100:64";
  std::string q_grid;
  double lambda = 1.0;
  double d_max = 10.0;
  double D = 3.0;
  double nu = 1.0;
  bool table = false;
  bool no_lower = false, no_upper = false, no_oracle = false;
  // truncated model
  long n = 20, k = 4;
  double tau = kNaN;
  std::size_t trials = 10000;
  std::string amplitudes = "1.25,1.5";
  std::string q_primes = "1,2";
  long q_test = 1;
  std::size_t replicas = 64;
};

class Runner {
public:
  Runner(const Options& o, CLI::App* sub, std::ostream& out, std::ostream& err) : o_(o), sub_(sub), out_(out), err_(err) {}

  bool given(const std::string& flag) const { return sub_->count(flag) > 0; }

  void require_seed() const {
    if (!given("--seed")) throw ValidationError("--seed is required for stochastic subcommands", "/flags/seed");
  }

  PriorModel model() const {
    if (o_.model.empty()) throw ValidationError("--model is required", "/flags/model");
    return prior_from_json(o_.model);
  }

  Manifest manifest(const std::string& name, bool with_model, bool stochastic) const {
    Manifest m;
    m.subcommand = name;
    if (with_model) m.model_json = prior_to_json(model());
    if (stochastic) {
      m.seed = o_.seed;
      m.has_seed = true;
    }
    return m;
  }

  int emit(const Manifest& m, const Table& t) const {
    const bool json = o_.format == "json";
    const std::string dir = resolve_out_dir(o_.out_dir);
    if (dir.empty()) {
      out_ << (json ? to_json(t, m.hash()) : to_csv(t, m.hash()));
    } else {
      const auto files = write_outputs(dir, m, t, json);
      out_ << files.data_path << "\n" << files.manifest_path << "\n";
    }
    return kExitOk;
  }

  std::vector<double> grid(const std::string& spec, const std::string& flag) const {
    return parse_grid(spec, o_.scale, flag);
  }

  const Options& o_;
  CLI::App* sub_;
  std::ostream& out_;
  std::ostream& err_;
};

struct Dist {
  OverlapDistribution dist;
  SpeedFunction speed;
  bool has_speed = false;
  std::string mode;
};

Dist overlap_for(const PriorModel& prior, const std::string& mode, std::size_t mc, std::uint64_t seed, bool seeded) {
  std::string m = mode;
  if (m == "auto") {
    switch (prior.kind) {
      case PriorKind::gaussian_tensor: m = "analytic"; break;
      case PriorKind::sparse_clustering: m = "empirical"; break;
      default: m = "exact"; break;
    }
  }
  Dist d;
  d.mode = m;
  if (m == "exact") {
    d.dist = exact_overlap(prior);
    d.has_speed = true;
    d.speed = prior.kind == PriorKind::sparse_rademacher_tensor ? tensor_speed(prior.r) : nearest_atom_speed(d.dist);
  } else if (m == "analytic") {
    if (prior.kind != PriorKind::gaussian_tensor)
      throw ValidationError("analytic overlap density exists for gaussian_tensor only", "/flags/mode");
    d.dist = OverlapDistribution::gaussian_tensor_analytic(prior.n, prior.r);
  } else if (m == "empirical") {
    if (!seeded) throw ValidationError("--seed is required for empirical overlaps", "/flags/seed");
    d.dist = empirical_overlap(prior, mc, Rng(seed));
  } else {
    throw ValidationError("unknown --mode " + mode, "/flags/mode");
  }
  return d;
}

void add_common(Manifest& m, const Options& o) {
  m.params.emplace_back("format", o.format);
}

int cmd_quantiles(Runner& r) {
  const auto& o = r.o_;
  const auto prior = r.model();
  const auto d = overlap_for(prior, o.mode, o.mc_samples, o.seed, r.given("--seed"));
  const bool stochastic = d.mode == "empirical";
  const auto Ds = r.grid(o.d_grid, "d-grid");
  Table t;
  t.columns = {"D", "q_of_D", "saturated"};
  for (double D : Ds) {
    const auto q = quantile_detail(d.dist, D);
    t.add_row({cell(D), cell(q.value), cell(q.saturated)});
  }
  auto m = r.manifest("quantiles", true, stochastic);
  m.params = {{"mode", d.mode}, {"d_grid", o.d_grid}, {"scale", o.scale}};
  if (stochastic) m.params.emplace_back("mc_samples", cell(o.mc_samples));
  add_common(m, o);
  return r.emit(m, t);
}

int cmd_fp_curve(Runner& r) {
  const auto& o = r.o_;
  const auto prior = r.model();
  const auto d = overlap_for(prior, o.mode, o.mc_samples, o.seed, r.given("--seed"));
  if (d.mode == "empirical") throw DomainError("FP curves need an exact pmf or an analytic density");
  std::vector<double> qs;
  if (!o.q_grid.empty()) qs = r.grid(o.q_grid, "q-grid");
  const auto curve = fp_curve(d.dist, o.lambda, o.d_max, d.has_speed ? &d.speed : nullptr, qs.empty() ? nullptr : &qs);
  auto m = r.manifest("fp-curve", true, false);
  m.params = {{"mode", d.mode}, {"lambda", cell(o.lambda)}, {"d_max", cell(o.d_max)}};
  if (!o.q_grid.empty()) m.params.emplace_back("q_grid", o.q_grid);
  add_common(m, o);
  return r.emit(m, fp_curve_table(curve));
}

int cmd_fp_derivative(Runner& r) {
  const auto& o = r.o_;
  const auto prior = r.model();
  const auto d = overlap_for(prior, o.mode, o.mc_samples, o.seed, r.given("--seed"));
  if (d.mode == "empirical") throw DomainError("FP derivatives need an exact pmf or an analytic density");
  const auto Ds = r.grid(o.d_grid, "d-grid");
  const auto lambdas = r.grid(o.lambda_grid, "lambda-grid");
  Table t;
  t.columns = {"D", "lambda", "q", "step", "lambda_plus_derivative", "fp_derivative", "sign"};
  for (double D : Ds)
    for (double l : lambdas) {
      const auto f = fp_derivative_at_quantile(d.dist, l, D, d.has_speed ? &d.speed : nullptr);
      t.add_row({cell(D), cell(l), cell(f.q), cell(f.step), cell(f.lambda_plus_derivative), cell(f.fp_derivative),
                 cell(f.sign)});
    }
  auto m = r.manifest("fp-derivative", true, false);
  m.params = {{"mode", d.mode}, {"d_grid", o.d_grid}, {"lambda_grid", o.lambda_grid}, {"scale", o.scale}};
  add_common(m, o);
  return r.emit(m, t);
}

int integer_degree(double D) {
  if (!(D >= 0.0) || D != std::floor(D) || D > 64) throw ValidationError("--D must be a nonnegative integer here", "/flags/D");
  return static_cast<int>(D);
}

int cmd_cumulant_bound(Runner& r) {
  const auto& o = r.o_;
  const auto prior = r.model();
  const int D = integer_degree(o.D);
  auto m = r.manifest("cumulant-bound", true, false);
  m.params = {{"D", cell(D)}, {"enum_budget", cell(o.enum_budget)}};
  if (o.table) {
    const auto oracle = prior_moment_oracle(prior, std::max(2 * D, kDefaultMomentCap));
    if (count_multi_indices(oracle.dim(), D) > o.enum_budget) throw BudgetError("cumulant table exceeds --enum-budget");
    m.params.emplace_back("table", "true");
    add_common(m, o);
    return r.emit(m, cumulant_table(build_cumulant_table(oracle, D)));
  }
  const auto lambdas = r.grid(o.lambda_grid, "lambda-grid");
  Table t;
  t.columns = {"lambda", "D", "upper_bound", "terms"};
  for (int d = 0; d <= D; ++d) t.columns.push_back("degree_" + std::to_string(d));
  const auto unit = sw_corr_upper_bound(prior, 1.0, D, o.enum_budget);
  for (double l : lambdas) {
    std::vector<std::string> row{cell(l), cell(D), "", cell(unit.terms)};
    CompensatedSum total;
    for (int d = 0; d <= D; ++d) {
      const double c = static_cast<std::size_t>(d) < unit.by_degree.size()
                           ? unit.by_degree[static_cast<std::size_t>(d)] * std::pow(l, d)
                           : 0.0;
      total.add(c);
      row.push_back(cell(c));
    }
    row[2] = cell(total.value());
    t.add_row(std::move(row));
  }
  m.params.emplace_back("lambda_grid", o.lambda_grid);
  m.params.emplace_back("scale", o.scale);
  add_common(m, o);
  return r.emit(m, t);
}

int cmd_estimator_corr(Runner& r) {
  const auto& o = r.o_;
  r.require_seed();
  const auto prior = r.model();
  const int D = integer_degree(o.D);
  const auto lambdas = r.grid(o.lambda_grid, "lambda-grid");
  Table t;
  t.columns = {"lambda", "D", "lower_bound", "stderr_num", "stderr_den", "numerator", "denominator", "stderr_ratio",
               "ratio_jackknife", "stderr_jackknife", "lower_sq", "stderr_lower_sq", "flagged",
               "envelope_lower_sq", "envelope_stderr", "envelope_source_lambda"};
  const Rng base(o.seed);
  std::vector<std::size_t> order(lambdas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambdas[a] < lambdas[b]; });
  std::vector<CorrBoundEstimate> est(lambdas.size()), sorted;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    est[i] = corr_lower_bound_overlap(prior, lambdas[i], D, o.mc_samples, base.split(i));
  for (std::size_t i : order) sorted.push_back(est[i]);
  const auto env_sorted = monotone_envelope(sorted);
  std::vector<MonotoneLowerBound> env(lambdas.size());
  for (std::size_t j = 0; j < order.size(); ++j) env[order[j]] = env_sorted[j];
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const auto& b = est[i];
    t.add_row({cell(lambdas[i]), cell(D), b.has_ratio ? cell(b.ratio) : "nan", cell(b.se_num), cell(b.se_den),
               cell(b.numerator), cell(b.denominator), cell(b.se_ratio), cell(b.ratio_jackknife), cell(b.se_jackknife),
               cell(b.lower_sq), cell(b.se_lower_sq), cell(b.flagged), cell(env[i].lower_sq), cell(env[i].se_lower_sq),
               cell(env[i].source_lambda)});
  }
  auto m = r.manifest("estimator-corr", true, true);
  m.params = {{"D", cell(D)}, {"lambda_grid", o.lambda_grid}, {"scale", o.scale}, {"mc_samples", cell(o.mc_samples)}};
  add_common(m, o);
  return r.emit(m, t);
}

int cmd_oracle_mmse(Runner& r) {
  const auto& o = r.o_;
  const auto prior = r.model();
  const int D = integer_degree(o.D);
  const auto lambdas = r.grid(o.lambda_grid, "lambda-grid");
  OracleOptions opts;
  opts.max_basis = o.basis_budget;
  Table t;
  t.columns = {"lambda", "D", "corr_sq_total", "mmse", "second_moment", "basis_size", "num_atoms",
               "rank", "cond_number", "product_reduced"};
  for (double l : lambdas) {
    const auto rep = exact_corr_and_mmse(prior, l, D, opts);
    t.add_row({cell(l), cell(D), cell(rep.corr_sq_total), cell(rep.mmse), cell(rep.second_moment),
               cell(rep.basis_size), cell(rep.num_atoms), cell(rep.rank), cell(rep.cond_number),
               cell(rep.product_reduced)});
  }
  auto m = r.manifest("oracle-mmse", true, false);
  m.params = {{"D", cell(D)}, {"lambda_grid", o.lambda_grid}, {"scale", o.scale}, {"basis_budget", cell(o.basis_budget)}};
  add_common(m, o);
  return r.emit(m, t);
}

int cmd_equivalence(Runner& r) {
  const auto& o = r.o_;
  EquivalenceConfig cfg;
  cfg.prior = r.model();
  cfg.D = integer_degree(o.D);
  cfg.lambdas = r.grid(o.lambda_grid, "lambda-grid");
  cfg.mc_samples = o.mc_samples;
  cfg.lower = !o.no_lower;
  cfg.upper = !o.no_upper;
  cfg.oracle = !o.no_oracle;
  cfg.upper_budget = o.enum_budget;
  if (cfg.lower) r.require_seed();
  const auto rep = equivalence_sweep(cfg, Rng(o.seed));
  Table t;
  t.columns = {"lambda", "fp_sign", "fp_derivative", "lower_sq", "lower_se", "upper_sq", "oracle_sq",
               "q_D", "q_bench", "sandwich_ok"};
  for (const auto& row : rep.rows)
    t.add_row({cell(row.lambda), cell(row.fp_sign), cell(row.fp_derivative), cell(row.lower_sq), cell(row.lower_se),
               cell(row.upper_sq), cell(row.oracle_sq), cell(row.q_D), cell(row.q_bench), cell(row.sandwich_ok)});
  t.notes = {{"model", rep.model},
             {"lambda_star", cell(rep.lambda_star)},
             {"lambda_dagger", cell(rep.lambda_dagger)},
             {"lambda_lower", cell(rep.lambda_lower)},
             {"factor", cell(rep.factor)},
             {"sandwich_violations", cell(rep.sandwich_violations)}};
  auto m = r.manifest("equivalence", true, cfg.lower);
  m.params = {{"D", cell(cfg.D)},
              {"lambda_grid", o.lambda_grid},
              {"scale", o.scale},
              {"mc_samples", cell(o.mc_samples)},
              {"lower", cell(cfg.lower)},
              {"upper", cell(cfg.upper)},
              {"oracle", cell(cfg.oracle)},
              {"enum_budget", cell(o.enum_budget)}};
  add_common(m, o);
  return r.emit(m, t);
}

int cmd_diag_threshold(Runner& r) {
  const auto& o = r.o_;
  r.require_seed();
  const auto lambdas = r.grid(o.lambda_grid, "lambda-grid");
  Table t;
  t.columns = {"n", "k", "lambda", "tau", "trials", "failures", "failure_rate", "stderr", "bound",
               "lambda_ge_2tau", "within_bound"};
  const Rng base(o.seed);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const auto tr = run_threshold_trials(o.n, o.k, lambdas[i], o.trials, base.split(i), o.tau);
    t.add_row({cell(tr.n), cell(tr.k), cell(tr.lambda), cell(tr.tau), cell(tr.trials), cell(tr.failures),
               cell(tr.failure_rate), cell(tr.stderr_), cell(tr.bound), cell(tr.lambda_ge_2tau), cell(tr.within_bound)});
  }
  auto m = r.manifest("diag-threshold", false, true);
  m.params = {{"n", cell(o.n)}, {"k", cell(o.k)}, {"lambda_grid", o.lambda_grid}, {"scale", o.scale},
              {"trials", cell(o.trials)}, {"tau", cell(o.tau)}};
  add_common(m, o);
  return r.emit(m, t);
}

std::vector<long> parse_longs(const std::string& spec, const std::string& flag) {
  std::vector<long> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stol(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ValidationError("malformed integer list: " + spec, "/flags/" + flag);
    }
  }
  if (out.empty()) throw ValidationError("empty integer list", "/flags/" + flag);
  return out;
}

int cmd_counterexample(Runner& r) {
  const auto& o = r.o_;
  r.require_seed();
  CounterexampleConfig cfg;
  cfg.n = o.n;
  cfg.k = o.k;
  cfg.D = integer_degree(o.D);
  cfg.amplitudes = r.grid(o.amplitudes, "amplitudes");
  cfg.q_primes = parse_longs(o.q_primes, "q-primes");
  cfg.q_test = o.q_test;
  cfg.replicas = o.replicas;
  cfg.budget = o.enum_budget;
  const auto rep = counterexample_experiment(cfg, Rng(o.seed));
  Table t;
  t.columns = {"amplitude", "lambda", "q_prime", "q", "annealed_diff", "quenched_diff", "quenched_stderr",
               "jensen_gap", "annealed_derivative", "annealed_sign", "corr_diag", "annealed_easy",
               "oracle_nontrivial", "quenched_positive"};
  for (const auto& row : rep.rows)
    for (std::size_t i = 0; i < row.quenched.size(); ++i) {
      const auto& e = row.quenched[i];
      t.add_row({cell(row.amplitude), cell(row.lambda), cell(e.q_prime), cell(e.q), cell(row.annealed_diffs[i]),
                 cell(e.diff_mean), cell(e.diff_stderr), cell(row.jensen_gap[i]), cell(row.annealed_derivative),
                 cell(row.annealed_sign), cell(row.corr_diag), cell(row.annealed_easy), cell(row.oracle_nontrivial),
                 cell(row.quenched_positive)});
    }
  t.notes = {{"q_D", cell(rep.q_D)},
             {"lambda_star", cell(rep.lambda_star)},
             {"found", cell(rep.found)},
             {"found_amplitude", cell(rep.found_amplitude)},
             {"verdict", rep.verdict}};
  auto m = r.manifest("counterexample", false, true);
  m.params = {{"n", cell(o.n)},          {"k", cell(o.k)},           {"D", cell(cfg.D)},
              {"amplitudes", o.amplitudes}, {"q_primes", o.q_primes}, {"q_test", cell(o.q_test)},
              {"replicas", cell(o.replicas)}, {"scale", o.scale},     {"enum_budget", cell(o.enum_budget)}};
  add_common(m, o);
  return r.emit(m, t);
}

int cmd_bessel(Runner& r) {
  const auto& o = r.o_;
  if (!(o.nu >= 0.0)) throw ValidationError("--nu must be >= 0", "/flags/nu");
  const auto xs = r.grid(o.x_grid, "x-grid");
  Table t;
  t.columns = {"x", "nu", "log_K", "K", "method", "recurrence_residual"};
  for (double x : xs) {
    if (!(x > 0.0)) throw ValidationError("x must be positive", "/flags/x-grid");
    const auto v = log_bessel_k_detail(o.nu, x);
    // K_{nu+1} - K_{nu-1} = (2 nu / x) K_nu, relative to K_{nu+1}
    const double kp = log_bessel_k(o.nu + 1.0, x), km = log_bessel_k(std::fabs(o.nu - 1.0), x);
    const double res = std::fabs(1.0 - std::exp(km - kp) - 2.0 * o.nu / x * std::exp(v.log_value - kp));
    t.add_row({cell(x), cell(o.nu), cell(v.log_value), cell(std::exp(v.log_value)), to_string(v.method), cell(res)});
  }
  auto m = r.manifest("bessel", false, false);
  m.params = {{"nu", cell(o.nu)}, {"x_grid", o.x_grid}, {"scale", o.scale}};
  add_common(m, o);
  return r.emit(m, t);
}

int cmd_selftest(Runner& r) {
  struct Check {
    const char* name;
    std::function<bool()> fn;
  };
  const std::vector<Check> checks = {
      {"numeric.log_sum_exp", [] { return std::fabs(log_sum_exp(std::vector<double>{0.0, 0.0}) - kLn2) < 1e-15; }},
      {"specfun.bessel_recurrence",
       [] {
         const double x = 2.0;
         return std::fabs(bessel_k(2.0, x) - bessel_k(0.0, x) - 2.0 / x * bessel_k(1.0, x)) < 1e-10 * bessel_k(2.0, x);
       }},
      {"priors.second_moment",
       [] { return std::fabs(second_moment_norm(PriorModel::sparse_rademacher_tensor(50, 7, 1)) - 7.0) < 1e-12; }},
      {"overlap.pmf_normalized",
       [] {
         const auto d = exact_pmf_sparse_rademacher(50, 7, 1);
         std::vector<double> lp = d.log_probs();
         return std::fabs(std::exp(log_sum_exp(lp)) - 1.0) < 1e-12;
       }},
      {"fp.identity",
       [] {
         const auto d = exact_pmf_sparse_rademacher(30, 5, 1);
         double worst = 0.0;
         for (std::size_t i = 0; i < d.atoms().size(); ++i)
           worst = std::max(worst, std::fabs(2.0 * d.atoms()[i] + annealed_fp(d, 2.0, d.atoms()[i]) + d.log_probs()[i]));
         return worst < 1e-10;
       }},
      {"cumulants.partition_vs_recursion",
       [] {
         const auto oracle = prior_moment_oracle(PriorModel::sparse_rademacher_tensor(3, 1, 2));
         const std::vector<std::size_t> vars{0, 0, 4, 4};
         const double a = cumulant_partition(oracle, vars), b = cumulant_recursive(oracle, vars);
         return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(a));
       }},
      {"estimators.weight_w",
       [] {
         const std::vector<double> y{0.3, -1.2, 0.7}, x{1.0, 0.0, -0.5};
         return std::fabs(weight_w(y, x, 3) - weight_w_enumerated(y, x, 3)) < 1e-12;
       }},
      {"oracle.closed_form",
       [] {
         const auto rep = exact_corr_and_mmse(PriorModel::discrete_atoms({{-1.0}, {1.0}}, {0.5, 0.5}), 1.0, 1);
         return std::fabs(rep.corr_sq_total - 0.5) < 1e-12;
       }},
      {"applications.diag_threshold",
       [] { return diag_threshold({-3.0, 0.5, 4.0}, 2.0) == std::vector<int>{-1, 0, 1}; }},
      {"io.manifest_hash",
       [] {
         Manifest m;
         m.subcommand = "selftest";
         return m.hash() == m.hash() && m.hash().size() == 16;
       }},
  };
  bool all = true;
  for (const auto& c : checks) {
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      r.err_ << c.name << ": " << e.what() << "\n";
    }
    all = all && ok;
    r.out_ << (ok ? "PASS " : "FAIL ") << c.name << "\n";
  }
  return all ? kExitOk : kExitFailure;
}

constexpr const char* kGridHelp =
    "Grids: \"start:stop[:count]\" spaced per --scale (log: 16 points per decade by default; "
    "lin: unit steps by default), a comma list \"a,b,c\", or a single value.";

}  // namespace

std::vector<double> parse_grid(const std::string& spec, const std::string& scale, const std::string& flag) {
  const std::string ptr = "/flags/" + flag;
  auto num = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("malformed grid value '" + s + "' in " + spec, ptr);
    }
  };
  std::vector<double> out;
  if (spec.find(',') != std::string::npos) {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(num(tok));
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() == 1) return {num(parts[0])};
  if (parts.size() < 2 || parts.size() > 3) throw ValidationError("grid must be start:stop[:count]", ptr);
  const double a = num(parts[0]), b = num(parts[1]);
  if (b < a) throw ValidationError("grid stop must be >= start", ptr);
  const bool log = scale == "log";
  if (!log && scale != "lin") throw ValidationError("--scale must be lin or log", "/flags/scale");
  if (log && !(a > 0.0)) throw ValidationError("log grid needs a positive start", ptr);
  long count = 0;
  if (parts.size() == 3) {
    const double c = num(parts[2]);
    if (c < 1 || c != std::floor(c)) throw ValidationError("grid count must be a positive integer", ptr);
    count = static_cast<long>(c);
  } else {
    count = log ? static_cast<long>(std::floor(16.0 * std::log10(b / a) + 1e-9)) + 1
                : static_cast<long>(std::floor(b - a + 1e-9)) + 1;
  }
  if (count > 1000000) throw BudgetError("grid has more than 10^6 points");
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    if (parts.size() == 2 && !log)
      out.push_back(a + static_cast<double>(i));
    else if (parts.size() == 2)
      out.push_back(a * std::pow(10.0, static_cast<double>(i) / 16.0));
    else
      out.push_back(log ? a * std::pow(b / a, t) : a + (b - a) * t);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Franz-Parisi and low-degree toolkit", "fpld"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1, 1);
  app.footer(kGridHelp);

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "64-bit seed (required for stochastic subcommands)");
    s->add_option("--threads", o.threads, "worker cap (default: available cores)");
    s->add_option("--out-dir", o.out_dir, "output directory (overrides FPLD_OUT_DIR)");
    s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--scale", o.scale, "grid spacing: lin or log")->check(CLI::IsMember({"lin", "log"}));
  };
  auto with_model = [&](CLI::App* s) {
    s->add_option("--model", o.model, "prior JSON {\"kind\": ..., \"params\": {...}}");
  };

  std::map<CLI::App*, std::function<int(Runner&)>> handlers;
  auto add = [&](const std::string& name, const std::string& desc, std::function<int(Runner&)> fn) {
    auto* s = app.add_subcommand(name, desc);
    common(s);
    handlers[s] = std::move(fn);
    return s;
  };

  auto* q = add("quantiles", "overlap quantiles q(D)", cmd_quantiles);
  with_model(q);
  q->add_option("--d-grid", o.d_grid, "D grid");
  q->add_option("--mode", o.mode, "auto, exact, analytic or empirical");
  q->add_option("--mc-samples", o.mc_samples, "overlap draws for empirical mode");

  auto* fc = add("fp-curve", "annealed FP potential curve", cmd_fp_curve);
  with_model(fc);
  fc->add_option("--lambda", o.lambda, "signal-to-noise ratio");
  fc->add_option("--d-max", o.d_max, "curve runs up to q(d-max)");
  fc->add_option("--q-grid", o.q_grid, "explicit q grid");
  fc->add_option("--mode", o.mode, "auto, exact or analytic");

  auto* fd = add("fp-derivative", "FP derivative at q(D)", cmd_fp_derivative);
  with_model(fd);
  fd->add_option("--d-grid", o.d_grid, "D grid");
  fd->add_option("--lambda-grid", o.lambda_grid, "lambda grid");
  fd->add_option("--mode", o.mode, "auto, exact or analytic");

  auto* cb = add("cumulant-bound", "cumulant upper bound on Corr^2", cmd_cumulant_bound);
  with_model(cb);
  cb->add_option("--D", o.D, "degree");
  cb->add_option("--lambda-grid", o.lambda_grid, "lambda grid");
  cb->add_option("--enum-budget", o.enum_budget, "multi-index enumeration budget");
  cb->add_flag("--table", o.table, "emit the cumulant table instead of the bound");

  auto* ec = add("estimator-corr", "overlap lower bound on Corr", cmd_estimator_corr);
  with_model(ec);
  ec->add_option("--D", o.D, "degree");
  ec->add_option("--lambda-grid", o.lambda_grid, "lambda grid");
  ec->add_option("--mc-samples", o.mc_samples, "overlap draws (>= 1000)");

  auto* om = add("oracle-mmse", "exact low-degree Corr^2 and MMSE", cmd_oracle_mmse);
  with_model(om);
  om->add_option("--D", o.D, "degree");
  om->add_option("--lambda-grid", o.lambda_grid, "lambda grid");
  om->add_option("--basis-budget", o.basis_budget, "maximum monomial basis size");

  auto* eq = add("equivalence", "FP sign flip vs correlation crossing", cmd_equivalence);
  with_model(eq);
  eq->add_option("--D", o.D, "degree");
  eq->add_option("--lambda-grid", o.lambda_grid, "lambda grid");
  eq->add_option("--mc-samples", o.mc_samples, "overlap draws for the lower bound");
  eq->add_option("--enum-budget", o.enum_budget, "cumulant enumeration budget");
  eq->add_flag("--no-lower", o.no_lower, "skip the overlap lower bound");
  eq->add_flag("--no-upper", o.no_upper, "skip the cumulant upper bound");
  eq->add_flag("--no-oracle", o.no_oracle, "skip the exact oracle");

  auto* dt = add("diag-threshold", "diagonal thresholding trials", cmd_diag_threshold);
  dt->add_option("--n", o.n, "dimension");
  dt->add_option("--k", o.k, "sparsity");
  dt->add_option("--lambda-grid", o.lambda_grid, "signal amplitudes");
  dt->add_option("--trials", o.trials, "trials per amplitude");
  dt->add_option("--tau", o.tau, "threshold (default sqrt(6 log n))");

  auto* ce = add("counterexample", "annealed vs quenched FP on the truncated model", cmd_counterexample);
  ce->add_option("--n", o.n, "dimension (<= 24)");
  ce->add_option("--k", o.k, "sparsity (<= 5)");
  ce->add_option("--D", o.D, "degree");
  ce->add_option("--amplitudes", o.amplitudes, "amplitude grid");
  ce->add_option("--q-primes", o.q_primes, "latent overlaps, comma list");
  ce->add_option("--q-test", o.q_test, "latent overlap of the quenched margin test");
  ce->add_option("--replicas", o.replicas, "outer Monte-Carlo replicas");
  ce->add_option("--enum-budget", o.enum_budget, "inner enumeration budget");

  auto* bs = add("bessel", "K_nu grid with recurrence residuals", cmd_bessel);
  bs->add_option("--nu", o.nu, "order");
  bs->add_option("--x-grid", o.x_grid, "argument grid");

  add("selftest", "identity and invariant checks", cmd_selftest);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForVersion&) {
    out << kVersionString << "\n";
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::Success&) {
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  set_max_threads(o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency()));
  Runner runner(o, sub, out, err);
  try {
    return handlers.at(sub)(runner);
  } catch (const ValidationError& e) {
    err << "error: " << e.what();
    if (!e.pointer().empty()) err << " (at " << e.pointer() << ")";
    err << "\n";
    return kExitValidation;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace fpld::cli
