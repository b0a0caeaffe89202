#include "fpld/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"
#include "json.hpp"

namespace fpld {

using json = nlohmann::json;

namespace {

std::size_t checked_pow(long base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (std::size_t{1} << 50) / static_cast<std::size_t>(base))
      throw BudgetError("ambient dimension overflows 2^50");
    r *= static_cast<std::size_t>(base);
  }
  return r;
}

bool is_tensor(PriorKind k) {
  return k == PriorKind::gaussian_tensor || k == PriorKind::sparse_rademacher_tensor ||
         k == PriorKind::truncated_sparse_tensor3;
}

double sparse_rad_moment(double rho, int e) {
  if (e == 0) return 1.0;
  return (e % 2 == 1) ? 0.0 : rho;
}

double gaussian_moment(int e) { return (e % 2 == 1) ? 0.0 : odd_double_factorial(e / 2); }

// Sum over set partitions of r tensor slots, all blocks mapped to distinct
// latent coordinates: sum_pi [n]_{|pi|} prod_B m(|B|)^2.
double tensor_mean_norm_sq(long n, int r, const std::function<double(int)>& m) {
  CompensatedSum total;
  for_each_set_partition(r, [&](const std::vector<int>& block_of, int blocks) {
    if (blocks > n) return;
    std::vector<int> sizes(static_cast<std::size_t>(blocks), 0);
    for (int b : block_of) sizes[static_cast<std::size_t>(b)] += 1;
    double term = 1.0;
    for (int j = 0; j < blocks; ++j) term *= static_cast<double>(n - j);
    for (int sz : sizes) {
      const double v = m(sz);
      term *= v * v;
    }
    total.add(term);
  });
  return total.value();
}

double binomial_log_pmf(long n, double p, long t) {
  return log_binomial(static_cast<double>(n), static_cast<double>(t)) + t * std::log(p) +
         (n - t) * std::log1p(-p);
}

}  // namespace

PriorModel PriorModel::gaussian_tensor(long n, int r) {
  PriorModel m;
  m.kind = PriorKind::gaussian_tensor;
  m.n = n;
  m.r = r;
  m.validate();
  return m;
}

PriorModel PriorModel::sparse_rademacher_tensor(long n, long k, int r) {
  PriorModel m;
  m.kind = PriorKind::sparse_rademacher_tensor;
  m.n = n;
  m.k = k;
  m.r = r;
  m.validate();
  return m;
}

PriorModel PriorModel::sparse_clustering(long n, long p, long s, double delta) {
  PriorModel m;
  m.kind = PriorKind::sparse_clustering;
  m.n = n;
  m.p = p;
  m.s = s;
  m.delta = delta;
  m.validate();
  return m;
}

PriorModel PriorModel::truncated_sparse_tensor3(long n, long k) {
  PriorModel m;
  m.kind = PriorKind::truncated_sparse_tensor3;
  m.n = n;
  m.k = k;
  m.r = 3;
  m.validate();
  return m;
}

PriorModel PriorModel::discrete_atoms(std::vector<std::vector<double>> atoms, std::vector<double> probs) {
  PriorModel m;
  m.kind = PriorKind::discrete_atoms;
  m.atoms = std::move(atoms);
  m.probs = std::move(probs);
  m.r = 1;
  m.validate();
  return m;
}

void PriorModel::validate() const {
  switch (kind) {
    case PriorKind::gaussian_tensor:
      if (n < 1) throw ValidationError("n must be >= 1", "/params/n");
      if (r < 1) throw ValidationError("r must be >= 1", "/params/r");
      break;
    case PriorKind::sparse_rademacher_tensor:
      if (n < 1) throw ValidationError("n must be >= 1", "/params/n");
      if (k < 1 || k > n) throw ValidationError("k must satisfy 1 <= k <= n", "/params/k");
      if (r < 1) throw ValidationError("r must be >= 1", "/params/r");
      break;
    case PriorKind::sparse_clustering:
      if (n < 1) throw ValidationError("n must be >= 1", "/params/n");
      if (p < 1) throw ValidationError("p must be >= 1", "/params/p");
      if (s < 1 || s > p) throw ValidationError("s must satisfy 1 <= s <= p", "/params/s");
      if (!(delta > 0.0)) throw ValidationError("delta must be positive", "/params/delta");
      break;
    case PriorKind::truncated_sparse_tensor3:
      if (n < 1) throw ValidationError("n must be >= 1", "/params/n");
      if (k < 1 || k > n) throw ValidationError("k must satisfy 1 <= k <= n", "/params/k");
      if (r != 3) throw ValidationError("truncated model has order 3", "/params/r");
      break;
    case PriorKind::discrete_atoms: {
      if (atoms.empty()) throw ValidationError("at least one atom required", "/params/atoms");
      if (atoms.size() != probs.size())
        throw ValidationError("atoms and probs must have equal length", "/params/probs");
      const std::size_t dim = atoms.front().size();
      if (dim == 0) throw ValidationError("atoms must be nonempty vectors", "/params/atoms/0");
      double total = 0.0;
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (atoms[a].size() != dim)
          throw ValidationError("all atoms must have equal length", "/params/atoms/" + std::to_string(a));
        if (!(probs[a] >= 0.0))
          throw ValidationError("probabilities must be nonnegative", "/params/probs/" + std::to_string(a));
        total += probs[a];
      }
      if (std::fabs(total - 1.0) > 1e-12) throw ValidationError("probabilities must sum to 1", "/params/probs");
      break;
    }
  }
}

std::size_t PriorModel::ambient_dim() const {
  switch (kind) {
    case PriorKind::gaussian_tensor:
    case PriorKind::sparse_rademacher_tensor:
    case PriorKind::truncated_sparse_tensor3:
      return checked_pow(n, r);
    case PriorKind::sparse_clustering:
      return static_cast<std::size_t>(n) * static_cast<std::size_t>(p);
    case PriorKind::discrete_atoms:
      return atoms.front().size();
  }
  return 0;
}

int PriorModel::order() const { return is_tensor(kind) ? r : 1; }

bool PriorModel::is_finite_support() const { return kind != PriorKind::gaussian_tensor && kind != PriorKind::sparse_clustering; }

std::string PriorModel::id() const {
  std::ostringstream os;
  os << to_string(kind) << '(';
  switch (kind) {
    case PriorKind::gaussian_tensor:
      os << "n=" << n << ",r=" << r;
      break;
    case PriorKind::sparse_rademacher_tensor:
      os << "n=" << n << ",k=" << k << ",r=" << r;
      break;
    case PriorKind::sparse_clustering:
      os << "n=" << n << ",p=" << p << ",s=" << s << ",delta=" << format_double(delta);
      break;
    case PriorKind::truncated_sparse_tensor3:
      os << "n=" << n << ",k=" << k;
      break;
    case PriorKind::discrete_atoms:
      os << "atoms=" << atoms.size() << ",dim=" << atoms.front().size();
      break;
  }
  os << ')';
  return os.str();
}

GamInstance::GamInstance(PriorModel prior_in, double snr_in) : prior(std::move(prior_in)), snr(snr_in) {
  prior.validate();
  if (!(snr >= 0.0) || !std::isfinite(snr)) throw ValidationError("snr must be finite and >= 0", "/snr");
}

Latent sample_latent(const PriorModel& prior, Rng& rng) {
  Latent lat;
  const auto n = static_cast<std::size_t>(prior.n);
  switch (prior.kind) {
    case PriorKind::gaussian_tensor:
      lat.v.resize(n);
      for (auto& x : lat.v) x = rng.normal();
      break;
    case PriorKind::sparse_rademacher_tensor: {
      const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
      lat.v.assign(n, 0.0);
      for (auto& x : lat.v)
        if (rng.bernoulli(rho)) x = rng.sign();
      break;
    }
    case PriorKind::sparse_clustering: {
      const double rho = static_cast<double>(prior.s) / static_cast<double>(prior.p);
      lat.xi.resize(n);
      for (auto& x : lat.xi) x = rng.sign();
      lat.mu.assign(static_cast<std::size_t>(prior.p), 0.0);
      for (auto& x : lat.mu)
        if (rng.bernoulli(rho)) x = rng.normal();
      break;
    }
    case PriorKind::truncated_sparse_tensor3: {
      const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
      lat.v.assign(n, 0.0);
      long support = 0;
      for (auto& x : lat.v)
        if (rng.bernoulli(rho)) {
          x = rng.sign();
          ++support;
        }
      if (support < prior.band_lo() || support > prior.band_hi()) {
        std::fill(lat.v.begin(), lat.v.end(), 0.0);
        std::fill(lat.v.begin(), lat.v.begin() + prior.k, 1.0);
      }
      break;
    }
    case PriorKind::discrete_atoms: {
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t a = 0;
      for (; a + 1 < prior.probs.size(); ++a) {
        acc += prior.probs[a];
        if (u < acc) break;
      }
      lat.atom = static_cast<long>(a);
      lat.v = prior.atoms[a];
      break;
    }
  }
  return lat;
}

std::vector<double> flatten(const PriorModel& prior, const Latent& lat) {
  switch (prior.kind) {
    case PriorKind::gaussian_tensor:
    case PriorKind::sparse_rademacher_tensor:
    case PriorKind::truncated_sparse_tensor3: {
      std::vector<double> cur{1.0};
      for (int j = 0; j < prior.r; ++j) {
        std::vector<double> next;
        next.reserve(cur.size() * lat.v.size());
        for (double c : cur)
          for (double x : lat.v) next.push_back(c * x);
        cur.swap(next);
      }
      return cur;
    }
    case PriorKind::sparse_clustering: {
      std::vector<double> flat;
      flat.reserve(lat.xi.size() * lat.mu.size());
      for (double a : lat.xi)
        for (double b : lat.mu) flat.push_back(a * b);
      return flat;
    }
    case PriorKind::discrete_atoms:
      return lat.v;
  }
  return {};
}

std::vector<long> unflatten_index(const PriorModel& prior, std::size_t f) {
  if (prior.kind == PriorKind::sparse_clustering)
    return {static_cast<long>(f / static_cast<std::size_t>(prior.p)), static_cast<long>(f % static_cast<std::size_t>(prior.p))};
  if (prior.kind == PriorKind::discrete_atoms) return {static_cast<long>(f)};
  std::vector<long> pos(static_cast<std::size_t>(prior.r));
  for (int j = prior.r - 1; j >= 0; --j) {
    pos[static_cast<std::size_t>(j)] = static_cast<long>(f % static_cast<std::size_t>(prior.n));
    f /= static_cast<std::size_t>(prior.n);
  }
  return pos;
}

double tensor_entry(const PriorModel& prior, const Latent& lat, const std::vector<long>& pos) {
  switch (prior.kind) {
    case PriorKind::sparse_clustering:
      return lat.xi.at(static_cast<std::size_t>(pos.at(0))) * lat.mu.at(static_cast<std::size_t>(pos.at(1)));
    case PriorKind::discrete_atoms:
      return lat.v.at(static_cast<std::size_t>(pos.at(0)));
    default: {
      double r = 1.0;
      for (long i : pos) r *= lat.v.at(static_cast<std::size_t>(i));
      return r;
    }
  }
}

SignalSample sample_signal(const PriorModel& prior, Rng& rng) {
  SignalSample s;
  s.latent = sample_latent(prior, rng);
  s.flat = flatten(prior, s.latent);
  return s;
}

Observation sample_observation(const GamInstance& gam, Rng& rng) {
  Observation obs;
  obs.signal = sample_signal(gam.prior, rng);
  const double a = std::sqrt(gam.snr);
  obs.y.resize(obs.signal.flat.size());
  for (std::size_t i = 0; i < obs.y.size(); ++i) obs.y[i] = a * obs.signal.flat[i] + rng.normal();
  return obs;
}

double latent_overlap(const PriorModel& prior, const Latent& a, const Latent& b) {
  auto dot = [](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  switch (prior.kind) {
    case PriorKind::sparse_clustering:
      return dot(a.xi, b.xi) * dot(a.mu, b.mu);
    case PriorKind::discrete_atoms:
      return dot(a.v, b.v);
    default:
      return std::pow(dot(a.v, b.v), prior.r);
  }
}

std::vector<int> latent_exponents(const PriorModel& prior, const MultiIndex& alpha) {
  if (alpha.size() != prior.ambient_dim())
    throw ValidationError("multi-index length must equal the ambient dimension");
  if (prior.kind == PriorKind::discrete_atoms) return alpha.exponents();
  const bool clustering = prior.kind == PriorKind::sparse_clustering;
  std::vector<int> e(static_cast<std::size_t>(prior.n + (clustering ? prior.p : 0)), 0);
  for (std::size_t f : alpha.support()) {
    const auto pos = unflatten_index(prior, f);
    if (clustering) {
      e[static_cast<std::size_t>(pos[0])] += alpha[f];
      e[static_cast<std::size_t>(prior.n + pos[1])] += alpha[f];
    } else {
      for (long i : pos) e[static_cast<std::size_t>(i)] += alpha[f];
    }
  }
  return e;
}

double latent_marginal_moment(const PriorModel& prior, int e) {
  switch (prior.kind) {
    case PriorKind::gaussian_tensor:
      return gaussian_moment(e);
    case PriorKind::sparse_rademacher_tensor:
      return sparse_rad_moment(static_cast<double>(prior.k) / static_cast<double>(prior.n), e);
    case PriorKind::sparse_clustering:
      return e == 0 ? 1.0 : static_cast<double>(prior.s) / static_cast<double>(prior.p) * gaussian_moment(e);
    default:
      throw ValidationError("latent marginal moments are defined for product priors only");
  }
}

MomentValue moment(const PriorModel& prior, const MultiIndex& alpha, int degree_cap) {
  if (alpha.degree() > degree_cap)
    throw BudgetError("moment degree " + std::to_string(alpha.degree()) + " exceeds cap " + std::to_string(degree_cap));
  if (alpha.size() != prior.ambient_dim())
    throw ValidationError("multi-index length must equal the ambient dimension");
  switch (prior.kind) {
    case PriorKind::discrete_atoms: {
      CompensatedSum s;
      for (std::size_t a = 0; a < prior.atoms.size(); ++a) s.add(prior.probs[a] * alpha.power_of(prior.atoms[a]));
      return {s.value(), true};
    }
    case PriorKind::truncated_sparse_tensor3: {
      Rng rng(0x5eedULL ^ MultiIndexHash{}(alpha));
      constexpr int kDraws = 200000;
      CompensatedSum s;
      const auto supp = alpha.support();
      for (int t = 0; t < kDraws; ++t) {
        const Latent lat = sample_latent(prior, rng);
        double prod = 1.0;
        for (std::size_t f : supp) prod *= std::pow(tensor_entry(prior, lat, unflatten_index(prior, f)), alpha[f]);
        s.add(prod);
      }
      return {s.value() / kDraws, false};
    }
    default:
      break;
  }
  const auto e = latent_exponents(prior, alpha);
  double r = 1.0;
  if (prior.kind == PriorKind::sparse_clustering) {
    const double rho = static_cast<double>(prior.s) / static_cast<double>(prior.p);
    for (long i = 0; i < prior.n && r != 0.0; ++i)
      if (e[static_cast<std::size_t>(i)] % 2 == 1) r = 0.0;
    for (long j = 0; j < prior.p && r != 0.0; ++j) {
      const int ej = e[static_cast<std::size_t>(prior.n + j)];
      if (ej > 0) r *= rho * gaussian_moment(ej);
    }
    return {r, true};
  }
  for (int ei : e) {
    if (ei == 0) continue;
    r *= latent_marginal_moment(prior, ei);
    if (r == 0.0) break;
  }
  return {r, true};
}

double truncation_probability(long n, long k) {
  const double rho = static_cast<double>(k) / static_cast<double>(n);
  const long lo = (k + 1) / 2, hi = 2 * k;
  CompensatedSum in_band;
  for (long m = lo; m <= std::min(hi, n); ++m) in_band.add(std::exp(binomial_log_pmf(n, rho, m)));
  return std::max(0.0, 1.0 - in_band.value());
}

double second_moment_norm(const PriorModel& prior) {
  switch (prior.kind) {
    case PriorKind::gaussian_tensor: {
      double r = 1.0;
      for (int j = 0; j < prior.r; ++j) r *= static_cast<double>(prior.n + 2 * j);
      return r;
    }
    case PriorKind::sparse_rademacher_tensor: {
      if (prior.r == 1) return static_cast<double>(prior.k);
      const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
      if (prior.k == prior.n) return std::pow(static_cast<double>(prior.n), prior.r);
      CompensatedSum s;
      for (long t = 1; t <= prior.n; ++t) s.add(std::exp(binomial_log_pmf(prior.n, rho, t) + prior.r * std::log(static_cast<double>(t))));
      return s.value();
    }
    case PriorKind::sparse_clustering:
      return static_cast<double>(prior.n) * static_cast<double>(prior.s);
    case PriorKind::truncated_sparse_tensor3: {
      const double rho = static_cast<double>(prior.k) / static_cast<double>(prior.n);
      CompensatedSum s;
      for (long m = prior.band_lo(); m <= std::min(prior.band_hi(), prior.n); ++m)
        s.add(std::exp(binomial_log_pmf(prior.n, rho, m)) * std::pow(static_cast<double>(m), 3));
      s.add(truncation_probability(prior.n, prior.k) * std::pow(static_cast<double>(prior.k), 3));
      return s.value();
    }
    case PriorKind::discrete_atoms: {
      CompensatedSum s;
      for (std::size_t a = 0; a < prior.atoms.size(); ++a)
        for (double x : prior.atoms[a]) s.add(prior.probs[a] * x * x);
      return s.value();
    }
  }
  return 0.0;
}

double mean_norm_sq(const PriorModel& prior) {
  switch (prior.kind) {
    case PriorKind::gaussian_tensor:
    case PriorKind::sparse_rademacher_tensor:
      return tensor_mean_norm_sq(prior.n, prior.r, [&](int e) { return latent_marginal_moment(prior, e); });
    case PriorKind::sparse_clustering:
      return 0.0;
    case PriorKind::truncated_sparse_tensor3: {
      const double pout = truncation_probability(prior.n, prior.k);
      return pout * pout * std::pow(static_cast<double>(prior.k), 3);
    }
    case PriorKind::discrete_atoms: {
      double total = 0.0;
      for (std::size_t i = 0; i < prior.atoms.front().size(); ++i) {
        CompensatedSum m;
        for (std::size_t a = 0; a < prior.atoms.size(); ++a) m.add(prior.probs[a] * prior.atoms[a][i]);
        total += m.value() * m.value();
      }
      return total;
    }
  }
  return 0.0;
}

double trivial_mmse(const PriorModel& prior) { return second_moment_norm(prior) - mean_norm_sq(prior); }

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::gaussian_tensor: return "gaussian_tensor";
    case PriorKind::sparse_rademacher_tensor: return "sparse_rademacher_tensor";
    case PriorKind::sparse_clustering: return "sparse_clustering";
    case PriorKind::truncated_sparse_tensor3: return "truncated_sparse_tensor3";
    case PriorKind::discrete_atoms: return "discrete_atoms";
  }
  return "unknown";
}

namespace {

long get_int(const json& params, const char* key, const std::string& base) {
  const std::string ptr = base + "/" + key;
  if (!params.contains(key)) throw ValidationError(std::string("missing parameter '") + key + "'", ptr);
  const json& v = params.at(key);
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::fabs(d) < 9e15) return static_cast<long>(d);
  }
  throw ValidationError(std::string("parameter '") + key + "' must be an integer", ptr);
}

double get_real(const json& params, const char* key, const std::string& base) {
  const std::string ptr = base + "/" + key;
  if (!params.contains(key)) throw ValidationError(std::string("missing parameter '") + key + "'", ptr);
  const json& v = params.at(key);
  if (!v.is_number()) throw ValidationError(std::string("parameter '") + key + "' must be a number", ptr);
  return v.get<double>();
}

void reject_unknown(const json& params, std::initializer_list<const char*> allowed) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ValidationError("unknown parameter '" + it.key() + "'", "/params/" + it.key());
  }
}

}  // namespace

PriorModel prior_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("model JSON does not parse: ") + e.what(), "");
  }
  if (!doc.is_object()) throw ValidationError("model must be a JSON object", "");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "kind" && it.key() != "params")
      throw ValidationError("unknown field '" + it.key() + "'", "/" + it.key());
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ValidationError("'kind' must be a string", "/kind");
  if (!doc.contains("params") || !doc["params"].is_object())
    throw ValidationError("'params' must be an object", "/params");
  const std::string kind = doc["kind"].get<std::string>();
  const json& p = doc["params"];
  const std::string base = "/params";
  auto to_int = [](long v) {
    if (v > 1000000000L || v < -1000000000L) throw ValidationError("integer parameter out of range");
    return static_cast<int>(v);
  };
  if (kind == "gaussian_tensor") {
    reject_unknown(p, {"n", "r"});
    return PriorModel::gaussian_tensor(get_int(p, "n", base), to_int(get_int(p, "r", base)));
  }
  if (kind == "sparse_rademacher_tensor") {
    reject_unknown(p, {"n", "k", "r"});
    return PriorModel::sparse_rademacher_tensor(get_int(p, "n", base), get_int(p, "k", base),
                                                to_int(get_int(p, "r", base)));
  }
  if (kind == "sparse_clustering") {
    reject_unknown(p, {"n", "p", "s", "delta"});
    return PriorModel::sparse_clustering(get_int(p, "n", base), get_int(p, "p", base), get_int(p, "s", base),
                                         get_real(p, "delta", base));
  }
  if (kind == "truncated_sparse_tensor3") {
    reject_unknown(p, {"n", "k"});
    return PriorModel::truncated_sparse_tensor3(get_int(p, "n", base), get_int(p, "k", base));
  }
  if (kind == "discrete_atoms") {
    reject_unknown(p, {"atoms", "probs"});
    if (!p.contains("atoms") || !p["atoms"].is_array()) throw ValidationError("'atoms' must be an array", "/params/atoms");
    if (!p.contains("probs") || !p["probs"].is_array()) throw ValidationError("'probs' must be an array", "/params/probs");
    std::vector<std::vector<double>> atoms;
    for (std::size_t a = 0; a < p["atoms"].size(); ++a) {
      const json& row = p["atoms"][a];
      const std::string ptr = "/params/atoms/" + std::to_string(a);
      if (!row.is_array()) throw ValidationError("atom must be an array of numbers", ptr);
      std::vector<double> x;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!row[i].is_number()) throw ValidationError("atom entries must be numbers", ptr + "/" + std::to_string(i));
        x.push_back(row[i].get<double>());
      }
      atoms.push_back(std::move(x));
    }
    std::vector<double> probs;
    for (std::size_t a = 0; a < p["probs"].size(); ++a) {
      if (!p["probs"][a].is_number())
        throw ValidationError("probabilities must be numbers", "/params/probs/" + std::to_string(a));
      probs.push_back(p["probs"][a].get<double>());
    }
    return PriorModel::discrete_atoms(std::move(atoms), std::move(probs));
  }
  throw ValidationError("unknown prior kind '" + kind + "'", "/kind");
}

std::string prior_to_json(const PriorModel& m) {
  json p = json::object();
  switch (m.kind) {
    case PriorKind::gaussian_tensor:
      p = {{"n", m.n}, {"r", m.r}};
      break;
    case PriorKind::sparse_rademacher_tensor:
      p = {{"n", m.n}, {"k", m.k}, {"r", m.r}};
      break;
    case PriorKind::sparse_clustering:
      p = {{"n", m.n}, {"p", m.p}, {"s", m.s}, {"delta", m.delta}};
      break;
    case PriorKind::truncated_sparse_tensor3:
      p = {{"n", m.n}, {"k", m.k}};
      break;
    case PriorKind::discrete_atoms:
      p = {{"atoms", m.atoms}, {"probs", m.probs}};
      break;
  }
  return json{{"kind", to_string(m.kind)}, {"params", p}}.dump();
}

}  // namespace fpld
