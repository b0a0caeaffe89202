#include "fpld/multi_index.hpp"

#include <algorithm>
#include <cmath>

#include "fpld/error.hpp"
#include "fpld/numeric.hpp"

namespace fpld {

MultiIndex::MultiIndex(std::vector<int> exps) : e_(std::move(exps)) {
  for (int v : e_)
    if (v < 0) throw ValidationError("multi-index exponents must be nonnegative");
}

MultiIndex MultiIndex::unit(std::size_t n, std::size_t i, int power) {
  MultiIndex a(n);
  a.e_.at(i) = power;
  return a;
}

MultiIndex MultiIndex::from_multiset(std::size_t n, const std::vector<std::size_t>& ids) {
  MultiIndex a(n);
  for (auto i : ids) a.e_.at(i) += 1;
  return a;
}

int MultiIndex::degree() const {
  int d = 0;
  for (int v : e_) d += v;
  return d;
}

boost::multiprecision::cpp_int MultiIndex::factorial_exact() const {
  boost::multiprecision::cpp_int r = 1;
  for (int v : e_)
    for (int j = 2; j <= v; ++j) r *= j;
  return r;
}

double MultiIndex::factorial() const { return factorial_exact().convert_to<double>(); }

std::vector<std::size_t> MultiIndex::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < e_.size(); ++i)
    if (e_[i] != 0) s.push_back(i);
  return s;
}

std::vector<std::size_t> MultiIndex::as_multiset() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < e_.size(); ++i)
    for (int j = 0; j < e_[i]; ++j) s.push_back(i);
  return s;
}

std::string MultiIndex::to_pairs() const {
  std::string out;
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (e_[i] == 0) continue;
    if (!out.empty()) out += ';';
    out += std::to_string(i) + ':' + std::to_string(e_[i]);
  }
  return out;
}

bool MultiIndex::dominates(const MultiIndex& gamma) const {
  if (gamma.size() != size()) return false;
  for (std::size_t i = 0; i < e_.size(); ++i)
    if (gamma.e_[i] > e_[i]) return false;
  return true;
}

double MultiIndex::power_of(const std::vector<double>& x) const {
  double r = 1.0;
  for (std::size_t i = 0; i < e_.size(); ++i)
    if (e_[i] != 0) r *= std::pow(x[i], e_[i]);
  return r;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < e_.size(); ++i) {
    r.e_[i] -= o.e_[i];
    if (r.e_[i] < 0) throw ValidationError("multi-index subtraction went negative");
  }
  return r;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.e_[i] != b.e_[i]) return b.e_[i] <=> a.e_[i];
  return std::strong_ordering::equal;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& a) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (int v : a.exponents()) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

double multi_binomial(const MultiIndex& alpha, const MultiIndex& gamma) {
  double r = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) r *= binomial(alpha[i], gamma[i]);
  return r;
}

namespace {
void compositions(std::size_t n, int total, std::size_t pos, std::vector<int>& cur,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == n) {
    cur[pos] = total;
    out.emplace_back(cur);
    cur[pos] = 0;
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur[pos] = v;
    compositions(n, total - v, pos + 1, cur, out);
  }
  cur[pos] = 0;
}
}  // namespace

std::vector<MultiIndex> enumerate_multi_indices(std::size_t n, int max_degree, int min_degree) {
  std::vector<MultiIndex> out;
  if (n == 0) {
    if (min_degree <= 0 && max_degree >= 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  std::vector<int> cur(n, 0);
  for (int d = std::max(0, min_degree); d <= max_degree; ++d) compositions(n, d, 0, cur, out);
  return out;
}

std::size_t count_multi_indices(std::size_t n, int d) {
  // C(n + d, d)
  long double r = 1.0L;
  for (int j = 1; j <= d; ++j) {
    r = r * static_cast<long double>(n + static_cast<std::size_t>(j)) / j;
    if (r > 4.6e18L) return std::size_t{1} << 62;
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(r)));
}

void for_each_set_partition(int m, const std::function<void(const std::vector<int>&, int)>& fn) {
  if (m <= 0) {
    fn({}, 0);
    return;
  }
  std::vector<int> a(static_cast<std::size_t>(m), 0);
  std::vector<int> mx(static_cast<std::size_t>(m), 0);  // mx[i] = max(a[0..i])
  for (;;) {
    fn(a, mx[static_cast<std::size_t>(m) - 1] + 1);
    int i = m - 1;
    while (i > 0 && a[static_cast<std::size_t>(i)] > mx[static_cast<std::size_t>(i) - 1]) --i;
    if (i == 0) return;
    a[static_cast<std::size_t>(i)] += 1;
    mx[static_cast<std::size_t>(i)] = std::max(mx[static_cast<std::size_t>(i) - 1], a[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < m; ++j) {
      a[static_cast<std::size_t>(j)] = 0;
      mx[static_cast<std::size_t>(j)] = mx[static_cast<std::size_t>(i)];
    }
  }
}

void for_each_dominated(const MultiIndex& alpha, const std::function<void(const MultiIndex&)>& fn) {
  MultiIndex g(alpha.size());
  const std::size_t n = alpha.size();
  for (;;) {
    fn(g);
    std::size_t i = 0;
    while (i < n && g[i] == alpha[i]) {
      g[i] = 0;
      ++i;
    }
    if (i == n) return;
    g[i] += 1;
  }
}

}  // namespace fpld
