#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fpld {

/// Exponent vector alpha in N^N.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : e_(n, 0) {}
  explicit MultiIndex(std::vector<int> exps);

  static MultiIndex unit(std::size_t n, std::size_t i, int power = 1);
  /// Builds alpha from a multiset of coordinate ids.
  static MultiIndex from_multiset(std::size_t n, const std::vector<std::size_t>& ids);

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_[i]; }
  int& operator[](std::size_t i) { return e_[i]; }
  const std::vector<int>& exponents() const { return e_; }

  int degree() const;
  /// alpha! exactly.
  boost::multiprecision::cpp_int factorial_exact() const;
  /// alpha! rounded to double.
  double factorial() const;
  /// Coordinates with nonzero exponent.
  std::vector<std::size_t> support() const;
  /// Coordinate ids repeated by multiplicity, ascending.
  std::vector<std::size_t> as_multiset() const;
  /// "i:e;j:f" over the support, ascending ids.
  std::string to_pairs() const;

  /// gamma <= alpha componentwise.
  bool dominates(const MultiIndex& gamma) const;
  /// prod_j x_j^{alpha_j}.
  double power_of(const std::vector<double>& x) const;

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  /// Graded lexicographic order: degree first, then larger leading exponents first.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);

private:
  std::vector<int> e_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const noexcept;
};

/// prod_j C(alpha_j, gamma_j).
double multi_binomial(const MultiIndex& alpha, const MultiIndex& gamma);

/// All alpha over n coordinates with min_degree <= |alpha| <= max_degree, in
/// graded-lex order.
std::vector<MultiIndex> enumerate_multi_indices(std::size_t n, int max_degree, int min_degree = 0);
/// Number of alpha over n coordinates with |alpha| <= d, saturating at 2^62.
std::size_t count_multi_indices(std::size_t n, int d);

/// Enumerates set partitions of {0..m-1} as restricted-growth strings:
/// fn(block_of, num_blocks) with block_of[i] the block id of element i.
void for_each_set_partition(int m, const std::function<void(const std::vector<int>&, int)>& fn);

/// Calls fn(gamma) for every gamma <= alpha.
void for_each_dominated(const MultiIndex& alpha, const std::function<void(const MultiIndex&)>& fn);

}  // namespace fpld
