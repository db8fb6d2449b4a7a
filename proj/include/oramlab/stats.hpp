#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace oramlab::stats {

struct ChiSquare {
  double statistic = 0.0;
  unsigned dof = 0;
  double p = 1.0;
};

/// Upper tail of the chi-squared distribution. dof 0 gives 1.
double chi2_sf(double x, unsigned dof);

/// Goodness of fit against equal cell probabilities.
ChiSquare uniformity(std::span<const std::uint64_t> counts);

/// Pearson test of independence on an r x c table. Empty rows and columns
/// are dropped before counting degrees of freedom.
ChiSquare independence(const std::vector<std::vector<std::uint64_t>>& table);

/// Two-sample homogeneity test on paired category counts (2 x K table).
/// Categories whose smaller expected count falls below 5 are pooled, smallest
/// first, into one bin; a pool that still falls short joins the smallest
/// remaining category.
ChiSquare two_sample(std::vector<std::pair<std::uint64_t, std::uint64_t>> cells);

template <class Key>
ChiSquare two_sample(const std::map<Key, std::pair<std::uint64_t, std::uint64_t>>& counts) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
  cells.reserve(counts.size());
  for (const auto& [k, c] : counts) cells.push_back(c);
  return two_sample(std::move(cells));
}

/// Two-sample test for ordered values: pooled-sample quantile bins (a run of
/// equal values never straddles a bin edge), then two_sample().
template <class T>
ChiSquare two_sample_ordinal(std::vector<T> a, std::vector<T> b, unsigned bins = 10) {
  std::vector<std::pair<T, int>> pooled;
  pooled.reserve(a.size() + b.size());
  for (auto& v : a) pooled.emplace_back(std::move(v), 0);
  for (auto& v : b) pooled.emplace_back(std::move(v), 1);
  std::sort(pooled.begin(), pooled.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
  if (pooled.empty() || bins == 0) return {};
  const std::size_t target = std::max<std::size_t>(1, (pooled.size() + bins - 1) / bins);
  std::pair<std::uint64_t, std::uint64_t> cur{0, 0};
  std::size_t in_bin = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    (pooled[i].second == 0 ? cur.first : cur.second)++;
    ++in_bin;
    const bool boundary = i + 1 == pooled.size() || pooled[i + 1].first != pooled[i].first;
    if (boundary && in_bin >= target) {
      cells.push_back(cur);
      cur = {0, 0};
      in_bin = 0;
    }
  }
  if (in_bin) cells.push_back(cur);
  return two_sample(std::move(cells));
}

/// Bonferroni-adjusted minimum of m p-values, clipped to 1.
double bonferroni(std::span<const double> p);

}  // namespace oramlab::stats
