#include "oramlab/stats.hpp"

#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

namespace oramlab::stats {

double chi2_sf(double x, unsigned dof) {
  if (dof == 0) return 1.0;
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

ChiSquare uniformity(std::span<const std::uint64_t> counts) {
  ChiSquare r;
  if (counts.size() < 2) return r;
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (total == 0) return r;
  const double expected = total / static_cast<double>(counts.size());
  for (const auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.dof = static_cast<unsigned>(counts.size() - 1);
  r.p = chi2_sf(r.statistic, r.dof);
  return r;
}

ChiSquare independence(const std::vector<std::vector<std::uint64_t>>& table) {
  ChiSquare r;
  if (table.empty()) return r;
  const std::size_t cols = table.front().size();
  std::vector<double> row_sum(table.size(), 0.0), col_sum(cols, 0.0);
  double total = 0;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = static_cast<double>(table[i][j]);
      row_sum[i] += v;
      col_sum[j] += v;
      total += v;
    }
  if (total == 0) return r;
  const auto live_rows = std::count_if(row_sum.begin(), row_sum.end(), [](double v) { return v > 0; });
  const auto live_cols = std::count_if(col_sum.begin(), col_sum.end(), [](double v) { return v > 0; });
  if (live_rows < 2 || live_cols < 2) return r;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (row_sum[i] == 0) continue;
    for (std::size_t j = 0; j < cols; ++j) {
      if (col_sum[j] == 0) continue;
      const double e = row_sum[i] * col_sum[j] / total;
      const double d = static_cast<double>(table[i][j]) - e;
      r.statistic += d * d / e;
    }
  }
  r.dof = static_cast<unsigned>((live_rows - 1) * (live_cols - 1));
  r.p = chi2_sf(r.statistic, r.dof);
  return r;
}

ChiSquare two_sample(std::vector<std::pair<std::uint64_t, std::uint64_t>> cells) {
  ChiSquare r;
  std::uint64_t na = 0, nb = 0;
  for (const auto& [a, b] : cells) {
    na += a;
    nb += b;
  }
  if (na == 0 || nb == 0) return r;
  const double n = static_cast<double>(na + nb);
  const double small_row = static_cast<double>(std::min(na, nb));
  auto min_expected = [&](const std::pair<std::uint64_t, std::uint64_t>& c) {
    return static_cast<double>(c.first + c.second) * small_row / n;
  };

  std::erase_if(cells, [](const auto& c) { return c.first + c.second == 0; });
  // Smallest totals first; stable so equal totals keep category order.
  std::stable_sort(cells.begin(), cells.end(),
                   [](const auto& x, const auto& y) { return x.first + x.second < y.first + y.second; });

  std::vector<std::pair<std::uint64_t, std::uint64_t>> kept;
  std::pair<std::uint64_t, std::uint64_t> pool{0, 0};
  for (const auto& c : cells) {
    if (min_expected(c) >= 5.0) {
      kept.push_back(c);
    } else {
      pool.first += c.first;
      pool.second += c.second;
    }
  }
  if (pool.first + pool.second > 0) {
    if (min_expected(pool) >= 5.0 || kept.empty()) {
      kept.push_back(pool);
    } else {
      kept.front().first += pool.first;
      kept.front().second += pool.second;
    }
  }
  if (kept.size() < 2) return r;

  for (const auto& [a, b] : kept) {
    const double col = static_cast<double>(a + b);
    const double ea = col * static_cast<double>(na) / n;
    const double eb = col * static_cast<double>(nb) / n;
    r.statistic += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
  }
  r.dof = static_cast<unsigned>(kept.size() - 1);
  r.p = chi2_sf(r.statistic, r.dof);
  return r;
}

double bonferroni(std::span<const double> p) {
  if (p.empty()) return 1.0;
  const double m = *std::min_element(p.begin(), p.end());
  return std::min(1.0, m * static_cast<double>(p.size()));
}

}  // namespace oramlab::stats
