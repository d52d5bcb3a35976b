#include "pkgpulse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "pkgpulse/error.hpp"

namespace pkgpulse {

std::vector<double> average_ranks(std::span<const double> scores, bool descending) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of positions i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw DimensionMismatch("correlation needs equal, nonempty inputs");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw UndefinedCorrelation("correlation of a constant list");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman_rho(std::span<const double> gold, std::span<const double> pred) {
  if (gold.size() != pred.size() || gold.empty()) throw DimensionMismatch("spearman needs equal, nonempty inputs");
  const auto rg = average_ranks(gold);
  const auto rp = average_ranks(pred);
  return pearson(rg, rp);
}

namespace {

std::int64_t tied_pairs_in_runs(const std::vector<double>& sorted) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Sorts v ascending and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double kendall_tau(std::span<const double> gold, std::span<const double> pred) {
  if (gold.size() != pred.size() || gold.empty()) throw DimensionMismatch("kendall needs equal, nonempty inputs");
  const std::size_t n = gold.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gold[a] != gold[b] ? gold[a] < gold[b] : pred[a] < pred[b];
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = gold[order[i]];
    ys[i] = pred[order[i]];
  }
  const std::int64_t total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t x_ties = tied_pairs_in_runs(xs);

  std::int64_t joint_ties = 0, run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
      ++run;
    } else {
      joint_ties += run * (run - 1) / 2;
      run = 1;
    }
  }

  std::vector<double> buf(n);
  const std::int64_t discordant = merge_count(ys, buf, 0, n);
  const std::int64_t y_ties = tied_pairs_in_runs(ys);

  const double denom = std::sqrt(static_cast<double>(total - x_ties) * static_cast<double>(total - y_ties));
  if (denom == 0.0) throw UndefinedCorrelation("kendall tau of a constant list");
  const double num = static_cast<double>(total - x_ties - y_ties + joint_ties - 2 * discordant);
  return std::clamp(num / denom, -1.0, 1.0);
}

std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

RankCorrelation at_k(std::span<const double> gold, std::span<const double> pred, std::size_t k, TopKBy by) {
  if (gold.size() != pred.size()) throw DimensionMismatch("at_k needs equal-length inputs");
  if (k == 0 || gold.size() < k) throw std::invalid_argument("at_k needs at least k items");
  const auto idx = top_k_indices(by == TopKBy::Gold ? gold : pred, k);
  std::vector<double> g, p;
  g.reserve(k);
  p.reserve(k);
  for (auto i : idx) {
    g.push_back(gold[i]);
    p.push_back(pred[i]);
  }
  return {spearman_rho(g, p), kendall_tau(g, p)};
}

double mrr(std::span<const std::optional<std::size_t>> positions) {
  if (positions.empty()) throw std::invalid_argument("mrr of an empty query set");
  double sum = 0.0;
  for (const auto& pos : positions) {
    if (!pos) continue;
    if (*pos == 0) throw std::invalid_argument("ranks are 1-based");
    sum += 1.0 / static_cast<double>(*pos);
  }
  return sum / static_cast<double>(positions.size());
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u needs two nonempty samples");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());

  // Doubled midranks are integers.
  const auto ranks = average_ranks(pooled);
  std::vector<std::int64_t> doubled(n);
  for (std::size_t i = 0; i < n; ++i) doubled[i] = static_cast<std::int64_t>(std::llround(2.0 * ranks[i]));
  std::int64_t sum_a = 0;
  for (std::size_t i = 0; i < na; ++i) sum_a += doubled[i];
  const auto na64 = static_cast<std::int64_t>(na), nb64 = static_cast<std::int64_t>(nb);
  const std::int64_t u2 = sum_a - na64 * (na64 + 1);  // 2U
  const std::int64_t center2 = na64 * nb64;          // 2 * E[U]

  MannWhitneyResult result;
  result.u = static_cast<double>(u2) / 2.0;

  if (na <= kExactMannWhitneyLimit && nb <= kExactMannWhitneyLimit) {
    // ways[k][s]: subsets of size k with doubled-rank sum s.
    const std::int64_t max_sum = std::accumulate(doubled.begin(), doubled.end(), std::int64_t{0});
    std::vector<std::vector<double>> ways(na + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(doubled[i]);
      for (std::size_t k = std::min(i + 1, na); k >= 1; --k)
        for (std::size_t s = static_cast<std::size_t>(max_sum); s >= r; --s) {
          ways[k][s] += ways[k - 1][s - r];
          if (s == r) break;
        }
    }
    const std::int64_t observed = std::llabs(u2 - center2);
    double extreme = 0.0, total = 0.0;
    for (std::size_t s = 0; s < ways[na].size(); ++s) {
      if (ways[na][s] == 0.0) continue;
      total += ways[na][s];
      const std::int64_t dev = std::llabs(static_cast<std::int64_t>(s) - na64 * (na64 + 1) - center2);
      if (dev >= observed) extreme += ways[na][s];
    }
    result.p_two_sided = std::min(1.0, extreme / total);
    result.exact = true;
    return result;
  }

  // Normal approximation.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double dn = static_cast<double>(n);
  const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) {
    result.p_two_sided = 1.0;
    return result;
  }
  const double dev = std::abs(result.u - static_cast<double>(center2) / 2.0) - 0.5;
  const double z = std::max(0.0, dev) / std::sqrt(var);
  result.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

RankedList RankedList::from_scores(std::vector<std::pair<std::string, double>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  RankedList list;
  list.items.reserve(scored.size());
  std::size_t group = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (i > 0 && scored[i].second != scored[i - 1].second) ++group;
    list.items.push_back({std::move(scored[i].first), scored[i].second, i + 1, group});
  }
  return list;
}

std::optional<std::size_t> RankedList::best_position(const StringSet& gold) const {
  for (const auto& item : items)
    if (gold.contains(item.id)) return item.position;
  return std::nullopt;
}

}  // namespace pkgpulse
