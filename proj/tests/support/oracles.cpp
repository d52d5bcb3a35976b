#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pkgpulse::oracle {

std::vector<double> average_ranks(const std::vector<double>& x, bool descending) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double better = 0, ties = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == i) continue;
      if (x[j] == x[i]) ties += 1;
      else if (descending ? x[j] > x[i] : x[j] < x[i]) better += 1;
    }
    r[i] = 1.0 + better + ties / 2.0;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const long double n = static_cast<long double>(a.size());
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
  long long concordant = 0, discordant = 0, tied_a = 0, tied_b = 0, pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      ++pairs;
      const double da = a[i] - a[j], db = b[i] - b[j];
      if (da == 0) ++tied_a;
      if (db == 0) ++tied_b;
      if (da == 0 || db == 0) continue;
      if ((da > 0) == (db > 0)) ++concordant;
      else ++discordant;
    }
  const long double denom =
      std::sqrt(static_cast<long double>(pairs - tied_a) * static_cast<long double>(pairs - tied_b));
  return static_cast<double>((concordant - discordant) / denom);
}

namespace {

double pairwise_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  return u;
}

}  // namespace

UTest mann_whitney_enumerated(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double center = static_cast<double>(a.size() * b.size()) / 2.0;
  const double observed = pairwise_u(a, b);
  // Walk every na-subset via a selection mask in lexicographic order.
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(na), true);
  long extreme = 0, total = 0;
  do {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) (mask[i] ? x : y).push_back(pooled[i]);
    ++total;
    if (std::abs(pairwise_u(x, y) - center) >= std::abs(observed - center) - 1e-9) ++extreme;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return {observed, static_cast<double>(extreme) / static_cast<double>(total)};
}

double mrr(const std::vector<long>& positions) {
  double s = 0;
  for (long p : positions) s += p > 0 ? 1.0 / static_cast<double>(p) : 0.0;
  return s / static_cast<double>(positions.size());
}

SplitChoice best_split(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                       std::size_t min_leaf) {
  SplitChoice best;
  double best_sse = INFINITY;
  const std::size_t features = rows.empty() ? 0 : rows.front().size();
  for (std::size_t f = 0; f < features; ++f) {
    std::set<double> values;
    for (const auto& r : rows) values.insert(r[f]);
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double thr = *it + (*std::next(it) - *it) / 2.0;
      std::vector<double> left, right;
      for (std::size_t i = 0; i < rows.size(); ++i) (rows[i][f] <= thr ? left : right).push_back(y[i]);
      if (left.size() < min_leaf || right.size() < min_leaf) continue;
      auto sse = [](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s;
      };
      const double total = sse(left) + sse(right);
      if (best.feature < 0 || total < best_sse - 1e-9 * std::max(1.0, best_sse)) {
        best_sse = total;
        best = {static_cast<int>(f), thr, total / static_cast<double>(rows.size())};
      }
    }
  }
  return best;
}

namespace {

StringSet neighbor_devs_scan(const Snapshot& snap, const std::string& package) {
  StringSet out;
  for (const auto& [from, to] : snap.data().dep_edges) {
    const std::string* other = from == package ? &to : to == package ? &from : nullptr;
    if (!other) continue;
    if (auto it = snap.data().developers.find(*other); it != snap.data().developers.end())
      out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

}  // namespace

StringSet candidates(const Corpus& corpus, const std::string& package, int t, bool with_neighbors, int window) {
  StringSet out;
  for (const auto& snap : corpus.snapshots()) {
    if (snap.index() < t - window || snap.index() > t - 1) continue;
    if (auto it = snap.data().developers.find(package); it != snap.data().developers.end())
      out.insert(it->second.begin(), it->second.end());
    if (with_neighbors) out.merge(neighbor_devs_scan(snap, package));
  }
  return out;
}

std::vector<InstanceSets> instances(const Corpus& corpus, bool with_neighbors, int window, int T) {
  std::vector<InstanceSets> out;
  for (int h = T - window; h <= T - 1; ++h) {
    if (!corpus.has_index(h)) continue;
    const Snapshot& snap = corpus.at(h);
    for (const auto& [pkg, info] : snap.data().packages) {
      std::set<std::string> gold;
      if (auto it = snap.data().developers.find(pkg); it != snap.data().developers.end())
        gold.insert(it->second.begin(), it->second.end());
      InstanceSets inst{pkg, h, {}, {}};
      for (const auto& d : candidates(corpus, pkg, h, with_neighbors, window))
        (gold.count(d) ? inst.positives : inst.negatives).insert(d);
      if (!inst.positives.empty() && !inst.negatives.empty()) out.push_back(std::move(inst));
    }
  }
  return out;
}

std::map<std::string, double> seq_of_sets_probabilities(const Corpus& corpus, const std::string& package, int T,
                                                        double p_corr, double gamma, int history) {
  std::vector<std::pair<int, StringSet>> sets;
  for (const auto& snap : corpus.snapshots()) {
    if (snap.index() >= T || snap.index() < T - history) continue;
    if (auto it = snap.data().developers.find(package); it != snap.data().developers.end() && !it->second.empty())
      sets.emplace_back(snap.index(), it->second);
  }
  std::map<std::string, double> p;
  if (sets.empty()) return p;
  const auto& last = sets.back().second;
  for (const auto& d : last) p[d] += p_corr / static_cast<double>(last.size());
  double norm = 0;
  for (const auto& [tau, s] : sets) norm += std::pow(gamma, T - 1 - tau);
  for (const auto& [tau, s] : sets)
    for (const auto& d : s)
      p[d] += (1 - p_corr) * std::pow(gamma, T - 1 - tau) / norm / static_cast<double>(s.size());
  return p;
}

}  // namespace pkgpulse::oracle
