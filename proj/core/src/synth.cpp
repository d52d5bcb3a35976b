#include "pkgpulse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>

namespace pkgpulse {

namespace {

std::string numbered(const char* prefix, int i, const char* suffix = "") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%04d%s", prefix, i, suffix);
  return buf;
}

std::string release_name(int t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "r%02d", t);
  return buf;
}

std::int64_t poisson(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

struct PackageState {
  int arrival = 1;
  bool present = false;
  double size = 0.0;
  double base_rate = 0.0;
  std::int64_t fixed_bugs = 0;
  StringSet team;
  std::int64_t bugs_prev = 0;
};

}  // namespace

Dataset synthesize(const SynthConfig& cfg) {
  if (cfg.releases < 2) throw std::invalid_argument("synthetic corpus needs at least 2 releases");
  if (cfg.packages < 2) throw std::invalid_argument("synthetic corpus needs at least 2 packages");
  const bool persistent = cfg.mode == SynthMode::Persistent;
  const int n = cfg.packages;
  const int pool = cfg.developers > 0 ? cfg.developers : std::max(2, n / 2);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> any_dev(0, pool - 1);

  Dataset ds;
  std::vector<std::string> dev_ids(static_cast<std::size_t>(pool));
  for (int d = 0; d < pool; ++d) {
    dev_ids[static_cast<std::size_t>(d)] = numbered("dev", d, "@example.org");
    ds.developer_names[dev_ids[static_cast<std::size_t>(d)]] = numbered("Developer ", d);
  }

  const int initial = persistent ? n : std::clamp(static_cast<int>(std::lround(cfg.initial_fraction * n)), 2, n);
  std::vector<PackageState> pkgs(static_cast<std::size_t>(n));
  std::vector<std::string> names(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& p = pkgs[static_cast<std::size_t>(i)];
    names[static_cast<std::size_t>(i)] = numbered("pkg", i);
    if (i >= initial) p.arrival = 2 + static_cast<int>((static_cast<long>(i - initial) * (cfg.releases - 1)) / (n - initial));
    p.size = persistent ? 100000.0 : std::exp(11.0 + 1.5 * normal(rng));
    p.base_rate = std::exp(cfg.base_log_mean + cfg.base_log_sd * normal(rng));
    p.fixed_bugs = std::uniform_int_distribution<std::int64_t>(1, std::max(1, cfg.persistent_max_bugs))(rng);
    const int team_size = unit(rng) < 0.7 ? 1 : 2;
    for (int k = 0; k < team_size; ++k) p.team.insert(dev_ids[static_cast<std::size_t>(any_dev(rng))]);
  }

  // Preferential attachment in arrival order: dependees drawn with
  // probability proportional to in-degree + 1 among earlier packages.
  EdgeSet edges;
  std::vector<double> in_degree(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i < n; ++i) {
    const int m = std::min(cfg.attach_edges, i);
    for (int e = 0; e < m; ++e) {
      double total = 0.0;
      for (int j = 0; j < i; ++j) total += in_degree[static_cast<std::size_t>(j)] + 1.0;
      double u = unit(rng) * total;
      int target = i - 1;
      for (int j = 0; j < i; ++j) {
        u -= in_degree[static_cast<std::size_t>(j)] + 1.0;
        if (u < 0.0) {
          target = j;
          break;
        }
      }
      if (edges.emplace(names[static_cast<std::size_t>(i)], names[static_cast<std::size_t>(target)]).second)
        in_degree[static_cast<std::size_t>(target)] += 1.0;
    }
  }
  std::vector<std::vector<std::size_t>> neighbors(static_cast<std::size_t>(n));
  {
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
    for (const auto& [a, b] : edges) {
      neighbors[index[a]].push_back(index[b]);
      neighbors[index[b]].push_back(index[a]);
    }
  }

  const Date first_release = std::chrono::sys_days{std::chrono::year{2010} / 4 / 29};
  std::int64_t next_bug = 1;
  std::vector<Snapshot> snapshots;
  for (int t = 1; t <= cfg.releases; ++t) {
    // Presence.
    for (auto& p : pkgs) {
      if (p.arrival > t) continue;
      if (persistent || p.arrival == t) p.present = true;
      else if (p.present) p.present = !(unit(rng) < cfg.removal_probability);
      else p.present = unit(rng) < cfg.restore_probability;
    }
    // Team churn with replacements partly hired from neighbor teams.
    if (t > 1)
      for (std::size_t i = 0; i < pkgs.size(); ++i) {
        auto& p = pkgs[i];
        if (!p.present || p.arrival == t) continue;
        StringSet kept;
        for (const auto& d : p.team)
          if (unit(rng) < cfg.retention) kept.insert(d);
        if (kept.empty() || unit(rng) < 1.0 - cfg.retention) {
          std::vector<const std::string*> nearby;
          for (auto j : neighbors[i])
            for (const auto& d : pkgs[j].team) nearby.push_back(&d);
          if (!nearby.empty() && unit(rng) < cfg.neighbor_hire)
            kept.insert(*nearby[std::uniform_int_distribution<std::size_t>(0, nearby.size() - 1)(rng)]);
          else
            kept.insert(dev_ids[static_cast<std::size_t>(any_dev(rng))]);
        }
        p.team = std::move(kept);
      }
    // Bugs from the previous release's neighbor counts.
    std::vector<std::int64_t> bugs(pkgs.size(), 0);
    for (std::size_t i = 0; i < pkgs.size(); ++i) {
      auto& p = pkgs[i];
      if (!p.present) continue;
      if (persistent) {
        bugs[i] = p.fixed_bugs;
        continue;
      }
      double nbr_sum = 0.0;
      int nbr_count = 0;
      for (auto j : neighbors[i])
        if (pkgs[j].present) {
          nbr_sum += static_cast<double>(pkgs[j].bugs_prev);
          ++nbr_count;
        }
      const double coupled = nbr_count ? cfg.coupling * nbr_sum / nbr_count : 0.0;
      bugs[i] = poisson(rng, p.base_rate) + poisson(rng, coupled);
      p.size *= 1.0 + std::uniform_real_distribution<double>(-0.05, 0.10)(rng);
    }

    SnapshotData data;
    data.distribution = {release_name(t), t};
    data.release_date = first_release + std::chrono::days{182 * (t - 1)};
    std::uniform_int_distribution<int> urgency(0, 9);
    for (std::size_t i = 0; i < pkgs.size(); ++i) {
      auto& p = pkgs[i];
      p.bugs_prev = p.present ? bugs[i] : 0;
      if (!p.present) continue;
      PackageInfo info;
      info.size = static_cast<std::uint64_t>(std::llround(p.size));
      info.binaries = {names[i]};
      for (std::int64_t b = 0; b < bugs[i]; ++b) info.bug_ids.push_back(next_bug++);
      data.packages.emplace(names[i], std::move(info));
      if (persistent || unit(rng) < cfg.active_probability) {
        data.developers[names[i]] = p.team;
        for (const auto& d : p.team) {
          DeveloperActivity a;
          const int u = urgency(rng);
          (u < 5 ? a.low : u < 9 ? a.medium : a.high) += 1;
          a.bugs_closed = poisson(rng, 1.0);
          data.activity[d] += a;
        }
      }
    }
    for (const auto& [a, b] : edges)
      if (data.packages.contains(a) && data.packages.contains(b)) data.dep_edges.emplace(a, b);
    snapshots.emplace_back(std::move(data));
  }
  ds.corpus = Corpus(std::move(snapshots));
  return ds;
}

}  // namespace pkgpulse
