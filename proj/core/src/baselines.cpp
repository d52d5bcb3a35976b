#include "pkgpulse/baselines.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "pkgpulse/error.hpp"
#include "pkgpulse/parallel.hpp"
#include "pkgpulse/random.hpp"

namespace pkgpulse {

RankedList upper_bound_ranking(const Query& query) {
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& d : query.candidates) scored.emplace_back(d, query.gold.contains(d) ? 1.0 : 0.0);
  return RankedList::from_scores(std::move(scored));
}

RankedList majority_ranking(const Corpus& corpus, std::string_view package, int T, int k_maj,
                            const StringSet& candidate_set) {
  std::vector<std::pair<std::string, double>> scored;
  const auto w = clamp_window(corpus, T - k_maj, T - 1);
  for (const auto& d : candidate_set) {
    int count = 0;
    if (w)
      for (int tau = w->first; tau <= w->second; ++tau) count += corpus.at(tau).devs_of(package).contains(d) ? 1 : 0;
    scored.emplace_back(d, static_cast<double>(count));
  }
  return RankedList::from_scores(std::move(scored));
}

int seq_of_sets_history(const Corpus& corpus, int T, const SeqOfSetsOptions& options) {
  const int all = T - corpus.first_index();
  return options.history > 0 ? std::min(options.history, std::max(all, 1)) : std::max(all, 1);
}

RankedList seq_of_sets_ranking(const Corpus& corpus, std::string_view package, int T, double p_corr,
                               std::uint64_t seed, const SeqOfSetsOptions& options) {
  if (options.runs < 1) throw std::invalid_argument("seq_of_sets needs at least one run");
  if (!(options.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  struct Past {
    std::vector<std::string> members;
    double weight;
  };
  std::vector<Past> history;  // oldest first
  if (const auto w = clamp_window(corpus, T - seq_of_sets_history(corpus, T, options), T - 1))
    for (int tau = w->first; tau <= w->second; ++tau) {
      const auto& devs = corpus.at(tau).devs_of(package);
      if (!devs.empty())
        history.push_back({{devs.begin(), devs.end()}, std::pow(options.gamma, static_cast<double>(T - 1 - tau))});
    }
  if (history.empty()) return {};

  double total_weight = 0.0;
  for (const auto& h : history) total_weight += h.weight;

  const auto runs = static_cast<std::size_t>(options.runs);
  std::vector<const std::string*> draws(runs);
  const std::uint64_t package_key = fnv1a64(package);
  parallel_for(runs, [&](std::size_t run) {
    std::mt19937_64 rng(derive_seed(seed, {package_key, static_cast<std::uint64_t>(run)}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Past* chosen = &history.back();
    if (!(unit(rng) < p_corr)) {
      double u = unit(rng) * total_weight;
      for (const auto& h : history) {
        chosen = &h;
        if (u < h.weight) break;
        u -= h.weight;
      }
    }
    std::uniform_int_distribution<std::size_t> pick(0, chosen->members.size() - 1);
    draws[run] = &chosen->members[pick(rng)];
  });

  std::map<std::string, double, std::less<>> counts;
  for (const auto* d : draws) counts[*d] += 1.0;
  return RankedList::from_scores({counts.begin(), counts.end()});
}

namespace {

BaselineRun make_run(std::string method, const Corpus& corpus, int T, CandidatePolicy policy, int window) {
  if (!corpus.has_index(T)) throw RangeError("test distribution index " + std::to_string(T) + " not in corpus");
  BaselineRun run;
  run.method = std::move(method);
  run.test_distribution = corpus.at(T).distribution();
  run.policy = policy;
  run.window = window;
  return run;
}

void finish(BaselineRun& run, std::span<const Query> queries, std::vector<RankedList> rankings) {
  run.recommendations.resize(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Recommendation& r = run.recommendations[i];
    r.package = queries[i].package;
    r.gold = queries[i].gold;
    r.ranked = std::move(rankings[i]);
    r.best_position = r.ranked.best_position(r.gold);
  }
  run.summary = summarize(run.recommendations);
}

}  // namespace

BaselineRun run_upper_bound(const Corpus& corpus, int T, CandidatePolicy policy, int window) {
  BaselineRun run = make_run("upper_bound", corpus, T, policy, window);
  const auto queries = evaluation_queries(corpus, policy, window, T);
  std::vector<RankedList> rankings;
  for (const auto& q : queries) rankings.push_back(upper_bound_ranking(q));
  finish(run, queries, std::move(rankings));
  return run;
}

BaselineRun run_majority(const Corpus& corpus, int T, CandidatePolicy policy, int window, int k_maj) {
  if (k_maj < 1) throw std::invalid_argument("k_maj must be at least 1");
  BaselineRun run = make_run("majority", corpus, T, policy, window);
  run.k_maj = k_maj;
  const auto queries = evaluation_queries(corpus, policy, window, T);
  std::vector<RankedList> rankings(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    rankings[i] = majority_ranking(corpus, queries[i].package, T, k_maj, queries[i].candidates);
  });
  finish(run, queries, std::move(rankings));
  return run;
}

BaselineRun run_seq_of_sets(const Corpus& corpus, int T, double p_corr, std::uint64_t seed,
                            const SeqOfSetsOptions& options) {
  const int history = seq_of_sets_history(corpus, T, options);
  BaselineRun run = make_run("seq_of_sets", corpus, T, CandidatePolicy::Main, history);
  run.p_corr = p_corr;
  const auto queries = evaluation_queries(corpus, CandidatePolicy::Main, history, T);
  std::vector<RankedList> rankings;
  for (const auto& q : queries) rankings.push_back(seq_of_sets_ranking(corpus, q.package, T, p_corr, seed, options));
  finish(run, queries, std::move(rankings));
  return run;
}

SeqOfSetsSweep sweep_seq_of_sets(const Corpus& corpus, int T, std::uint64_t seed, const SeqOfSetsOptions& options,
                                 std::vector<double> p_values) {
  if (p_values.empty())
    for (int i = 1; i <= 9; ++i) p_values.push_back(i / 10.0);
  SeqOfSetsSweep sweep;
  bool have = false;
  for (double p : p_values) {
    BaselineRun run = run_seq_of_sets(corpus, T, p, seed, options);
    sweep.table.emplace_back(p, run.summary.mrr);
    if (!have || run.summary.mrr > sweep.best.summary.mrr) {
      sweep.best = std::move(run);
      have = true;
    }
  }
  return sweep;
}

}  // namespace pkgpulse
