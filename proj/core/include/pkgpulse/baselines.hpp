#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pkgpulse/devrec.hpp"

namespace pkgpulse {

/// Candidates containing a gold developer are ranked first (score 1), the
/// rest follow with score 0, so the reciprocal rank is 1 on a hit and 0
/// otherwise.
RankedList upper_bound_ranking(const Query& query);

/// Candidates by how many of the distributions [T-k_maj, T-1] list them on
/// `package`; ties by developer id.
RankedList majority_ranking(const Corpus& corpus, std::string_view package, int T, int k_maj,
                            const StringSet& candidate_set);

struct SeqOfSetsOptions {
  double gamma = 0.5;  // weight of a set at age a is gamma^a, a = T-1-tau
  int runs = 20;
  int history = 0;  // distributions looked back; 0 means all
};

/// Monte-Carlo sampler over the package's developer-set history. Each run
/// draws one developer: with probability p_corr uniformly from the most
/// recent nonempty set, otherwise from a set picked with recency weight,
/// then uniformly within it. Drawn developers are ranked by draw count,
/// ties by id. Empty when the package has no history.
RankedList seq_of_sets_ranking(const Corpus& corpus, std::string_view package, int T, double p_corr,
                               std::uint64_t seed, const SeqOfSetsOptions& options = {});

struct BaselineRun {
  std::string method;  // upper_bound, majority, seq_of_sets
  DistributionId test_distribution;
  CandidatePolicy policy = CandidatePolicy::Main;
  int window = 5;
  int k_maj = 1;
  double p_corr = 0.0;
  std::vector<Recommendation> recommendations;
  RecommendationSummary summary;
};

BaselineRun run_upper_bound(const Corpus& corpus, int T, CandidatePolicy policy, int window);
BaselineRun run_majority(const Corpus& corpus, int T, CandidatePolicy policy, int window, int k_maj = 1);
/// Queries use the main policy over the sampler's history window.
BaselineRun run_seq_of_sets(const Corpus& corpus, int T, double p_corr, std::uint64_t seed,
                            const SeqOfSetsOptions& options = {});

struct SeqOfSetsSweep {
  std::vector<std::pair<double, double>> table;  // (p_corr, MRR) in sweep order
  BaselineRun best;                              // first maximum
};

/// Default sweep is 0.1, 0.2, ..., 0.9.
SeqOfSetsSweep sweep_seq_of_sets(const Corpus& corpus, int T, std::uint64_t seed, const SeqOfSetsOptions& options = {},
                                 std::vector<double> p_values = {});

/// Distributions a sampler with `options` looks back from T.
int seq_of_sets_history(const Corpus& corpus, int T, const SeqOfSetsOptions& options);

}  // namespace pkgpulse
