#pragma once

// Slow, direct re-derivations used only to cross-check the library.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pkgpulse/tgraph.hpp"

namespace pkgpulse::oracle {

/// rank_i = 1 + #{strictly better} + #{ties other than i} / 2.
std::vector<double> average_ranks(const std::vector<double>& x, bool descending);

/// Textbook Pearson in long double.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

/// Pair enumeration: (C - D) / sqrt((n0 - n1)(n0 - n2)).
double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b);

/// U counted pairwise, p by enumerating every split of the pooled values.
struct UTest {
  double u;
  double p;
};
UTest mann_whitney_enumerated(const std::vector<double>& a, const std::vector<double>& b);

double mrr(const std::vector<long>& positions);  // 0 marks a miss

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double weighted_mse = 0.0;
};
/// Tries every midpoint between distinct sorted values of every feature and
/// computes the children's summed squared error directly.
SplitChoice best_split(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                       std::size_t min_leaf);

/// Candidate pool from raw snapshot data (edge list scans, no indexes).
StringSet candidates(const Corpus& corpus, const std::string& package, int t, bool with_neighbors, int window);

struct InstanceSets {
  std::string package;
  int horizon;
  std::set<std::string> positives;
  std::set<std::string> negatives;
  bool operator==(const InstanceSets&) const = default;
};
std::vector<InstanceSets> instances(const Corpus& corpus, bool with_neighbors, int window, int T);

/// Closed-form draw probabilities of the sequence-of-sets sampler.
std::map<std::string, double> seq_of_sets_probabilities(const Corpus& corpus, const std::string& package, int T,
                                                        double p_corr, double gamma, int history);

}  // namespace pkgpulse::oracle
