#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pkgpulse/featurize.hpp"
#include "pkgpulse/metrics.hpp"
#include "pkgpulse/ranker.hpp"

namespace pkgpulse {

enum class CandidatePolicy { Main, MainDepn };
enum class DevFeatureSet { Auto, AutoDepn };

std::string to_string(CandidatePolicy policy);
std::string to_string(DevFeatureSet features);
/// "main" / "main+depn".
std::optional<CandidatePolicy> parse_policy(std::string_view text);
/// "auto" / "auto+depn".
std::optional<DevFeatureSet> parse_dev_features(std::string_view text);

/// Union of devs(s, tau) over tau in [t-K, t-1] (clamped to the corpus);
/// MainDepn adds the developers of s's in- and out-neighbors at each tau.
StringSet candidates(const Corpus& corpus, std::string_view package, int t, CandidatePolicy policy, int window);

/// Feature vector x_{s,t,d}.
FeatureVector developer_features(const Corpus& corpus, std::string_view package, std::string_view developer, int t,
                                 int window, DevFeatureSet features);

struct Instance {
  std::string package;
  int horizon = 0;
  std::vector<std::string> positive_ids;  // sorted
  std::vector<std::string> negative_ids;  // sorted
  PairInstance features;                  // aligned with the id lists
};

/// Instances for horizons T-K .. T-1 (those inside the corpus), packages in
/// name order. Only (package, horizon) pairs with both positives and
/// negatives are kept.
std::vector<Instance> build_instances(const Corpus& corpus, CandidatePolicy policy, DevFeatureSet features,
                                      int window, int T);

/// One evaluation query: a package present at T with a nonempty gold set.
struct Query {
  std::string package;
  StringSet gold;
  StringSet candidates;
};

std::vector<Query> evaluation_queries(const Corpus& corpus, CandidatePolicy policy, int window, int T);

struct Recommendation {
  std::string package;
  RankedList ranked;  // empty when the package has no candidates
  StringSet gold;
  std::optional<std::size_t> best_position;
};

/// Scores the candidates of every query. Throws DimensionMismatch when the
/// model does not match the feature set.
std::vector<Recommendation> recommend(const Corpus& corpus, const Ranker& model, std::span<const Query> queries,
                                      DevFeatureSet features, int window, int T);

/// Shared summary of a recommendation run: MRR over all queries (packages
/// without candidates count as misses) and coverage.
struct RecommendationSummary {
  std::size_t queries = 0;
  std::size_t with_candidates = 0;
  double mrr = 0.0;
  double mrr_covered = 0.0;  // over queries with candidates only
  double coverage = 0.0;
  std::vector<double> reciprocal_ranks;  // query order
};

RecommendationSummary summarize(std::span<const Recommendation> recs);

struct DevrecConfig {
  CandidatePolicy policy = CandidatePolicy::Main;
  DevFeatureSet features = DevFeatureSet::Auto;
  ModelKind model = ModelKind::Linear;
  int window = 5;
  SgdOptions sgd;
};

/// The reported pairings: main/auto/LR and main+depn/auto+depn/MLP.
DevrecConfig paired_config(CandidatePolicy policy);

struct DevrecRun {
  DistributionId test_distribution;
  DevrecConfig config;
  std::size_t training_instances = 0;
  std::size_t training_pairs = 0;
  SgdResult training;
  std::vector<std::string> feature_names;
  std::vector<Recommendation> recommendations;
  RecommendationSummary summary;
};

/// Throws RangeError for T outside the corpus and UntrainedModelError when
/// no training instance exists.
DevrecRun run_devrec(const Corpus& corpus, int T, const DevrecConfig& config = {});

}  // namespace pkgpulse
