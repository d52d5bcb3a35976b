#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pkgpulse/featurize.hpp"
#include "pkgpulse/forest.hpp"
#include "pkgpulse/metrics.hpp"

namespace pkgpulse {

enum class FeatureMode { Auto, AutoDepn };

std::string to_string(FeatureMode mode);
/// "auto" or "auto+depn"; nullopt otherwise.
std::optional<FeatureMode> parse_feature_mode(std::string_view text);

/// Packages present at t whose bug counts over [t-window, t-1] (truncated
/// at the corpus start) sum to more than zero. Sorted by name.
std::vector<std::string> eligible_packages(const Corpus& corpus, int t, int window = 10);

/// Feature row of (package, t) for the given mode.
FeatureVector urgency_features(const Corpus& corpus, std::string_view package, int t, FeatureMode mode,
                               const UrgencyFeatureOptions& options = {});

struct UrgencyConfig {
  FeatureMode mode = FeatureMode::Auto;
  int k_train = 5;
  int filter_window = 10;
  UrgencyFeatureOptions dep_options;
  /// Empty means the default grid.
  std::vector<ForestHyper> grid;
  /// Hold out t-1 to pick hyperparameters; otherwise grid.front() is used.
  bool grid_search = true;
  std::size_t top_k = 25;
};

/// Training rows for horizons [from, to]: one row per package eligible at
/// each horizon, labelled with its bug count there.
struct TrainingSet {
  DesignMatrix X;
  std::vector<double> y;
  std::vector<std::string> packages;
  std::vector<int> horizons;
};

TrainingSet build_training_set(const Corpus& corpus, int from, int to, const UrgencyConfig& config);

struct UrgencyRun {
  DistributionId test_distribution;
  UrgencyConfig config;
  std::vector<std::string> packages;  // eligible at t, sorted
  std::vector<double> predictions;
  std::vector<double> gold;
  std::vector<double> predicted_ranks;  // average ranks, descending
  std::vector<double> gold_ranks;
  std::vector<double> rank_errors;      // |gold rank - predicted rank|
  std::vector<std::string> feature_names;
  std::size_t training_rows = 0;
  ForestHyper chosen;
  std::vector<GridEntry> grid_table;
  Forest forest;

  // nullopt when undefined (constant input or fewer than k packages).
  std::optional<double> rho, tau;
  std::optional<double> rho_at_k, tau_at_k;              // top-k by gold
  std::optional<double> rho_at_k_pred, tau_at_k_pred;    // top-k by prediction
};

/// Throws InsufficientHistory unless t-K-2 is inside the corpus, and
/// RangeError when t is not.
UrgencyRun run_urgency(const Corpus& corpus, int t, const UrgencyConfig& config = {});

}  // namespace pkgpulse
