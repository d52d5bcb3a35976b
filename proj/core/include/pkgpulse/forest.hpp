#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pkgpulse/featurize.hpp"

namespace pkgpulse {

struct ForestHyper {
  int n_estimators = 100;
  int max_depth = 4;
  int min_samples_split = 4;
  int min_samples_leaf = 20;
  std::uint64_t random_state = 0;
  bool bootstrap = true;

  bool operator==(const ForestHyper&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t samples = 0;

  bool is_leaf() const noexcept { return feature < 0; }
};

/// CART regression tree; rows with x[feature] <= threshold go left.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
};

struct Forest {
  ForestHyper hyper;
  std::size_t n_features = 0;
  std::vector<RegressionTree> trees;

  /// Mean of the tree predictions. Throws DimensionMismatch.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const DesignMatrix& X) const;
};

/// Fits one tree on the multiset `rows` of X (indices may repeat).
/// Splits maximize the reduction in summed squared error; ties keep the
/// lowest feature index, then the lowest threshold.
RegressionTree fit_tree(const DesignMatrix& X, std::span<const double> y, std::span<const std::size_t> rows,
                        const ForestHyper& hyper);

/// Throws std::invalid_argument on an empty or mismatched training set.
Forest forest_fit(const DesignMatrix& X, std::span<const double> y, const ForestHyper& hyper);

/// Bootstrap draw for tree `tree_index`; identity order when bootstrap is off.
std::vector<std::size_t> tree_sample(std::size_t n_rows, const ForestHyper& hyper, std::size_t tree_index);

std::vector<ForestHyper> default_forest_grid();
std::vector<ForestHyper> make_grid(std::span<const int> n_estimators, std::span<const int> max_depth,
                                   std::span<const int> min_samples_split, std::span<const int> min_samples_leaf,
                                   std::span<const std::uint64_t> random_state);

/// Higher is better. May throw UndefinedCorrelation, scored as -inf.
using ValidationMetric = std::function<double(std::span<const double> gold, std::span<const double> pred)>;

struct GridEntry {
  ForestHyper hyper;
  double score = 0.0;
};

struct GridResult {
  ForestHyper best;
  double best_score = 0.0;
  std::vector<GridEntry> table;  // grid order
};

/// Exhaustive search; first grid point wins ties. Throws std::invalid_argument on an empty grid.
GridResult grid_search(std::span<const ForestHyper> grid, const DesignMatrix& train_X, std::span<const double> train_y,
                       const DesignMatrix& valid_X, std::span<const double> valid_y,
                       const ValidationMetric& metric = {});

std::string to_json(const Forest& forest);
Forest forest_from_json(std::string_view text);

}  // namespace pkgpulse
