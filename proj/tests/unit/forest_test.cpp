#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pkgpulse/error.hpp"
#include "pkgpulse/forest.hpp"

namespace pkgpulse {
namespace {

struct Data {
  DesignMatrix X;
  std::vector<double> y;
  std::vector<std::vector<double>> rows;
};

Data random_data(std::uint64_t seed, std::size_t n, std::size_t d) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  Data out{DesignMatrix(names), {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (auto& v : r) v = g(rng);
    out.y.push_back(2.0 * r[0] - r[d - 1] * r[d - 1] + 0.3 * g(rng));
    out.X.append(r);
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

ForestHyper plain(int depth, int leaf) {
  ForestHyper h;
  h.n_estimators = 1;
  h.max_depth = depth;
  h.min_samples_split = 2;
  h.min_samples_leaf = leaf;
  h.bootstrap = false;
  return h;
}

double sse_of_split(const Data& d, int feature, double thr) {
  double sl = 0, sr = 0, ql = 0, qr = 0, nl = 0, nr = 0;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    const bool left = d.rows[i][static_cast<std::size_t>(feature)] <= thr;
    (left ? sl : sr) += d.y[i];
    (left ? ql : qr) += d.y[i] * d.y[i];
    (left ? nl : nr) += 1;
  }
  return (ql - sl * sl / nl) + (qr - sr * sr / nr);
}

TEST(RegressionTree, ConstantTargetIsSingleLeaf) {
  Data d = random_data(1, 50, 3);
  std::fill(d.y.begin(), d.y.end(), 4.25);
  const auto tree = fit_tree(d.X, d.y, all_rows(50), plain(5, 1));
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_EQ(tree.predict(d.rows[7]), 4.25);
}

TEST(RegressionTree, RootSplitMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Data d = random_data(seed, 40 + seed, 3);
    const std::size_t leaf = 1 + seed % 5;
    const auto tree = fit_tree(d.X, d.y, all_rows(d.y.size()), plain(1, static_cast<int>(leaf)));
    const auto want = oracle::best_split(d.rows, d.y, leaf);
    ASSERT_FALSE(tree.nodes.front().is_leaf());
    const auto& root = tree.nodes.front();
    const double got = sse_of_split(d, root.feature, root.threshold);
    EXPECT_NEAR(got, want.weighted_mse * static_cast<double>(d.y.size()), 1e-8) << "seed " << seed;
    EXPECT_EQ(root.feature, want.feature) << "seed " << seed;
    EXPECT_DOUBLE_EQ(root.threshold, want.threshold) << "seed " << seed;
  }
}

TEST(RegressionTree, LeafAndDepthInvariants) {
  const Data d = random_data(3, 400, 4);
  for (int depth : {1, 3, 6})
    for (int leaf : {1, 5, 20}) {
      const auto tree = fit_tree(d.X, d.y, all_rows(400), plain(depth, leaf));
      EXPECT_LE(tree.depth(), depth);
      for (const auto& n : tree.nodes) {
        if (n.is_leaf()) EXPECT_GE(n.samples, static_cast<std::size_t>(leaf));
        else EXPECT_EQ(tree.nodes[static_cast<std::size_t>(n.left)].samples +
                           tree.nodes[static_cast<std::size_t>(n.right)].samples,
                       n.samples);
      }
    }
}

TEST(RegressionTree, LeafValueIsMeanOfItsRows) {
  const Data d = random_data(4, 120, 2);
  const auto tree = fit_tree(d.X, d.y, all_rows(120), plain(3, 4));
  std::map<double, std::pair<double, int>> by_leaf;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    std::size_t k = 0;
    while (!tree.nodes[k].is_leaf()) {
      const auto& n = tree.nodes[k];
      k = static_cast<std::size_t>(d.rows[i][static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    by_leaf[static_cast<double>(k)].first += d.y[i];
    by_leaf[static_cast<double>(k)].second += 1;
    EXPECT_EQ(tree.predict(d.rows[i]), tree.nodes[k].value);
  }
  for (const auto& [k, acc] : by_leaf)
    EXPECT_NEAR(tree.nodes[static_cast<std::size_t>(k)].value, acc.first / acc.second, 1e-12);
}

double mse(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

TEST(Forest, TrainingErrorNotAboveMeanPredictorWithoutBootstrap) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Data d = random_data(seed, 150, 3);
    ForestHyper h = plain(4, 5);
    h.n_estimators = 5;
    const auto f = forest_fit(d.X, d.y, h);
    const double mean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(d.y.size());
    const std::vector<double> base(d.y.size(), mean);
    EXPECT_LE(mse(d.y, f.predict(d.X)), mse(d.y, base) + 1e-12);
  }
}

TEST(Forest, EachTreeBeatsMeanOnItsBootstrapSample) {
  const Data d = random_data(8, 200, 3);
  ForestHyper h;
  h.n_estimators = 8;
  h.min_samples_leaf = 5;
  h.random_state = 3;
  const auto f = forest_fit(d.X, d.y, h);
  for (std::size_t t = 0; t < f.trees.size(); ++t) {
    const auto rows = tree_sample(d.y.size(), h, t);
    double mean = 0;
    for (auto r : rows) mean += d.y[r];
    mean /= static_cast<double>(rows.size());
    double tree_err = 0, mean_err = 0;
    for (auto r : rows) {
      tree_err += std::pow(d.y[r] - f.trees[t].predict(d.rows[r]), 2);
      mean_err += std::pow(d.y[r] - mean, 2);
    }
    EXPECT_LE(tree_err, mean_err + 1e-9);
  }
}

TEST(Forest, DeterministicAndSeedSensitive) {
  const Data d = random_data(5, 120, 3);
  ForestHyper h;
  h.n_estimators = 10;
  h.min_samples_leaf = 3;
  const auto a = forest_fit(d.X, d.y, h), b = forest_fit(d.X, d.y, h);
  EXPECT_EQ(a.predict(d.X), b.predict(d.X));
  h.random_state = 99;
  EXPECT_NE(forest_fit(d.X, d.y, h).predict(d.X), a.predict(d.X));
}

TEST(Forest, RowOrderDoesNotMatterWithoutBootstrap) {
  const Data d = random_data(6, 90, 3);
  std::vector<std::size_t> perm = all_rows(90);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
  DesignMatrix X2(d.X.names());
  std::vector<double> y2;
  for (auto i : perm) {
    X2.append(d.rows[i]);
    y2.push_back(d.y[i]);
  }
  ForestHyper h = plain(4, 3);
  const auto a = forest_fit(d.X, d.y, h), b = forest_fit(X2, y2, h);
  for (const auto& r : d.rows) EXPECT_NEAR(a.predict(r), b.predict(r), 1e-12);
}

TEST(Forest, RejectsBadInput) {
  DesignMatrix empty(std::vector<std::string>{"x"});
  EXPECT_THROW(forest_fit(empty, std::vector<double>{}, ForestHyper{}), std::invalid_argument);
  const Data d = random_data(1, 10, 2);
  const auto f = forest_fit(d.X, d.y, plain(2, 1));
  EXPECT_THROW(f.predict(std::vector<double>{1, 2, 3}), DimensionMismatch);
}

TEST(Forest, JsonRoundTripPredictsIdentically) {
  const Data d = random_data(7, 100, 4);
  ForestHyper h;
  h.n_estimators = 6;
  h.min_samples_leaf = 4;
  const auto f = forest_fit(d.X, d.y, h);
  const auto back = forest_from_json(to_json(f));
  EXPECT_EQ(back.hyper, f.hyper);
  EXPECT_EQ(back.predict(d.X), f.predict(d.X));
}

TEST(Grid, DefaultGridSize) {
  EXPECT_EQ(default_forest_grid().size(), 1200u);
  const std::vector<int> a{1, 2}, b{3};
  const std::vector<std::uint64_t> s{0, 1, 2};
  EXPECT_EQ(make_grid(a, b, b, a, s).size(), 12u);
}

TEST(Grid, FirstMaximumWinsTies) {
  const Data d = random_data(9, 60, 2);
  const std::vector<int> est{1}, depth{1, 2, 3}, split{2}, leaf{1};
  const std::vector<std::uint64_t> rs{0};
  const auto grid = make_grid(est, depth, split, leaf, rs);
  const auto constant = [](std::span<const double>, std::span<const double>) { return 0.5; };
  const auto r = grid_search(grid, d.X, d.y, d.X, d.y, constant);
  EXPECT_EQ(r.best, grid.front());
  ASSERT_EQ(r.table.size(), 3u);
  for (const auto& e : r.table) EXPECT_EQ(e.score, 0.5);
}

TEST(Grid, UndefinedScoresNeverWin) {
  const Data d = random_data(10, 60, 2);
  const std::vector<int> est{1}, depth{1, 2}, split{2}, leaf{1};
  const std::vector<std::uint64_t> rs{0};
  const auto grid = make_grid(est, depth, split, leaf, rs);
  int call = 0;
  const auto metric = [&](std::span<const double>, std::span<const double>) -> double {
    if (call++ == 0) throw UndefinedCorrelation("constant");
    return -3.0;
  };
  const auto r = grid_search(grid, d.X, d.y, d.X, d.y, metric);
  EXPECT_TRUE(std::isinf(r.table[0].score) && r.table[0].score < 0);
  EXPECT_EQ(r.best, grid[1]);
  EXPECT_THROW(grid_search(std::vector<ForestHyper>{}, d.X, d.y, d.X, d.y), std::invalid_argument);
}

}  // namespace
}  // namespace pkgpulse
